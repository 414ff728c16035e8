"""Schmidt/Takagi decompositions and Bogoliubov kernels"""
