"""PDC joint spectral amplitudes and mQPG transfer functions"""
