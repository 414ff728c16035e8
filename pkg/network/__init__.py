"""Composition of PDC and mQPG, covariance assembly and Gaussian metrics"""
