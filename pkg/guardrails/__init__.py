"""Simulation errors, resolution checks and output physicality checks"""
