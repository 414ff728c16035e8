"""Frequency grids, bin modes and pump synthesis"""
