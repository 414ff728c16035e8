"""Beamsplitter demo, parameter scans, dimensionality estimator and the run orchestrator"""
