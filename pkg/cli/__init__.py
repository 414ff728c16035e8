"""Command-line front end of the frequency-bin network simulator"""

__version__ = "0.1.0"
