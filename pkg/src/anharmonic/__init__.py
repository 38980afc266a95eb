"""Trans-series toolkit for even and odd anharmonic oscillators."""
__version__ = "0.1.0"
