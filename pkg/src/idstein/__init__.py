"""Stein operators, bias transforms and Fourier bounds for infinitely divisible laws."""
__version__ = "0.1.0"
