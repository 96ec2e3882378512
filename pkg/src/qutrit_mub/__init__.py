"""Mutually unbiased bases and tomography for one to three qutrits."""
__version__ = "0.1.0"
