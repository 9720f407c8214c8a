"""Spectral projection kernels of the sub-Laplacian on step-two nilpotent groups."""

__version__ = "0.1.0"
