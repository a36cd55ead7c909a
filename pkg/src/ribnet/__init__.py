"""ribnet: orthogonal nets from nodal spectral curves, and their Ribaucour transformations"""

__all__ = ["__version__"]
__version__ = "0.1.0"
