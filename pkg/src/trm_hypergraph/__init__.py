"""Task-resource matching on attributed 3-uniform hypergraphs."""
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
