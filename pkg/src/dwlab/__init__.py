"""dwlab: an exact laboratory for DAG-width and related directed width measures."""

__version__ = "0.1.0"

from .graph import DiGraph, Role, components, decode, encode, reach

__all__ = [
    "DiGraph",
    "Role",
    "reach",
    "components",
    "encode",
    "decode",
    "__version__",
]
