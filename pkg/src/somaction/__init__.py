"""Hierarchical self-organizing-map pipeline for skeleton-based action
recognition."""

from .som import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
