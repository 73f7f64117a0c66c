"""Measured laminations of H2 developed into flat, de Sitter, anti-de Sitter and hyperbolic models."""

from .models import InvalidInput

__all__ = ["InvalidInput"]
__version__ = "0.1.0"
