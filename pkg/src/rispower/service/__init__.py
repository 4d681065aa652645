"""HTTP service around the solver core."""

from .app import create_app

__all__ = ["create_app"]
