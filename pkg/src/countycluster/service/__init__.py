"""Read-only HTTP JSON API over an immutable analysis bundle."""

from .app import create_app

__all__ = ["create_app"]
