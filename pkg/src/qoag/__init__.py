"""Compatible quasi-ordered abelian groups at desk scale."""

__version__ = "0.1.0"
