"""Exact and numerical tools for maximum likelihood degrees of discriminantal
arrangements, configuration spaces X(k,m) and their degenerations."""

__version__ = "0.1.0"
