"""Constructible sheaves on finite posets, exactly over the rationals, plus numerics for the
relative de Rham comparison on families of intervals."""

__version__ = "0.1.0"
