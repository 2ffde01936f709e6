"""Dimension groups and homology for shifts of finite type and s/u-bijective pairs."""

__version__ = "0.1.0"
