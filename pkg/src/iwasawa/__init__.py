"""Rank-one Iwasawa theory at desk scale."""

__version__ = "0.1.0"
