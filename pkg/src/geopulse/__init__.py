"""Geo-attributed tweet sentiment toward China: state and individual indices."""

__version__ = "0.1.0"
