"""Bibliometric community analysis over the DBLP conference corpus."""

__version__ = "0.1.0"
