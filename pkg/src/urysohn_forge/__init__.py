"""Exact finite constructions around isometric actions on the rational Urysohn space."""

__version__ = "0.1.0"
