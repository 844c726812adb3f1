"""Exact verification of Darmon's refined class number congruence."""

__version__ = "0.1.0"
