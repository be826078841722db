"""Exact computations in the double Dyck path algebra and its polynomial representation."""

__version__ = "0.1.0"
