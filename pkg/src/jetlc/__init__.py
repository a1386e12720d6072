"""Exact symbolic engine for the universal Levi-Civita connection on the first jet bundle of metrics."""

__version__ = "0.1.0"
