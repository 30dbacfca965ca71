"""Adaptive cube subdivision of real polynomial zero sets with condition-number instrumentation."""

__version__ = "0.1.0"
