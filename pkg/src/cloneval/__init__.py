"""Semi-automated precision studies for method-level Java clone detectors."""

__version__ = "0.1.0"
