"""Fixed-point-free maps with null minimal displacement, and the retractions that carry them."""

__version__ = "0.1.0"
