"""Two-echelon truck-and-drone aid routing solvers."""

__version__ = "0.1.0"
