"""coxperc: Cox continuum percolation on Delaunay street systems."""

__version__ = "1.0.0"
