"""Self-intersections of planar equilateral random walks and polygons."""
__version__ = "0.1.0"
