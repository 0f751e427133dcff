"""Gradient maps, convexity and stability for real reductive representations."""
