"""One-dimensional multifractal Kraichnan separation processes and multiplicative
Liouville Brownian motion."""

__version__ = "0.1.0"
