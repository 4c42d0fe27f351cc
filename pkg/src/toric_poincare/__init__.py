"""Multi-index Poincare series of affine toric varieties and toric constellations."""

__version__ = "0.1.0"
