"""Random polygon knots, HOMFLYPT identification and open-arc classifiers."""
__version__ = "0.1.0"
