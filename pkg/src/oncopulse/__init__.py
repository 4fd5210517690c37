"""oncopulse: desk-scale remote monitoring and cardiotoxicity risk prediction."""

__version__ = "0.1.0"
