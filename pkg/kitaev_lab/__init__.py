"""Cost analysis, optimization and Monte Carlo validation of generalized Kitaev phase estimation."""

__version__ = "0.1.0"
