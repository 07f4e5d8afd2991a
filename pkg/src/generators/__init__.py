"""
Generators package for the Pythagorean Weibull toolkit.

This package draws synthetic seasons and Monte Carlo game samples from
Weibull run distributions.
"""
