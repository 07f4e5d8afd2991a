"""
Utilities package for the Pythagorean Weibull toolkit.

This package contains the error hierarchy and logging setup shared by
every layer.
"""
