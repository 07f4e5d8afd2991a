"""
Formatters package for the Pythagorean Weibull toolkit.

This package renders fits, test batteries and simulation reports as
terminal tables and delimited files.
"""
