"""
Analysis package for the Pythagorean Weibull toolkit.
"""
