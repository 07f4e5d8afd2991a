"""
Distributions package for the Pythagorean Weibull toolkit.
"""
