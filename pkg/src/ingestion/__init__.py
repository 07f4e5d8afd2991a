"""
Ingestion package for the Pythagorean Weibull toolkit.
"""
