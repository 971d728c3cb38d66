"""Exact parameterized solvers over universal sets and representative families."""

__version__ = "0.1.0"
