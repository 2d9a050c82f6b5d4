"""A shell whose command lines are typed lambda-calculus expressions."""

__version__ = "0.1.0"
