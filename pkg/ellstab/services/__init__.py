"""Numerical service modules: special functions, envelopes, R-matrices, vertex functions and suites."""
