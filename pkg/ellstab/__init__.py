"""Elliptic stable envelopes, R-matrices and vertex functions with numerical verification."""
