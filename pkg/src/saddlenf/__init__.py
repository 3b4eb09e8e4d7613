"""Finite-order analytic normal forms of planar saddle families."""
