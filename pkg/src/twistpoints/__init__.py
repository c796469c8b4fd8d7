"""Integral points on the congruent number twists y^2 = x^3 - D^2 x.

Exact arithmetic for the twists E_D, binary quartic forms attached to their
integral points, 2-descent quadruples, and desk-scale scans over squarefree D.
"""
__version__ = "0.1.0"
