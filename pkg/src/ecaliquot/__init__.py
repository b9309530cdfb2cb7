"""Aliquot cycles and amicable pairs on reductions of elliptic curves.

A library and command line tool for searching amicable pairs and
aliquot cycles of elliptic curves over Q, for the CM trace dichotomy
that constrains them, for the sextic-residue density analysis of the
j = 0 family y^2 = x^3 + k, and for constructing curves that realize
aliquot cycles of any prescribed length.
"""

__version__ = "0.1.0"
