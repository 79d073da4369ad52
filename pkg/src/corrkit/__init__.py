"""Finite, exact-arithmetic workbench for correspondence categories.

Everything in this package is decidable: categories are explicit finite
tables, coefficient values live in finite lattices, and every law is
checked by exhaustive enumeration with a concrete witness on failure.
"""

__version__ = "0.1.0"
