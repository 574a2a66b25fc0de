"""waug: a workbench for weighted l1 algebras on finitely generated
groups and monoids.

Everything is exact: coefficients and weight values are rationals, and
any quantity that cannot be represented exactly (roots, huge powers) is
carried as a certified two-sided enclosure.
"""

__version__ = "0.1.0"
