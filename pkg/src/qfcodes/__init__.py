"""Cyclic codes from quadratic trace forms over finite fields.

Subpackages: gf (field arithmetic), linpoly (q-linearized polynomials),
quadform (rank/type/sums), klapper (closed-form classification and rank
multiplicities), spectra (weight distributions), curves (Artin-Schreier
point counts and optimality), cli/verify (command line and acceptance grid).
"""

from . import curves, gf, klapper, linpoly, quadform, spectra  # noqa: F401

__version__ = "0.1.0"
