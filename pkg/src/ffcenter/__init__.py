"""Exact certification toolkit for the center of affine vertex algebras in
types B, C, D: Brauer-algebra symmetrizers, Segal-Sugawara vectors, Gaudin
and shift-of-argument subalgebras, and Yangian Bethe subalgebras."""

__version__ = "0.1.0"
