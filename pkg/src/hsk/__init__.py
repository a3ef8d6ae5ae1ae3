"""hsk: spectral data of periodic Higgs fields on an elliptic curve.

Modules
-------
elliptic_core     Weierstrass functions, lattice arithmetic, argument-principle zero counts
higgs_model       meromorphic Higgs fields with simple poles at ±ξ₀
spectral_curve    the curve det(w − Φ(ξ)) = 0, branch data, genus, symmetry
rational_map      the degree-k map R with ℘(ξ) = R(w) and its inversion
flat_dirac        flat-model Green operator, K₀ kernel, Weitzenböck identity
cohomology_ring   exact characteristic-class arithmetic
hitchin_check     residuals of the Hitchin equations on punctured grids
cli               command-line front end (``hsk`` / ``python3 -m hsk``)
"""

__version__ = "0.1.0"
