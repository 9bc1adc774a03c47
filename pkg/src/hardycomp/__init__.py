"""Composition operators on Hardy spaces of products of balls.

Galerkin compressions, approximation numbers, and computable bounds.
"""

from hardycomp.certificates import compute_bounds
from hardycomp.decayfit import gamma_estimate, stretch_exponent_fit
from hardycomp.galerkin import approx_numbers, assemble, hs_norm_sq, unboundedness_witness
from hardycomp.hardy import DomainSpec
from hardycomp.symbols import (
    Compose,
    DiagonalLinear,
    Duplicate,
    Identity,
    Lens,
    Linear,
    MoebiusConjugate,
    Scale,
    from_spec,
)

__version__ = "0.1.0"
