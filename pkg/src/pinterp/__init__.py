"""Projection-based p-interpolation on the reference triangle and square."""

from .approx1d import (ChebyshevExpansion, approx_endpoint_matched, chebyshev_project,
                       endpoint_correctors)
from .extension import BoundaryTrace, discrete_harmonic_extend
from .geometry import RefElement, make_reference_element
from .interpolation import (BoundaryPotential, CurlInterpolantParts, H1InterpolantParts,
                            boundary_potential, pi0, pi1, picurl, pidiv, whitney_interpolant)
from .poincare import SmoothingKernel, apply_A, apply_R, default_kernel, regular_decompose
from .quadrature import (QuadConfig, QuadRule, edge_graded_rule, element_rule,
                         graded_interval_rule, interval_rule, vertex_graded_rule)
from .sobolev import (FractionalGram, OracleEdgeSpace, build_oracle_space, element_norms,
                      fractional_norm, gagliardo_htilde_half)
from .spaces import (ScalarSpace, VectorSpace, build_scalar_space, build_vector_space,
                     differential_matrix, whitney_basis)

__all__ = [
    "BoundaryPotential", "BoundaryTrace", "ChebyshevExpansion", "CurlInterpolantParts",
    "FractionalGram", "H1InterpolantParts", "OracleEdgeSpace", "QuadConfig", "QuadRule",
    "RefElement", "ScalarSpace", "SmoothingKernel", "VectorSpace", "apply_A", "apply_R",
    "approx_endpoint_matched", "boundary_potential", "build_oracle_space",
    "build_scalar_space", "build_vector_space", "chebyshev_project", "default_kernel",
    "differential_matrix", "discrete_harmonic_extend", "edge_graded_rule", "element_norms",
    "element_rule", "endpoint_correctors", "fractional_norm", "gagliardo_htilde_half",
    "graded_interval_rule", "interval_rule", "make_reference_element", "pi0", "pi1",
    "picurl", "pidiv", "regular_decompose", "vertex_graded_rule", "whitney_basis",
    "whitney_interpolant",
]
