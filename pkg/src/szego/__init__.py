"""Schur parameters, nonstationary orthogonal polynomials and Szego-type limits for positive definite kernels."""
from .asymptotics import (LimitReport, angle_det, angle_det_product, det_ratio, determinant_from_field,
                          first_limit, straddle_product, strong_limit)
from .classical import (HankelSpec, ToeplitzSpec, canonical_moment_vector, hankel_kernel, hilbert_det_formula,
                        hilbert_gamma, hilbert_gamma_field, hilbert_kernel, legendre_recurrence,
                        three_term_polys, toeplitz_gamma, toeplitz_kernel)
from .free_semigroup import (NCSeries, TreeGammaField, Word, nc_invert, nc_limits, nc_multiply, nc_polys,
                             phi2_embed, stationary_kernel, words_up_to)
from .kernel import (DeterminantTable, KernelError, MomentKernel, determinant, determinant_table,
                     szego_class_report, validate_kernel)
from .polys import (PolyTable, build_polys, derivative, orthonormal_table, phi_sharp_at_zero,
                    poly_by_determinant, recover_gamma)
from .schur import (GammaField, LatticeTerm, catalan, extract_gamma, lattice_expand, reconstruct_moments,
                    rotation_product)
from .triangular import (TriangularArray, convergence_report, embed_phi, invert, multiply,
                         spectral_factor)

__version__ = "0.1.0"

__all__ = [
    "angle_det", "angle_det_product", "build_polys", "canonical_moment_vector", "catalan",
    "convergence_report", "derivative", "det_ratio", "determinant", "determinant_from_field",
    "determinant_table", "DeterminantTable", "embed_phi", "extract_gamma", "first_limit", "GammaField",
    "hankel_kernel", "HankelSpec", "hilbert_det_formula", "hilbert_gamma", "hilbert_gamma_field",
    "hilbert_kernel", "invert", "KernelError", "lattice_expand", "LatticeTerm", "legendre_recurrence",
    "LimitReport", "MomentKernel", "multiply", "nc_invert", "nc_limits", "nc_multiply", "nc_polys",
    "NCSeries", "orthonormal_table", "phi2_embed", "phi_sharp_at_zero", "poly_by_determinant", "PolyTable",
    "reconstruct_moments", "recover_gamma", "rotation_product", "spectral_factor", "stationary_kernel",
    "straddle_product", "strong_limit", "szego_class_report", "three_term_polys", "toeplitz_gamma",
    "toeplitz_kernel", "ToeplitzSpec", "TreeGammaField", "TriangularArray", "validate_kernel", "Word",
    "words_up_to",
]
