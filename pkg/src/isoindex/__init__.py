"""Isotropy indices of skew-symmetric bilinear maps and of manifold cup products."""

from __future__ import annotations

from .exactalg import Matrix, RingError, RingSpec, kernel_basis, rank_one_match, rref, tensor_pair
from .kernels import BudgetExceeded
from .skewmap import (
    AntisymmetryError,
    Bounds,
    IsotropyReport,
    NotIsotropicError,
    RankSet,
    RankSetUnavailable,
    SkewBilinearMap,
    Subspace,
    bounds,
    direct_sum,
    enumerate_maximal_isotropic,
    evaluate,
    extend_scalars,
    greedy_maximal,
    is_isotropic,
    is_maximal_isotropic,
    isotropy_index,
    kernel,
    orthogonal,
    product_map,
    rank_set,
    rank_set_product_law,
    rank_set_sum_law,
)

__version__ = "0.1.0"
