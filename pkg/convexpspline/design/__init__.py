from .knots import KnotGrid, basis_matrix, build_knots, eval_basis, evaluate_spline
from .design_system import (
    DesignSystem,
    beta_constant_scan,
    build_design,
    difference_matrix,
    gamma_min_eigenvalue,
    penalty_banded
)
