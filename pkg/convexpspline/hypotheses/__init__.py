from .piecewise import Piece, PiecewisePolyFn, SupNorm
from .family import FamilyParams, HypothesisFamily, build_derivative, build_family, family_for_sample_size, theorem_scale
from .verifiers import (
    HolderReport,
    c3_threshold,
    closed_form_integral,
    convexity_check,
    export_family_csv,
    kl_bound,
    kl_divergence,
    mean_kl_divergence,
    quadrature_integral,
    separation,
    separation_location,
    verify_family,
    verify_holder
)
