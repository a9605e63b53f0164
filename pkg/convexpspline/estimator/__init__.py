from .tuning import TuningRule, choose_tuning, simulation_sample_size
from .convex_pspline import (
    FitConfig,
    FitResult,
    fit,
    fit_design,
    interpolation_bias,
    noise_free_fit,
    predict,
    read_xy_csv
)
