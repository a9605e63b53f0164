from .truths import TruthStrategies, TruthStrategy, make_truth
from .data_generation import design_points, generate_data, noise_stream
from .config import RiskStudyConfig, load_risk_study_config
from .risk import (
    BiasConstantsFit,
    RateFit,
    RiskStudyResult,
    ScalingFit,
    bias_constants_fit,
    bias_study,
    compare_truth_rates,
    rate_fit,
    risk_study,
    save_bias_study,
    scaling_fit,
    sup_norm_error
)
