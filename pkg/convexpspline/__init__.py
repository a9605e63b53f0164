import logging

from .design import DesignSystem, KnotGrid, build_design, build_knots
from .estimator import FitConfig, FitResult, choose_tuning, fit, predict
from .hypotheses import FamilyParams, HypothesisFamily, build_family, verify_family
from .qp import QPProblem, QPSolution, QPSolverStrategies
from .simulation import RiskStudyConfig, RiskStudyResult, generate_data, rate_fit, risk_study
from .utils import ConvexPSplineError

stream_handler = logging.StreamHandler()
stream_handler.setLevel(logging.WARNING)
logging.getLogger(__name__).addHandler(stream_handler)

__author__ = "Convex P-spline contributors"
__version__ = "0.1.0"
__copyright__ = "Copyright 2026, Convex P-spline contributors"
__credits__ = ["Convex P-spline contributors"]
__license__ = "Apache License 2.0"
__status__ = "Development"
