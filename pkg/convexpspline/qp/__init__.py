from .problem import (
    KKTResiduals,
    QPProblem,
    QPSolution,
    certify,
    equality_solution,
    free_nodes,
    kkt_report,
    objective,
    selection_matrix
)
from .base_solver import QPSolver
from .active_set import ActiveSetSolver, solve
from .enumeration import EnumerationSolver, brute_force_solve
from .solver_strategy import QPSolverStrategies
