from .exceptions import (
    CertificateError,
    ConfigError,
    ConvexPSplineError,
    DegenerateDesignError,
    FamilyTooSmallError,
    InsufficientDataError,
    InvalidArgumentError,
    NumericalBreakdownError,
    OracleInconsistencyError,
    SampleTooSmallError,
    SolverError,
    SolverStalledError,
    StudyInvalidError
)
from .tools import as_index_set, check_authorization_of_file_creation, is_path_valid, save_json, to_builtin
