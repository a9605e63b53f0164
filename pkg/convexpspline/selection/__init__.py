from .selection_structure import SelectionBlock, SelectionStructure, build_selection
from .structure_report import StructureReport, dominance_margins, selection_function_matrix, structure_report
from .lipschitz_scan import (
    AlphaSampler,
    LipschitzScanResult,
    count_structure_violations,
    empirical_lipschitz_ratio,
    lipschitz_scan,
    probe_dominance_threshold,
    structure_scan,
    summarize_scan
)
