"""Key borrower detection in weighted directed exposure networks.

The package estimates how much each node of a lending network can hurt the
rest: classical centrality baselines, a pivotality index over critical
borrower groups, and two long-range indices that follow influence chains
either analytically (path enumeration) or by simulating default cascades.
"""

from .centrality import (
    CentralityTable,
    betweenness,
    centrality_table,
    closeness,
    degree_measures,
    eigenvector,
    pagerank,
)
from .groups import (
    CriticalGroup,
    critical_groups,
    is_critical,
    minimal_pivotal_sum,
    pivotal_members,
)
from .kbi import direct_intensity, indirect_intensity, kbi, kbi_for_lender
from .network import (
    Absolute,
    AttributeShare,
    ExposureNetwork,
    OutShareQuota,
    ThresholdPolicy,
    in_strength,
    ingest_edges,
    net_mutual_exposures,
    node_sort_key,
    normalize_by_attribute,
    out_strength,
    read_attributes_csv,
    read_edges_csv,
    threshold,
)
from .paths import (
    EIGHT_LEVEL,
    FIVE_LEVEL,
    GRADE_SCHEMAS,
    GradeSchema,
    InfluenceMatrix,
    RhoPath,
    aggregate_paths,
    best_graded_path,
    influence_matrix,
    load_grade_schema,
    lric_paths_matrix,
    lric_paths_vector,
    path_influence,
    path_score_v,
    simple_paths,
    weighted_vector,
)
from .ranking import Ranking, comparison_matrix, gk_gamma, kendall_tau, rank
from .simulation import (
    CascadeTrace,
    SimulationPlan,
    cascade,
    lric_sim_vector,
    pivotal_initiators,
    share_matrix,
    simulate,
    vector_from_simulation,
)

__version__ = "0.1.0"

__all__ = [
    "Absolute",
    "AttributeShare",
    "CascadeTrace",
    "CentralityTable",
    "CriticalGroup",
    "EIGHT_LEVEL",
    "ExposureNetwork",
    "FIVE_LEVEL",
    "GRADE_SCHEMAS",
    "GradeSchema",
    "InfluenceMatrix",
    "OutShareQuota",
    "Ranking",
    "RhoPath",
    "SimulationPlan",
    "ThresholdPolicy",
    "aggregate_paths",
    "best_graded_path",
    "betweenness",
    "cascade",
    "centrality_table",
    "closeness",
    "comparison_matrix",
    "critical_groups",
    "degree_measures",
    "direct_intensity",
    "eigenvector",
    "gk_gamma",
    "in_strength",
    "indirect_intensity",
    "influence_matrix",
    "ingest_edges",
    "is_critical",
    "kbi",
    "kbi_for_lender",
    "kendall_tau",
    "load_grade_schema",
    "lric_paths_matrix",
    "lric_paths_vector",
    "lric_sim_vector",
    "minimal_pivotal_sum",
    "net_mutual_exposures",
    "node_sort_key",
    "normalize_by_attribute",
    "out_strength",
    "pagerank",
    "path_influence",
    "path_score_v",
    "pivotal_initiators",
    "pivotal_members",
    "rank",
    "read_attributes_csv",
    "read_edges_csv",
    "share_matrix",
    "simple_paths",
    "simulate",
    "threshold",
    "vector_from_simulation",
    "weighted_vector",
]
