"""Decomposition-based quantum correlation coefficients, positive-map
tools and intertwiner constructions for small bipartite systems."""

from .bipartite import (
    BipartiteSpace,
    BipartiteState,
    expect,
    make_bell,
    make_product,
    make_random_state,
    make_werner,
    restrict_first,
    restrict_second,
)
from .correlation import (
    CorrelationResult,
    OptimizerConfig,
    VerdictResult,
    d0_objective,
    minimize_d0,
    minimize_d_simple,
    separability_verdict,
)
from .gns import (
    GnsRepresentation,
    LocalDecomposition,
    build_intertwiner_single,
    build_intertwiner_doubled,
    gns_left,
    gns_right,
)
from .linalg import hermitian_eigendecompose, kron, operator_norm, psd_sqrt
from .measures import (
    Ensemble,
    ProductEnsemble,
    boxtimes,
    boxtimes_barycenter,
    evaluate_boxtimes,
    hjw_ensemble,
)
from .posmaps import (
    PositiveMapSpec,
    apply_map,
    apply_tensor_id,
    builtin_maps,
    is_positive_map,
    kadison_defect,
    partial_transpose,
    ppt_min_eigenvalue,
)

__version__ = "0.1.0"

__all__ = [
    "BipartiteSpace", "BipartiteState", "expect", "make_bell", "make_product",
    "make_random_state", "make_werner", "restrict_first", "restrict_second",
    "CorrelationResult", "OptimizerConfig", "VerdictResult", "d0_objective",
    "minimize_d0", "minimize_d_simple", "separability_verdict",
    "GnsRepresentation", "LocalDecomposition", "build_intertwiner_single", "build_intertwiner_doubled",
    "gns_left", "gns_right",
    "hermitian_eigendecompose", "kron", "operator_norm", "psd_sqrt",
    "Ensemble", "ProductEnsemble", "boxtimes", "boxtimes_barycenter",
    "evaluate_boxtimes", "hjw_ensemble",
    "PositiveMapSpec", "apply_map", "apply_tensor_id", "builtin_maps",
    "is_positive_map", "kadison_defect", "partial_transpose", "ppt_min_eigenvalue",
    "__version__",
]
