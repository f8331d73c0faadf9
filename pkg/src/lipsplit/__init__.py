"""Minimax-optimal global optimization of Lipschitz functions.

Best-first bisection of a wrapped hyper-rectangle with predetermined query
points and certified lower-bound scores, plus baselines, regret metrics, the
analytic bound evaluators, and an independent validation harness.
"""

from .baselines import GridSpec, grid_search, random_search
from .errors import QueueExhausted
from .geometry import (
    Box,
    EdgeVector,
    Point,
    box_volume,
    edge_norm,
    project,
    split,
    wrap_domain,
)
from .objectives import (
    OBJECTIVES,
    Objective,
    adversarial_spike,
    cone,
    parse_objective,
    random_multicone,
    separable_sine,
    suite,
)
from .optimizer import HAVE_COMPILED_CORE, Candidate, OptimizerState, run
from .regret import (
    RegretReport,
    average_regret,
    check_sample_bounds,
    cumulative_regret,
    cumulative_regret_bound,
    fit_rate,
    rate_bound_factor,
    simple_regret,
    worstcase_edge_sum,
)
from .trace import QueryRecord, RunTrace, write_trace_csv, write_trace_json
from .validation import (
    full_audit,
    partition_audit,
    reference_run,
    region_min_oracle,
    score_audit,
    traces_equal,
)

__version__ = "0.1.0"

__all__ = [
    "Box",
    "Candidate",
    "EdgeVector",
    "GridSpec",
    "HAVE_COMPILED_CORE",
    "OBJECTIVES",
    "Objective",
    "OptimizerState",
    "Point",
    "QueryRecord",
    "QueueExhausted",
    "RegretReport",
    "RunTrace",
    "adversarial_spike",
    "average_regret",
    "box_volume",
    "check_sample_bounds",
    "cone",
    "cumulative_regret",
    "cumulative_regret_bound",
    "edge_norm",
    "fit_rate",
    "full_audit",
    "grid_search",
    "parse_objective",
    "partition_audit",
    "project",
    "random_multicone",
    "random_search",
    "rate_bound_factor",
    "reference_run",
    "region_min_oracle",
    "run",
    "score_audit",
    "separable_sine",
    "simple_regret",
    "split",
    "suite",
    "traces_equal",
    "worstcase_edge_sum",
    "wrap_domain",
    "write_trace_csv",
    "write_trace_json",
    "__version__",
]
