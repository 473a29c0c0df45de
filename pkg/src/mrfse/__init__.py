"""Structure estimation for discrete Markov random fields.

Neighborhoods are chosen by maximizing a penalized pseudo-likelihood over
all candidate conditioning sets; per-vertex neighborhoods are combined into
a graph with the AND (conservative) or OR (non-conservative) rule.
"""

__version__ = "0.1.0"

from .counting import CountTable, build_counts, empirical_conditional
from .data import (
    Alphabet,
    Configuration,
    Sample,
    VertexSet,
    binarize_series,
    load_price_series,
    load_sample,
    save_sample,
    thin_sample,
)
from .diagnostics import BoundCheck, check_deviation_bound, deviation_bound
from .errors import (
    ArgumentError,
    CapacityError,
    FormatError,
    InsufficientDataError,
    MRFError,
    UndefinedConditionalError,
)
from .estimation import GraphEstimate, NeighborhoodEstimate, estimate_graph, estimate_neighborhood
from .scoring import PenalizedScore, chi_square_bound, kl_divergence, log_pseudo_likelihood, penalized_score
from .selection import CVResult, cross_validate_c
from .simulation import (
    ErrorReport,
    FactorizedModel,
    TrueGraph,
    builtin_model,
    error_metrics,
    exact_conditional,
    load_model,
    sample_model,
    save_model,
    theorem_constants,
    true_graph,
)
