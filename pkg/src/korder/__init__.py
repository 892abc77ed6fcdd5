"""LP-rounding approximations for k-ordering, offset-constrained labeling and DAG edge deletion."""
from .graph import Edge, WeightedDigraph
from .maxk import build_maxk_lp, derandomize, round_ordering, solve_maxk_lp
from .rmas import RmasInstance, round_offset_labels, solve_rmas_lp
from .ded import local_ratio, solve_ded_lp, threshold_round
from .instances import parse, emit

__all__ = ["Edge", "WeightedDigraph", "build_maxk_lp", "solve_maxk_lp", "round_ordering", "derandomize",
           "RmasInstance", "solve_rmas_lp", "round_offset_labels", "local_ratio", "solve_ded_lp", "threshold_round",
           "parse", "emit"]
__version__ = "0.1.0"
