"""Algebra-aware lower bounds on quantum control time."""
from .bch import bch_M, build_f_table, build_g_h_tables, check_norm_inequality, delta_constants
from .bounds import (
    BoundReport,
    lee_refined_bound,
    ml_state_bound,
    mt_choi_bound,
    mt_state_bound,
    nielsen_metric_check,
    poggi_bound,
    t_star_bound,
)
from .lie import AlgebraBasis, closure, project
from .metric import BranchSearchConfig, DistanceResult, conjugation_invariance_check, distance, verify_metric_axioms
from .numerics import (
    Tolerances,
    ad_operator_norm,
    commutator,
    dev,
    frobenius_norm,
    mat_exp,
    operator_norm,
    principal_log_unitary,
)
from .schedule import ControlSchedule, propagate
from .synthesis import SynthesisConfig, small_time_log, synthesize_pair, synthesize_schedule

__version__ = "0.1.0"
