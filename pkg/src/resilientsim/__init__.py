"""Resilient control synthesis and closed-loop simulation.

Drive a nonlinear system with bounded inputs to a target state at a fixed
final time while some input channels act adversarially.  The workflow:

>>> import resilientsim as rs
>>> sys_ = rs.build_admire()
>>> approx = rs.linearize_at_origin(sys_, rs.ADMIRE_X0)
>>> report = rs.analyze(sys_, approx, rs.ADMIRE_XTG, t_f=20.0)
>>> schedule = rs.build_schedule(approx, rs.ADMIRE_XTG, 20.0, 0.1,
...                              report.c, report.d_s, n_bar_override=8)
>>> trace = rs.run_closed_loop(sys_, schedule, rs.BangBang(0.01, 0))
"""

from .controller import (
    ControlSchedule,
    alpha,
    build_schedule,
    control_input,
    final_interval_input,
    select_terminal_index,
)
from .errors import (
    CapError,
    ConfigError,
    ConstraintError,
    DegenerateInputError,
    DimensionError,
    DivergenceError,
    DomainError,
    NumericError,
    RankError,
    ResilientSimError,
)
from .feasibility import (
    FeasibilityReport,
    analyze,
    check_conditions,
    compute_constants,
    error_bound,
    feasible_interval,
    h_eval,
    smallest_n1,
    t_star,
    tf_lower_bound,
    validate_tf,
)
from .linalg import inf_norm, right_pseudoinverse
from .partition import (
    HorizonPartition,
    Interval,
    build_partition,
    interval_length,
    partition_time,
)
from .simulator import (
    BangBang,
    CancellationProbe,
    Constant,
    GreedyAdversary,
    NodeError,
    SimulationTrace,
    Sinusoid,
    TraceDiagnostics,
    bound_check_allowance,
    make_strategy,
    rk4_step,
    run_closed_loop,
    sample_uncontrolled,
    verify_trace,
)
from .system import (
    ADMIRE_N_BAR,
    ADMIRE_TF,
    ADMIRE_X0,
    ADMIRE_XTG,
    ControlSystem,
    DriftlessApproximation,
    build_admire,
    check_lipschitz,
    evaluate_dynamics,
    linearize_at_origin,
    load_system,
    system_from_document,
)

__version__ = "0.1.0"
