"""Piecewise-constant control synthesis over the geometric partition.

Interval n applies the constant input

    u_n = -(1 / dt_n) * g0c_pinv @ ((x_{n-1} - x_tg) + g0uc @ alpha_n)

where ``x_{n-1}`` is the state measured at the interval start,
``alpha_n = 2**-n * ones(p)`` pre-compensates the worst-case running mean of
the uncontrolled input, and ``dt_n = t_f / 2**n``.  The terminal index
``n_bar = n1 + 1`` is the smallest depth whose merged tail
``[t_{n_bar - 1}, t_f]`` is no longer than ``dt_{n1}``, the interval length
at which the a-priori error bound first drops below the target radius
epsilon.

Note on the merged tail: the final input is held over ``[t_{n_bar-1}, t_f]``,
twice the length of an unmerged interval at that depth, so it is formed as a
single depth-``n_bar - 1`` correction — divisor ``t_f / 2**(n_bar - 1)`` (the
actual remaining time) and compensation ``alpha_{n_bar - 1}``.  Reusing the
unmerged divisor ``dt_{n_bar}`` would apply a double-strength correction
across the doubled span, which overshoots the target radius when the
uncontrolled input's mean flips sign after ``t_{n_bar - 1}``; dividing by the
true span keeps the terminal guarantee and still nulls a constant
uncontrolled input ``ones(p) / t_f`` exactly at ``t_f``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import CapError, DomainError
from .linalg import as_vector
from .partition import MAX_DEPTH, HorizonPartition, build_partition, interval_length
from .feasibility import smallest_n1
from .system import DriftlessApproximation


def alpha(n, p):
    """Pre-compensation vector for interval n: all entries 2**-n."""
    if n < 1:
        raise DomainError(f"interval index must be >= 1, got {n}")
    if p < 1:
        raise DomainError(f"channel count must be >= 1, got {p}")
    return np.full(p, 0.5 ** n)


def control_input(n, x_prev, x_tg, approx, dt_n):
    """Constant input for interval n given the state at its start.

    No clipping: admissibility is what the feasibility conditions certify,
    and violations are surfaced as diagnostics rather than silently
    saturated away.
    """
    if dt_n <= 0.0:
        raise DomainError(f"interval length must be positive, got {dt_n}")
    d = approx.g0c_pinv.shape[1]
    x_prev = as_vector(x_prev, dim=d, name="x_prev")
    x_tg = as_vector(x_tg, dim=d, name="x_tg")
    p = approx.g0uc.shape[1]
    shifted = (x_prev - x_tg) + approx.g0uc @ alpha(n, p)
    return -(1.0 / dt_n) * (approx.g0c_pinv @ shifted)


def final_interval_input(n_bar, x_prev, x_tg, approx, t_f):
    """Input held over the merged tail [t_{n_bar-1}, t_f].

    The tail spans two unmerged intervals, so the correction is computed at
    depth n_bar - 1: it divides by the actual remaining time t_f/2**(n_bar-1)
    and compensates with alpha_{n_bar-1}.  Keeping the unmerged divisor
    dt_{n_bar} would double the feedback gain over the doubled span and can
    leave x(t_f) outside the target radius when the uncontrolled mean flips
    sign after t_{n_bar-1}.
    """
    if n_bar < 1:
        raise DomainError(f"terminal index must be >= 1, got {n_bar}")
    if n_bar == 1:
        # Single-interval schedule: the tail is the whole horizon and the
        # compensation exponent drops to zero.
        if t_f <= 0.0:
            raise DomainError(f"horizon must be positive, got {t_f}")
        d = approx.g0c_pinv.shape[1]
        x_prev = as_vector(x_prev, dim=d, name="x_prev")
        x_tg = as_vector(x_tg, dim=d, name="x_tg")
        p = approx.g0uc.shape[1]
        shifted = (x_prev - x_tg) + approx.g0uc @ np.ones(p)
        return -(1.0 / t_f) * (approx.g0c_pinv @ shifted)
    return control_input(
        n_bar - 1, x_prev, x_tg, approx, interval_length(t_f, n_bar - 1)
    )


def select_terminal_index(epsilon, c, d_s, t_f):
    """(n1, n_bar): first bound index under epsilon, plus one.

    n_bar = n1 + 1 is minimal: the merged tail has length t_f / 2**(n_bar-1),
    so the requirement tail <= dt_{n1} forces n_bar >= n1 + 1.
    """
    n1 = smallest_n1(epsilon, c, d_s, t_f)
    n_bar = n1 + 1
    if n_bar > MAX_DEPTH:
        raise CapError(
            f"terminal index {n_bar} exceeds the partition cap {MAX_DEPTH}"
        )
    return n1, n_bar


@dataclass
class ControlSchedule:
    """Partition, compensation sequence and (once run) the applied inputs.

    `inputs` starts empty and is appended to by the closed-loop driver, one
    constant vector per interval — single writer, then treat as immutable.
    """

    partition: HorizonPartition
    alpha_seq: list
    n1: int
    n_bar: int
    epsilon: float
    x_tg: np.ndarray
    approx: DriftlessApproximation
    inputs: list = field(default_factory=list)

    @property
    def t_f(self):
        return self.partition.t_f

    def to_rows(self):
        """Per-interval dicts {n, t_start, t_end, u_c} for serialization."""
        rows = []
        for iv, u in zip(self.partition.intervals, self.inputs):
            rows.append(
                {
                    "n": iv.n,
                    "t_start": iv.t_start,
                    "t_end": iv.t_end,
                    "u_c": [float(v) for v in u],
                }
            )
        return rows


def build_schedule(approx, x_tg, t_f, epsilon, c, d_s, n_bar_override=None):
    """Assemble the schedule skeleton (inputs are filled by the simulator).

    Without an override, the depth comes from `select_terminal_index`; an
    explicit `n_bar_override` keeps epsilon as the reporting target and sets
    n1 = n_bar - 1.
    """
    if epsilon <= 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if n_bar_override is not None:
        if n_bar_override < 1:
            raise DomainError(f"n_bar override must be >= 1, got {n_bar_override}")
        if n_bar_override > MAX_DEPTH:
            raise CapError(
                f"n_bar override {n_bar_override} exceeds the partition cap {MAX_DEPTH}"
            )
        n_bar = int(n_bar_override)
        n1 = max(n_bar - 1, 1)
    else:
        n1, n_bar = select_terminal_index(epsilon, c, d_s, t_f)
    part = build_partition(t_f, n_bar)
    p = approx.g0uc.shape[1]
    return ControlSchedule(
        partition=part,
        alpha_seq=[alpha(n, p) for n in range(1, n_bar + 1)],
        n1=n1,
        n_bar=n_bar,
        epsilon=float(epsilon),
        x_tg=as_vector(x_tg, dim=approx.x0.size, name="x_tg"),
        approx=approx,
    )
