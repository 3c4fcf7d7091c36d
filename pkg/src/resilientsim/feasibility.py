"""Feasibility analysis for the synthesized control sequence.

Everything here is scalar arithmetic on four constants derived from the
system at its initial state:

* ``c``   — growth constant ``|f(x0)| + |g0uc| + D_S |x_tg - x0|`` (max norms);
* ``c1``  — ``4 c |g0c_pinv|``;
* ``c2``  — ``4 D_S |g0c_pinv| |g0uc| * (1/4)`` (the ``1/4`` is the max norm
  of the second pre-compensation vector in the geometric sequence);
* ``D_S`` — combined Lipschitz constant of drift and input maps.

The horizon check works through ``h(t) = exp(t D_S / 2) - 1 - (t D_S - c2)/c1``:
the control sequence respects the unit input ball whenever ``h(t_f) <= 0``,
which happens on an interval ``[t_lo, t_hi]`` around the minimizer
``t_star = (2 / D_S) ln(2 / c1)`` provided ``c1 < 2`` and
``c2 < c1 - 2 (1 - ln(2 / c1))``.  A separate lower bound
``t_f >= 2 |g0c_pinv| (|x0 - x_tg| + |g0uc| / 2)`` keeps the very first
interval's input admissible.

The a-priori node error bound is ``ebar(n) = (c / D_S) (exp(dt_n D_S) - 1)``
with ``dt_n = t_f / 2**n``; it at least halves from each n to the next.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import CapError, DegenerateInputError, DomainError, NumericError
from .linalg import inf_norm
from .partition import MAX_DEPTH, interval_length

DEFAULT_ROOT_TOL = 1e-10

#: Doubling attempts allowed when bracketing the upper root of h.
_MAX_DOUBLINGS = 200


@dataclass(frozen=True)
class FeasibilityReport:
    """All feasibility scalars plus advisory validity of a queried horizon.

    `feasible_interval` and `t_star` are None when the sufficient
    conditions fail (or degenerate constants make h undefined).  `tf_valid`
    is advisory: a False value warns that the input-constraint guarantee is
    not established, it does not forbid running the loop.
    """

    c: float
    c1: float
    c2: float
    d_s: float
    conditions_hold: bool
    t_star: Optional[float] = None
    feasible_interval: Optional[tuple] = None
    tf_lower_bound: float = 0.0
    t_f: Optional[float] = None
    tf_valid: bool = False
    notes: tuple = field(default_factory=tuple)

    def to_dict(self):
        return {
            "c": self.c,
            "c1": self.c1,
            "c2": self.c2,
            "D_S": self.d_s,
            "conditions_hold": self.conditions_hold,
            "t_star": self.t_star,
            "feasible_interval": list(self.feasible_interval)
            if self.feasible_interval is not None
            else None,
            "tf_lower_bound": self.tf_lower_bound,
            "t_f": self.t_f,
            "tf_valid": self.tf_valid,
            "notes": list(self.notes),
        }


def compute_constants(sys, approx, x_tg):
    """The four scalars (c, c1, c2, D_S) driving every bound."""
    d_s = sys.lipschitz_sum
    guc_norm = inf_norm(approx.g0uc)
    pinv_norm = inf_norm(approx.g0c_pinv)
    c = float(
        inf_norm(sys.drift(approx.x0)) + guc_norm + d_s * inf_norm(x_tg - approx.x0)
    )
    c1 = 4.0 * c * pinv_norm
    c2 = 4.0 * d_s * pinv_norm * guc_norm * 0.25
    return c, c1, c2, d_s


def check_conditions(c1, c2):
    """True iff c1 < 2 and c2 < c1 - 2(1 - ln(2/c1)), both strictly."""
    if c1 < 0.0 or c2 < 0.0:
        raise DomainError(f"constants must be >= 0, got c1={c1}, c2={c2}")
    if c1 >= 2.0:
        return False
    if c1 == 0.0:
        # Limit c1 -> 0+: the right-hand side grows without bound.
        return True
    return c2 < c1 - 2.0 * (1.0 - math.log(2.0 / c1))


def h_eval(t, c1, c2, d_s):
    """h(t) = exp(t D_S / 2) - 1 - (t D_S - c2) / c1."""
    if c1 <= 0.0 or d_s <= 0.0:
        raise DegenerateInputError(
            f"h(t) needs c1 > 0 and D_S > 0, got c1={c1}, D_S={d_s}"
        )
    if t < 0.0:
        raise DomainError(f"h(t) defined for t >= 0, got t={t}")
    return math.exp(t * d_s / 2.0) - 1.0 - (t * d_s - c2) / c1


def t_star(c1, d_s):
    """Minimizer of h: (2 / D_S) ln(2 / c1).  Positive iff c1 < 2."""
    if c1 <= 0.0 or d_s <= 0.0:
        raise DegenerateInputError(
            f"t_star needs c1 > 0 and D_S > 0, got c1={c1}, D_S={d_s}"
        )
    return (2.0 / d_s) * math.log(2.0 / c1)


def _bisect_root(fn, lo, hi, root_tol):
    """Root of a continuous fn with a sign change on [lo, hi].

    Plain bisection; returns once |fn(mid)| <= root_tol.  The callers'
    functions are strictly monotone on the bracket, so the residual
    shrinks with the bracket and the tolerance is always reachable.
    """
    f_lo = fn(lo)
    if abs(f_lo) <= root_tol:
        return lo
    f_hi = fn(hi)
    if abs(f_hi) <= root_tol:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise NumericError(f"no sign change on bracket [{lo}, {hi}]")
    for _ in range(4000):
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if abs(f_mid) <= root_tol:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if hi - lo <= 0.0:
            return mid
    raise NumericError(f"bisection did not reach |h| <= {root_tol}")


def feasible_interval(c1, c2, d_s, root_tol=DEFAULT_ROOT_TOL):
    """The window [t_lo, t_hi] of horizons with h <= 0, or None.

    Returns None exactly when `check_conditions` fails.  Roots are located
    by bisection: the lower root on [0, t_star] (h falls through zero) and
    the upper root on [t_star, T] with T found by doubling until h > 0.
    """
    if d_s <= 0.0:
        raise DegenerateInputError(f"feasible_interval needs D_S > 0, got {d_s}")
    if not check_conditions(c1, c2):
        return None
    if c1 == 0.0:
        raise DegenerateInputError("feasible_interval undefined for c1 = 0")
    ts = t_star(c1, d_s)

    def h(t):
        return h_eval(t, c1, c2, d_s)

    t_lo = _bisect_root(h, 0.0, ts, root_tol)
    hi = ts if ts > 0.0 else 1.0
    for _ in range(_MAX_DOUBLINGS):
        hi *= 2.0
        if h(hi) > 0.0:
            break
    else:
        raise NumericError(
            f"could not bracket the upper root of h after {_MAX_DOUBLINGS} doublings"
        )
    t_hi = _bisect_root(h, ts, hi, root_tol)
    return (t_lo, t_hi)


def tf_lower_bound(approx, x0, x_tg):
    """2 |g0c_pinv| (|x0 - x_tg| + |g0uc| / 2), all max norms."""
    return float(
        2.0
        * inf_norm(approx.g0c_pinv)
        * (inf_norm(x0 - x_tg) + 0.5 * inf_norm(approx.g0uc))
    )


def error_bound(n, c, d_s, t_f):
    """A-priori bound on the node-n error: (c/D_S)(exp(dt_n D_S) - 1).

    Continuous extension c * dt_n at D_S = 0.
    """
    if n < 1:
        raise DomainError(f"bound index must be >= 1, got {n}")
    if c < 0.0 or d_s < 0.0:
        raise DomainError(f"constants must be >= 0, got c={c}, D_S={d_s}")
    dt_n = interval_length(t_f, n)
    if d_s == 0.0:
        return c * dt_n
    try:
        growth = math.expm1(dt_n * d_s)
    except OverflowError:
        # dt_n * d_s beyond float range: an infinite bound is the honest
        # answer, and lets depth selection keep halving toward finite ones.
        return math.inf if c > 0.0 else 0.0
    return (c / d_s) * growth


def smallest_n1(epsilon, c, d_s, t_f):
    """Minimal n with error_bound(n) <= epsilon (cap error past depth 50)."""
    if epsilon <= 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    for n in range(1, MAX_DEPTH + 1):
        if error_bound(n, c, d_s, t_f) <= epsilon:
            return n
    raise CapError(
        f"no n <= {MAX_DEPTH} achieves bound <= {epsilon}; "
        "relax epsilon or shorten the horizon"
    )


def validate_tf(t_f, report):
    """Complete a report with the advisory verdict for one queried t_f.

    tf_valid requires all of: t_f at or above the lower bound, the
    sufficient conditions holding, and t_f inside the feasible window.
    Failures are explained in notes; none of them blocks simulation.
    """
    if t_f <= 0.0:
        raise DomainError(f"horizon must be positive, got t_f={t_f}")
    notes = list(report.notes)
    above_lower = t_f >= report.tf_lower_bound
    if not above_lower:
        notes.append(
            f"t_f={t_f} is below the first-interval lower bound "
            f"{report.tf_lower_bound}"
        )
    if not report.conditions_hold:
        if report.d_s > 0.0:
            notes.append(
                "sufficient conditions on (c1, c2) are violated; no feasible "
                "window for t_f exists and input bounds are not guaranteed"
            )
        in_window = False
    elif report.feasible_interval is None:
        # Degenerate c1 = 0: h is undefined but no horizon constraint binds.
        in_window = True
    else:
        t_lo, t_hi = report.feasible_interval
        in_window = t_lo <= t_f <= t_hi
        if not in_window:
            notes.append(
                f"t_f={t_f} lies outside the feasible window [{t_lo}, {t_hi}]"
            )
    return replace(
        report,
        t_f=t_f,
        tf_valid=bool(above_lower and report.conditions_hold and in_window),
        notes=tuple(notes),
    )


def analyze(sys, approx, x_tg, t_f=None, root_tol=DEFAULT_ROOT_TOL):
    """Build a full FeasibilityReport; include the t_f verdict if given."""
    c, c1, c2, d_s = compute_constants(sys, approx, x_tg)
    notes = []
    ts = None
    window = None
    if d_s <= 0.0:
        conditions = False
        notes.append(
            "D_S = 0: h(t) is undefined, so the input-constraint conditions "
            "cannot be certified (error bounds still apply in the limit)"
        )
    else:
        conditions = check_conditions(c1, c2)
        if 0.0 < c1 < 2.0:
            ts = t_star(c1, d_s)
        if conditions and c1 > 0.0:
            window = feasible_interval(c1, c2, d_s, root_tol)
        elif conditions:
            notes.append("c1 = 0: every positive horizon satisfies the conditions")
    report = FeasibilityReport(
        c=c,
        c1=c1,
        c2=c2,
        d_s=d_s,
        conditions_hold=conditions,
        t_star=ts,
        feasible_interval=window,
        tf_lower_bound=tf_lower_bound(approx, approx.x0, x_tg),
        notes=tuple(notes),
    )
    if t_f is not None:
        report = validate_tf(t_f, report)
    return report
