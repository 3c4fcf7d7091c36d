"""Closed-loop integration against pluggable uncontrolled inputs.

The driver walks the schedule's intervals: at each interval start it reads
the integrator state, asks the controller for the constant input, then
advances with fixed-step RK4 (`steps_per_interval` substeps per interval,
so the geometrically shrinking intervals stay equally resolved).  The
uncontrolled channel is a time function sampled at the RK4 stage times;
adversarial strategies may also look at the state, which is frozen at the
substep start so the signal stays piecewise continuous in t.

Every emitted uncontrolled sample is clamped entrywise to [-1, 1] and then
hard-checked against the unit ball — a strategy bug cannot silently feed
the loop an inadmissible signal.
"""

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .controller import control_input, final_interval_input
from .errors import ConfigError, ConstraintError, DivergenceError, DomainError
from .feasibility import compute_constants, error_bound
from .linalg import as_vector, inf_norm
from .partition import interval_length

MIN_STEPS_PER_INTERVAL = 16
DEFAULT_STEPS_PER_INTERVAL = 256


# --- uncontrolled-input strategies -----------------------------------------


@dataclass(frozen=True, eq=False)
class Constant:
    """Fixed vector, the classic stuck-actuator scenario."""

    value: np.ndarray


@dataclass(frozen=True)
class Sinusoid:
    """amplitude * sin(2*pi*frequency*t + phase), entrywise amplitude."""

    amplitude: float = 1.0
    frequency: float = 0.5
    phase: float = 0.0


@dataclass(frozen=True)
class BangBang:
    """Random +/-1 levels redrawn every switch_period, seeded per segment."""

    switch_period: float = 1.0
    rng_seed: int = 0


@dataclass(frozen=True)
class GreedyAdversary:
    """Myopic worst case: push the dominant error coordinate outward.

    Enumerates a grid of `resolution` levels per channel and picks the
    combination maximizing the instantaneous growth of the largest
    |x - x_tg| coordinate through the frozen uncontrolled map.
    """

    resolution: int = 3


@dataclass(frozen=True)
class CancellationProbe:
    """Constant ones(p)/t_f: the running mean the compensation nulls exactly."""

    t_f: float


STRATEGY_KINDS = (
    "constant",
    "sinusoid",
    "bang_bang",
    "greedy_adversary",
    "cancellation_probe",
)


@lru_cache(maxsize=8192)
def _bang_bang_levels(seed, segment, p):
    rng = np.random.default_rng((seed, segment))
    return tuple(int(v) for v in rng.integers(0, 2, size=p) * 2 - 1)


def sample_uncontrolled(strategy, t, x, x_tg, approx):
    """One admissible uncontrolled sample; entrywise clamped to [-1, 1]."""
    p = approx.g0uc.shape[1]
    if isinstance(strategy, Constant):
        u = as_vector(strategy.value, dim=p, name="constant strategy value")
    elif isinstance(strategy, Sinusoid):
        u = np.full(
            p,
            strategy.amplitude
            * math.sin(2.0 * math.pi * strategy.frequency * t + strategy.phase),
        )
    elif isinstance(strategy, BangBang):
        if strategy.switch_period <= 0.0:
            raise DomainError(
                f"switch_period must be positive, got {strategy.switch_period}"
            )
        segment = int(math.floor(t / strategy.switch_period))
        u = np.array(_bang_bang_levels(strategy.rng_seed, segment, p), dtype=float)
    elif isinstance(strategy, GreedyAdversary):
        if strategy.resolution < 2:
            raise DomainError(
                f"resolution must be >= 2, got {strategy.resolution}"
            )
        if strategy.resolution ** p > 100_000:
            raise DomainError(
                f"grid of {strategy.resolution}**{p} points is too large"
            )
        err = np.asarray(x, dtype=float) - np.asarray(x_tg, dtype=float)
        j = int(np.argmax(np.abs(err)))
        s = 1.0 if err[j] >= 0.0 else -1.0
        row = approx.g0uc[j]
        levels = np.linspace(-1.0, 1.0, strategy.resolution)
        best, best_gain = None, -math.inf
        for combo in itertools.product(levels, repeat=p):
            gain = s * float(row @ np.asarray(combo))
            if gain > best_gain:
                best, best_gain = combo, gain
        u = np.array(best, dtype=float)
    elif isinstance(strategy, CancellationProbe):
        if strategy.t_f <= 0.0:
            raise DomainError(f"t_f must be positive, got {strategy.t_f}")
        u = np.full(p, 1.0 / strategy.t_f)
    else:
        raise ConfigError(f"unknown strategy object {strategy!r}")
    return np.clip(u, -1.0, 1.0)


def make_strategy(kind, params, p, t_f, default_seed=0):
    """Build a strategy from a config-style (kind, params) description."""
    params = dict(params or {})
    if kind == "constant":
        value = params.pop("value", None)
        if value is None:
            value = np.ones(p)
        elif np.isscalar(value):
            value = np.full(p, float(value))
        strategy = Constant(value=as_vector(value, dim=p, name="strategy value"))
    elif kind == "sinusoid":
        strategy = Sinusoid(
            amplitude=float(params.pop("amplitude", 1.0)),
            frequency=float(params.pop("frequency", 0.5)),
            phase=float(params.pop("phase", 0.0)),
        )
    elif kind == "bang_bang":
        strategy = BangBang(
            switch_period=float(params.pop("switch_period", t_f / 16.0)),
            rng_seed=int(params.pop("rng_seed", default_seed)),
        )
    elif kind == "greedy_adversary":
        strategy = GreedyAdversary(resolution=int(params.pop("resolution", 3)))
    elif kind == "cancellation_probe":
        params.pop("t_f", None)
        strategy = CancellationProbe(t_f=float(t_f))
    else:
        raise ConfigError(
            f"unknown strategy kind {kind!r}; expected one of {STRATEGY_KINDS}"
        )
    if params:
        raise ConfigError(
            f"unused strategy parameters for {kind!r}: {sorted(params)}"
        )
    return strategy


# --- integration ------------------------------------------------------------


def rk4_step(sys, x, uc, uuc_fn, t, dt):
    """One classical Runge-Kutta step of the closed-loop right-hand side.

    `uc` is held constant; `uuc_fn` is sampled at the stage times t,
    t + dt/2 and t + dt.  A non-finite result raises DivergenceError
    carrying the last finite state.
    """
    if dt <= 0.0:
        raise DomainError(f"step size must be positive, got {dt}")
    k1 = sys.rhs(x, uc, uuc_fn(t))
    k2 = sys.rhs(x + 0.5 * dt * k1, uc, uuc_fn(t + 0.5 * dt))
    k3 = sys.rhs(x + 0.5 * dt * k2, uc, uuc_fn(t + 0.5 * dt))
    k4 = sys.rhs(x + dt * k3, uc, uuc_fn(t + dt))
    out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise DivergenceError(
            f"state became non-finite during the step at t={t}", t=t, state=x
        )
    return out


@dataclass(frozen=True)
class NodeError:
    """Realized node error alongside its a-priori bound."""

    n: int
    t: float
    err: float
    bound: float


@dataclass
class SimulationTrace:
    times: np.ndarray
    states: np.ndarray
    uc_values: np.ndarray
    uuc_values: np.ndarray
    node_errors: list
    constraint_max: float
    final_error: float
    steps_per_interval: int


def _final_span_bound(c, d_s, span):
    """Error bound grown over the merged tail of length `span`.

    This equals the bound at depth n_bar - 1, since the tail spans
    t_f / 2**(n_bar - 1); using the tail's true length keeps the check
    faithful for the held final input.
    """
    if d_s == 0.0:
        return c * span
    try:
        growth = math.expm1(span * d_s)
    except OverflowError:
        return math.inf if c > 0.0 else 0.0
    return (c / d_s) * growth


def run_closed_loop(sys, schedule, strategy, steps_per_interval=DEFAULT_STEPS_PER_INTERVAL):
    """Integrate the full horizon, filling schedule.inputs as it goes.

    Returns a SimulationTrace sampled at every substep start plus the final
    time.  On divergence the partial trace is attached to the raised error.
    """
    if steps_per_interval < MIN_STEPS_PER_INTERVAL:
        raise DomainError(
            f"steps_per_interval must be >= {MIN_STEPS_PER_INTERVAL}, "
            f"got {steps_per_interval}"
        )
    approx = schedule.approx
    x_tg = schedule.x_tg
    t_f = schedule.t_f
    c, _, _, d_s = compute_constants(sys, approx, x_tg)

    def sample(t, x_frozen):
        u = sample_uncontrolled(strategy, t, x_frozen, x_tg, approx)
        if inf_norm(u) > 1.0:
            raise ConstraintError(
                f"strategy emitted |u_uc|_inf = {inf_norm(u)} > 1 at t={t}"
            )
        return u

    times, states, ucs, uucs = [], [], [], []
    node_errors = []
    schedule.inputs.clear()
    x = np.array(approx.x0, dtype=float)

    def assemble():
        # On the divergence path x is the last finite state.
        return SimulationTrace(
            times=np.array(times),
            states=np.array(states),
            uc_values=np.array(ucs),
            uuc_values=np.array(uucs),
            node_errors=list(node_errors),
            constraint_max=max((inf_norm(u) for u in schedule.inputs), default=0.0),
            final_error=float(inf_norm(x_tg - x)),
            steps_per_interval=steps_per_interval,
        )

    try:
        for iv in schedule.partition.intervals:
            if iv.n == schedule.n_bar:
                # Merged tail: one depth-(n_bar - 1) correction over the
                # actual remaining span.
                u_c = final_interval_input(iv.n, x, x_tg, approx, t_f)
            else:
                u_c = control_input(iv.n, x, x_tg, approx, interval_length(t_f, iv.n))
            schedule.inputs.append(u_c)
            h = iv.length / steps_per_interval
            for k in range(steps_per_interval):
                t_k = iv.t_start + k * h
                x_frozen = x

                def uuc_fn(tau, _xf=x_frozen):
                    return sample(tau, _xf)

                times.append(t_k)
                states.append(x.copy())
                ucs.append(np.array(u_c))
                uucs.append(uuc_fn(t_k))
                x = rk4_step(sys, x, u_c, uuc_fn, t_k, h)
            err = float(inf_norm(x_tg - x))
            if iv.n == schedule.n_bar:
                bound = _final_span_bound(c, d_s, t_f - iv.t_start)
            else:
                bound = error_bound(iv.n, c, d_s, t_f)
            node_errors.append(NodeError(n=iv.n, t=iv.t_end, err=err, bound=bound))
    except DivergenceError as exc:
        raise DivergenceError(
            str(exc), t=exc.t, state=exc.state, trace=assemble()
        ) from exc

    times.append(t_f)
    states.append(x.copy())
    ucs.append(np.array(schedule.inputs[-1]))
    uucs.append(sample(t_f, x))
    return assemble()


# --- post-run verification ---------------------------------------------------


@dataclass(frozen=True)
class TraceDiagnostics:
    """Outcome of checking a trace against its a-priori guarantees."""

    bound_violations: list
    constraint_violations: list
    final_error_ok: bool


def bound_check_allowance(dt, steps, c):
    """Absolute slack granted to a node-error check.

    1e-9 plus an RK4 discretization allowance ~ (dt/steps)**4 scaled by the
    growth constant, so property tests trip on algorithmic errors rather
    than integration noise.
    """
    return 1e-9 + 10.0 * (dt / steps) ** 4 * max(1.0, c)


def verify_trace(trace, report, schedule):
    """Check node errors against bounds and inputs against the unit ball."""
    bound_violations = []
    for iv, rec in zip(schedule.partition.intervals, trace.node_errors):
        allow = bound_check_allowance(iv.length, trace.steps_per_interval, report.c)
        if rec.err > rec.bound + allow:
            bound_violations.append(
                {"n": rec.n, "err": rec.err, "bound": rec.bound}
            )
    constraint_violations = []
    for iv, u in zip(schedule.partition.intervals, schedule.inputs):
        norm = inf_norm(u)
        if norm > 1.0 + 1e-9:
            constraint_violations.append({"n": iv.n, "norm": norm})
    return TraceDiagnostics(
        bound_violations=bound_violations,
        constraint_violations=constraint_violations,
        final_error_ok=bool(trace.final_error <= schedule.epsilon),
    )
