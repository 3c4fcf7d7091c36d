"""System models with controlled and uncontrolled input channels.

A system is ``dx/dt = f(x) + g_c(x) @ u_c + g_uc(x) @ u_uc`` where both
input vectors live in the unit max-norm ball.  Drift and input maps are
supplied as pure callbacks together with declared Lipschitz constants
(`lipschitz_f` for f, `lipschitz_g` for the stacked input map); the
constants are trusted by the synthesis machinery and can be spot-checked
by sampling via `check_lipschitz`.

The module also provides the built-in fighter-jet benchmark
(`build_admire`) and a JSON loader for linear systems with sinusoidal or
constant drift terms (`load_system` / `system_from_document`).
"""

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, ConstraintError, DimensionError, RankError
from .linalg import as_matrix, as_vector, inf_norm, right_pseudoinverse

#: Slack on the unit-ball input check in `evaluate_dynamics`.
INPUT_NORM_SLACK = 1e-12


@dataclass(frozen=True)
class ControlSystem:
    """Nonlinear dynamics split into drift plus two input channels.

    `drift` maps a state (d,) to (d,); `controlled_map` to (d, m);
    `uncontrolled_map` to (d, p).  Callbacks must be pure: the closed-loop
    driver and batch runners evaluate them concurrently.
    """

    state_dim: int
    controlled_dim: int
    uncontrolled_dim: int
    drift: Callable[[np.ndarray], np.ndarray]
    controlled_map: Callable[[np.ndarray], np.ndarray]
    uncontrolled_map: Callable[[np.ndarray], np.ndarray]
    lipschitz_f: float
    lipschitz_g: float
    state_space_bound: float = 10.0

    def __post_init__(self):
        if min(self.state_dim, self.controlled_dim, self.uncontrolled_dim) < 1:
            raise DimensionError(
                f"dimensions must all be >= 1, got d={self.state_dim}, "
                f"m={self.controlled_dim}, p={self.uncontrolled_dim}"
            )
        if self.lipschitz_f < 0.0 or self.lipschitz_g < 0.0:
            raise DimensionError("Lipschitz constants must be >= 0")
        if self.state_space_bound <= 0.0:
            raise DimensionError("state_space_bound must be positive")

    @property
    def lipschitz_sum(self):
        """D_S, the combined drift + input-map Lipschitz constant."""
        return self.lipschitz_f + self.lipschitz_g

    def rhs(self, x, uc, uuc):
        """Raw dx/dt without any validation (integrator fast path)."""
        return self.drift(x) + self.controlled_map(x) @ uc + self.uncontrolled_map(x) @ uuc


@dataclass(frozen=True)
class DriftlessApproximation:
    """Input maps frozen at the anchor state x0, drift dropped.

    `g0c_pinv` is the cached minimal-norm right inverse of `g0c`.
    """

    g0c: np.ndarray
    g0uc: np.ndarray
    g0c_pinv: np.ndarray
    x0: np.ndarray


def evaluate_dynamics(sys, x, uc, uuc):
    """Validated dx/dt = f(x) + g_c(x) uc + g_uc(x) uuc.

    Inputs must respect the unit max-norm ball (small numerical slack);
    a violation raises ConstraintError naming the offending channel.
    """
    x = as_vector(x, dim=sys.state_dim, name="state")
    uc = as_vector(uc, dim=sys.controlled_dim, name="controlled input")
    uuc = as_vector(uuc, dim=sys.uncontrolled_dim, name="uncontrolled input")
    if inf_norm(uc) > 1.0 + INPUT_NORM_SLACK:
        raise ConstraintError(
            f"controlled input exceeds unit ball: |u_c|_inf = {inf_norm(uc)}"
        )
    if inf_norm(uuc) > 1.0 + INPUT_NORM_SLACK:
        raise ConstraintError(
            f"uncontrolled input exceeds unit ball: |u_uc|_inf = {inf_norm(uuc)}"
        )
    out = as_vector(sys.rhs(x, uc, uuc), dim=sys.state_dim, name="dynamics output")
    return out


def linearize_at_origin(sys, x0):
    """Freeze both input maps at x0 and cache the right pseudoinverse.

    The controlled map at x0 must have full row rank; otherwise the
    underlying RankError propagates.
    """
    x0 = as_vector(x0, dim=sys.state_dim, name="x0")
    g0c = as_matrix(
        sys.controlled_map(x0), shape=(sys.state_dim, sys.controlled_dim), name="g_c(x0)"
    )
    g0uc = as_matrix(
        sys.uncontrolled_map(x0),
        shape=(sys.state_dim, sys.uncontrolled_dim),
        name="g_uc(x0)",
    )
    pinv = right_pseudoinverse(g0c)
    residual = inf_norm(g0c @ pinv - np.eye(sys.state_dim))
    if residual > 1e-8:
        raise RankError(
            f"right inverse of g_c(x0) is inaccurate (residual {residual:.3e}); "
            "matrix is too ill-conditioned"
        )
    return DriftlessApproximation(g0c=g0c, g0uc=g0uc, g0c_pinv=pinv, x0=x0)


@dataclass(frozen=True)
class LipschitzReport:
    max_ratio_f: float
    max_ratio_g: float
    consistent: bool


def check_lipschitz(sys, n_samples, rng_seed, x0=None):
    """Sample difference quotients and compare against declared constants.

    Draws `n_samples` state pairs uniformly from the max-norm ball of
    radius `state_space_bound` centered at `x0` (origin by default) and
    records the largest ratio |f(x1)-f(x2)| / |x1-x2| and likewise for the
    stacked input map [g_c g_uc].  Coincident pairs are skipped.
    Deterministic for a given seed.
    """
    if n_samples < 2:
        raise DimensionError(f"n_samples must be >= 2, got {n_samples}")
    d = sys.state_dim
    center = np.zeros(d) if x0 is None else as_vector(x0, dim=d, name="x0")
    rng = np.random.default_rng(rng_seed)
    r = sys.state_space_bound
    max_f = 0.0
    max_g = 0.0
    for _ in range(n_samples):
        x1 = center + rng.uniform(-r, r, size=d)
        x2 = center + rng.uniform(-r, r, size=d)
        gap = inf_norm(x1 - x2)
        if gap == 0.0:
            continue
        max_f = max(max_f, inf_norm(sys.drift(x1) - sys.drift(x2)) / gap)
        g1 = np.hstack([sys.controlled_map(x1), sys.uncontrolled_map(x1)])
        g2 = np.hstack([sys.controlled_map(x2), sys.uncontrolled_map(x2)])
        max_g = max(max_g, inf_norm(g1 - g2) / gap)
    return LipschitzReport(
        max_ratio_f=max_f,
        max_ratio_g=max_g,
        consistent=(max_f <= sys.lipschitz_f and max_g <= sys.lipschitz_g),
    )


# --- built-in fighter-jet benchmark ---------------------------------------
#
# Three states (roll, pitch, yaw rates), three controlled surfaces (left and
# right elevons, rudder) and one uncontrolled canard.  Linear airframe plus
# sinusoidal wind terms whose slopes never exceed 1.

ADMIRE_A = np.array(
    [
        [-0.9967, 0.0, 0.6176],
        [0.0, -0.5057, 0.0],
        [-0.0939, 0.0, -0.2127],
    ]
)
ADMIRE_BC = np.array(
    [
        [-4.2423, 4.2423, 1.4871],
        [-1.2735, -1.2735, 0.0024],
        [-0.2805, 0.2805, -0.8823],
    ]
)
ADMIRE_BUC = np.array([[0.0], [1.6532], [0.0]])
ADMIRE_X0 = np.array([5.13, 2.76, -3.07])
ADMIRE_XTG = np.zeros(3)
ADMIRE_TF = 20.0
ADMIRE_N_BAR = 8


def _admire_wind(x):
    p, q = x[0], x[1]
    return 0.5 * np.array([np.sin(p) * np.cos(p) ** 2, -np.sin(2.0 * q), 1.0])


def build_admire():
    """The benchmark jet: linear airframe + wind drift, canard uncontrolled.

    Declared constants: lipschitz_f = max-row-sum of A plus 1 for the wind
    terms = 2.6143; lipschitz_g = 0 (input maps are constant).
    """
    return ControlSystem(
        state_dim=3,
        controlled_dim=3,
        uncontrolled_dim=1,
        drift=lambda x: ADMIRE_A @ x + _admire_wind(x),
        controlled_map=lambda x: ADMIRE_BC,
        uncontrolled_map=lambda x: ADMIRE_BUC,
        lipschitz_f=2.6143,
        lipschitz_g=0.0,
        state_space_bound=2.0 * inf_norm(ADMIRE_X0 - ADMIRE_XTG) + 1.0,
    )


# --- JSON system documents -------------------------------------------------

_DRIFT_FUNCS = {"sin": np.sin, "cos": np.cos}


def _require(doc, key):
    if key not in doc:
        raise ConfigError(f"system document missing required field '{key}'")
    return doc[key]


def system_from_document(doc):
    """Build (ControlSystem, x0, xtg) from a parsed JSON system document.

    Document layout::

        {
          "A":  [[...], ...],          # d x d drift matrix
          "Bc": [[...], ...],          # d x m controlled input map
          "Buc": [[...], ...],         # d x p uncontrolled input map
          "drift_terms": [             # optional nonlinear drift add-ons
            {"kind": "sin"|"cos"|"const", "coeff": 0.1,
             "state_index": 0, "frequency": 2.0}
          ],
          "Df": 1.5, "Dg": 0.0,        # declared Lipschitz constants
          "x0":  [...], "xtg": [...]
        }

    A term contributes ``coeff * kind(frequency * x[state_index])`` to
    component `state_index` of the drift ("const" ignores the frequency and
    contributes the bare coefficient).  Richer nonlinearities are available
    only programmatically.
    """
    if not isinstance(doc, dict):
        raise ConfigError(f"system document must be a JSON object, got {type(doc).__name__}")
    try:
        a_mat = as_matrix(_require(doc, "A"), name="A")
        d = a_mat.shape[0]
        if a_mat.shape != (d, d):
            raise ConfigError(f"'A' must be square, got shape {a_mat.shape}")
        bc = as_matrix(_require(doc, "Bc"), name="Bc")
        if bc.shape[0] != d:
            raise ConfigError(f"'Bc' must have {d} rows, got {bc.shape[0]}")
        buc = as_matrix(_require(doc, "Buc"), name="Buc")
        if buc.shape[0] != d:
            raise ConfigError(f"'Buc' must have {d} rows, got {buc.shape[0]}")
        x0 = as_vector(_require(doc, "x0"), dim=d, name="x0")
        xtg = as_vector(_require(doc, "xtg"), dim=d, name="xtg")
    except DimensionError as exc:
        raise ConfigError(f"system document field invalid: {exc}") from exc
    df = float(_require(doc, "Df"))
    dg = float(_require(doc, "Dg"))
    if df < 0.0 or dg < 0.0:
        raise ConfigError("'Df' and 'Dg' must be >= 0")

    terms = []
    for i, raw in enumerate(doc.get("drift_terms", [])):
        kind = raw.get("kind")
        if kind not in ("sin", "cos", "const"):
            raise ConfigError(
                f"drift_terms[{i}].kind must be 'sin', 'cos' or 'const', got {kind!r}"
            )
        if "coeff" not in raw:
            raise ConfigError(f"drift_terms[{i}] missing 'coeff'")
        coeff = float(raw["coeff"])
        idx = int(raw.get("state_index", 0))
        if not 0 <= idx < d:
            raise ConfigError(
                f"drift_terms[{i}].state_index {idx} out of range for d={d}"
            )
        freq = float(raw.get("frequency", 1.0))
        terms.append((kind, coeff, idx, freq))

    def drift(x):
        out = a_mat @ x
        for kind, coeff, idx, freq in terms:
            if kind == "const":
                out[idx] += coeff
            else:
                out[idx] += coeff * _DRIFT_FUNCS[kind](freq * x[idx])
        return out

    sys = ControlSystem(
        state_dim=d,
        controlled_dim=bc.shape[1],
        uncontrolled_dim=buc.shape[1],
        drift=drift,
        controlled_map=lambda x: bc,
        uncontrolled_map=lambda x: buc,
        lipschitz_f=df,
        lipschitz_g=dg,
        state_space_bound=2.0 * inf_norm(x0 - xtg) + 1.0,
    )
    return sys, x0, xtg


def load_system(path):
    """Read a system JSON document from disk; see `system_from_document`."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read system file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"system file {path} is not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from exc
    return system_from_document(doc)
