import json

import numpy as np
import pytest

import resilientsim as rs
from resilientsim.errors import ConfigError, ConstraintError, DimensionError, RankError
from resilientsim.system import ADMIRE_A, ADMIRE_BC, ADMIRE_BUC

from conftest import make_driftless


def _admire_drift_oracle(x):
    p, q = x[0], x[1]
    wind = 0.5 * np.array([np.sin(p) * np.cos(p) ** 2, -np.sin(2 * q), 1.0])
    return ADMIRE_A @ x + wind


def test_admire_dimensions_and_constants():
    sys_ = rs.build_admire()
    assert (sys_.state_dim, sys_.controlled_dim, sys_.uncontrolled_dim) == (3, 3, 1)
    assert sys_.lipschitz_f == 2.6143
    assert sys_.lipschitz_g == 0.0
    np.testing.assert_array_equal(ADMIRE_BUC, np.array([[0.0], [1.6532], [0.0]]))


def test_evaluate_dynamics_admire_zero_inputs():
    sys_ = rs.build_admire()
    got = rs.evaluate_dynamics(sys_, rs.ADMIRE_X0, np.zeros(3), np.zeros(1))
    np.testing.assert_allclose(got, _admire_drift_oracle(rs.ADMIRE_X0), atol=1e-12)
    # at the origin only the constant wind term is left
    got0 = rs.evaluate_dynamics(sys_, np.zeros(3), np.zeros(3), np.zeros(1))
    np.testing.assert_allclose(got0, [0.0, 0.0, 0.5], atol=1e-15)


def test_evaluate_dynamics_identity_map():
    sys_ = make_driftless(np.eye(2), np.zeros((2, 1)), [0.0, 0.0])
    got = rs.evaluate_dynamics(sys_, np.zeros(2), np.array([1.0, -1.0]), np.zeros(1))
    np.testing.assert_array_equal(got, [1.0, -1.0])


def test_evaluate_dynamics_rejects_inadmissible_inputs():
    sys_ = rs.build_admire()
    with pytest.raises(ConstraintError, match="controlled"):
        rs.evaluate_dynamics(sys_, np.zeros(3), np.array([1.1, 0, 0]), np.zeros(1))
    with pytest.raises(ConstraintError, match="uncontrolled"):
        rs.evaluate_dynamics(sys_, np.zeros(3), np.zeros(3), np.array([-1.5]))
    with pytest.raises(DimensionError):
        rs.evaluate_dynamics(sys_, np.zeros(2), np.zeros(3), np.zeros(1))


def test_evaluate_dynamics_linear_in_inputs():
    sys_ = rs.build_admire()
    rng = np.random.default_rng(5)
    for _ in range(50):
        x = rng.normal(size=3)
        u1, u2 = rng.uniform(-1, 1, size=(2, 3))
        a, b = rng.uniform(-0.5, 0.5, size=2)
        f = sys_.drift(x)
        lhs = sys_.rhs(x, a * u1 + b * u2, np.zeros(1))
        rhs = a * sys_.rhs(x, u1, np.zeros(1)) + b * sys_.rhs(x, u2, np.zeros(1)) - (a + b - 1) * f
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)


def test_linearize_constant_maps():
    bc = np.array([[2.0, 0.0], [1.0, 1.0]])
    buc = np.array([[0.3], [0.1]])
    sys_ = make_driftless(bc, buc, [1.0, 1.0])
    approx = rs.linearize_at_origin(sys_, np.array([1.0, 1.0]))
    np.testing.assert_array_equal(approx.g0c, bc)
    np.testing.assert_array_equal(approx.g0uc, buc)
    assert rs.inf_norm(approx.g0c @ approx.g0c_pinv - np.eye(2)) <= 1e-8


def test_linearize_admire_freezes_printed_matrices():
    sys_ = rs.build_admire()
    approx = rs.linearize_at_origin(sys_, rs.ADMIRE_X0)
    np.testing.assert_array_equal(approx.g0c, ADMIRE_BC)
    np.testing.assert_array_equal(approx.g0uc, ADMIRE_BUC)


def test_linearize_state_dependent_map_uses_anchor_only():
    # g_c(x) scales with the first coordinate; only its value at x0 matters
    def gc(x):
        return (1.0 + x[0] ** 2) * np.eye(2)

    sys_ = rs.ControlSystem(
        state_dim=2, controlled_dim=2, uncontrolled_dim=1,
        drift=lambda x: np.zeros(2),
        controlled_map=gc,
        uncontrolled_map=lambda x: np.array([[0.1], [0.0]]),
        lipschitz_f=0.0, lipschitz_g=2.0,
    )
    x0 = np.array([2.0, -1.0])
    approx = rs.linearize_at_origin(sys_, x0)
    np.testing.assert_allclose(approx.g0c, 5.0 * np.eye(2), atol=1e-14)
    np.testing.assert_allclose(approx.g0c_pinv, np.eye(2) / 5.0, atol=1e-14)


def test_linearize_propagates_rank_failure():
    sys_ = make_driftless(np.array([[1.0, 1.0], [1.0, 1.0]]), np.zeros((2, 1)), [0, 0])
    with pytest.raises(RankError):
        rs.linearize_at_origin(sys_, np.zeros(2))


def test_check_lipschitz_linear_system_consistent():
    a = np.array([[0.0, 1.0], [-2.0, -0.5]])
    sys_ = rs.ControlSystem(
        state_dim=2, controlled_dim=2, uncontrolled_dim=1,
        drift=lambda x: a @ x,
        controlled_map=lambda x: np.eye(2),
        uncontrolled_map=lambda x: np.zeros((2, 1)),
        lipschitz_f=rs.inf_norm(a), lipschitz_g=0.0,
    )
    rep = rs.check_lipschitz(sys_, 500, rng_seed=0)
    assert rep.consistent
    assert rep.max_ratio_f <= rs.inf_norm(a) + 1e-12
    assert rep.max_ratio_g == 0.0


def test_check_lipschitz_admire():
    sys_ = rs.build_admire()
    rep = rs.check_lipschitz(sys_, 10_000, rng_seed=1, x0=rs.ADMIRE_X0)
    assert rep.consistent
    # an understated constant is caught: the linear part alone exceeds 1.6
    bad = rs.ControlSystem(
        state_dim=3, controlled_dim=3, uncontrolled_dim=1,
        drift=sys_.drift, controlled_map=sys_.controlled_map,
        uncontrolled_map=sys_.uncontrolled_map,
        lipschitz_f=1.0, lipschitz_g=0.0,
        state_space_bound=sys_.state_space_bound,
    )
    rep_bad = rs.check_lipschitz(bad, 10_000, rng_seed=1, x0=rs.ADMIRE_X0)
    assert not rep_bad.consistent
    assert rep_bad.max_ratio_f > 1.6


def test_check_lipschitz_deterministic():
    sys_ = rs.build_admire()
    a = rs.check_lipschitz(sys_, 200, rng_seed=9)
    b = rs.check_lipschitz(sys_, 200, rng_seed=9)
    assert a == b


def test_document_drift_terms():
    doc = {
        "A": [[0.0]],
        "Bc": [[1.0]],
        "Buc": [[0.5]],
        "drift_terms": [
            {"kind": "sin", "coeff": 2.0, "state_index": 0, "frequency": 3.0},
            {"kind": "cos", "coeff": -1.0, "state_index": 0, "frequency": 0.5},
            {"kind": "const", "coeff": 0.25, "state_index": 0},
        ],
        "Df": 6.5, "Dg": 0.0,
        "x0": [0.7], "xtg": [0.0],
    }
    sys_, x0, xtg = rs.system_from_document(doc)
    x = np.array([0.7])
    want = 2.0 * np.sin(3.0 * 0.7) - 1.0 * np.cos(0.5 * 0.7) + 0.25
    np.testing.assert_allclose(sys_.drift(x), [want], atol=1e-15)
    np.testing.assert_array_equal(x0, [0.7])
    np.testing.assert_array_equal(xtg, [0.0])


def test_document_validation_errors():
    base = {
        "A": [[0.0]], "Bc": [[1.0]], "Buc": [[0.5]],
        "Df": 1.0, "Dg": 0.0, "x0": [0.0], "xtg": [0.0],
    }
    for missing in ("A", "Bc", "Buc", "Df", "x0", "xtg"):
        doc = {k: v for k, v in base.items() if k != missing}
        with pytest.raises(ConfigError, match=missing):
            rs.system_from_document(doc)
    with pytest.raises(ConfigError, match="square"):
        rs.system_from_document({**base, "A": [[0.0, 1.0]]})
    with pytest.raises(ConfigError, match="kind"):
        rs.system_from_document(
            {**base, "drift_terms": [{"kind": "tan", "coeff": 1.0}]}
        )
    with pytest.raises(ConfigError, match="state_index"):
        rs.system_from_document(
            {**base, "drift_terms": [{"kind": "sin", "coeff": 1.0, "state_index": 4}]}
        )
    with pytest.raises(ConfigError):
        rs.system_from_document({**base, "Df": -0.5})


def test_load_system_reports_json_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"A": [[0.0]],\n  "Bc": oops\n}', encoding="utf-8")
    with pytest.raises(ConfigError, match="line 2"):
        rs.load_system(path)


def test_load_system_round_trip(tmp_path):
    from conftest import SYNTHETIC_DOC

    path = tmp_path / "system.json"
    path.write_text(json.dumps(SYNTHETIC_DOC), encoding="utf-8")
    sys_, x0, xtg = rs.load_system(path)
    assert sys_.state_dim == 2
    np.testing.assert_array_equal(x0, [0.5, 0.1])
    np.testing.assert_array_equal(xtg, [0.4, 0.2])
