import numpy as np
import pytest

import resilientsim as rs

#: A small system that satisfies every feasibility condition at t_f = 5:
#: weak sinusoidal drift, identity controlled map, one weak uncontrolled
#: channel, and a target close to the start.
SYNTHETIC_DOC = {
    "A": [[0.0, 0.0], [0.0, 0.0]],
    "Bc": [[1.0, 0.0], [0.0, 1.0]],
    "Buc": [[0.05], [0.05]],
    "drift_terms": [
        {"kind": "sin", "coeff": 0.05, "state_index": 0},
        {"kind": "sin", "coeff": 0.05, "state_index": 1},
    ],
    "Df": 0.05,
    "Dg": 0.0,
    "x0": [0.5, 0.1],
    "xtg": [0.4, 0.2],
}
SYNTHETIC_TF = 5.0


@pytest.fixture(scope="session")
def synthetic():
    """(system, x0, xtg, approx, report) for the feasible benchmark above."""
    sys_, x0, xtg = rs.system_from_document(SYNTHETIC_DOC)
    approx = rs.linearize_at_origin(sys_, x0)
    report = rs.analyze(sys_, approx, xtg, t_f=SYNTHETIC_TF)
    assert report.tf_valid, "synthetic benchmark must validate"
    return sys_, x0, xtg, approx, report


@pytest.fixture(scope="session")
def admire():
    sys_ = rs.build_admire()
    approx = rs.linearize_at_origin(sys_, rs.ADMIRE_X0)
    report = rs.analyze(sys_, approx, rs.ADMIRE_XTG, t_f=rs.ADMIRE_TF)
    return sys_, approx, report


def make_driftless(bc, buc, x0):
    """Constant-map system with zero drift (exact-cancellation setting)."""
    bc = np.asarray(bc, dtype=float)
    buc = np.asarray(buc, dtype=float)
    d = bc.shape[0]
    return rs.ControlSystem(
        state_dim=d,
        controlled_dim=bc.shape[1],
        uncontrolled_dim=buc.shape[1],
        drift=lambda x: np.zeros(d),
        controlled_map=lambda x: bc,
        uncontrolled_map=lambda x: buc,
        lipschitz_f=0.0,
        lipschitz_g=0.0,
        state_space_bound=2.0 * rs.inf_norm(np.asarray(x0, dtype=float)) + 1.0,
    )
