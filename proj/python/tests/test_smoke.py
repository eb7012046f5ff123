import json
import os

import numpy as np
import pytest

import lagpot


def test_identity_spectrum():
    a = np.eye(4)
    assert lagpot.m_lag(a) == pytest.approx(16.0)
    np.testing.assert_allclose(lagpot.garding_eigenvalues(a), [2, 2, 2, 2])
    s = lagpot.lag_spectrum(a)
    assert s["mu"] == pytest.approx(2.0)
    np.testing.assert_allclose(s["lambdas"], [0, 0], atol=1e-14)
    assert lagpot.cone_membership(a)["in_interior_P_lag"]


def test_three_constructions_agree():
    rng = np.random.default_rng(3)
    for n in (1, 2, 3):
        g = rng.standard_normal((2 * n, 2 * n))
        a = g + g.T
        m = lagpot.m_lag(a)
        assert lagpot.axis_restricted_det(a) == pytest.approx(m, rel=1e-7, abs=1e-9)
        s = lagpot.spinor_det(a)
        assert s.real == pytest.approx(m, rel=1e-7, abs=1e-9)
        assert abs(s.imag) <= 1e-8 * max(1.0, abs(s))


def test_n1_is_det():
    a = np.array([[2.0, 1.0], [1.0, 3.0]])
    assert lagpot.m_lag(a) == pytest.approx(np.linalg.det(a))


def test_oracle_and_decomposition():
    a = np.diag([1.0, 2.0, 3.0, 4.0])
    value, frame = lagpot.sampled_min_trace(a, count=50, seed=1)
    assert value == pytest.approx(lagpot.lambda_min(a))
    assert frame.shape == (4, 2)
    edge, pos = lagpot.int_decompose(a)
    np.testing.assert_allclose(edge + pos, a, atol=1e-12)
    np.testing.assert_allclose(pos, np.diag([2.0, 3.0, 2.0, 3.0]), atol=1e-12)


def test_freeness():
    lag = np.array([[1.0, 0], [0, 0], [0, 1.0], [0, 0]])
    line = np.array([[1.0, 0], [0, 1.0], [0, 0], [0, 0]])
    assert abs(lagpot.freeness(lag)[0]) <= 1e-10
    assert lagpot.freeness(line) == (pytest.approx(1.0, abs=1e-10), True)


def test_boundary_sphere():
    rho = "x1^2 + y1^2 + x2^2 + y2^2 - 1"
    probes = lagpot.sample_boundary_probes(rho, 2, count=8, seed=2)
    r = lagpot.boundary_report(rho, 2, probes)
    assert r["verdict"] == "StrictlyConvex"
    np.testing.assert_allclose(r["min_tangential_trace"], 4.0, atol=1e-6)


def test_solve_layout():
    r = lagpot.solve(1, "x1^2 + 0.5*y1", m=9)
    u, mask = r["values"], r["mask"]
    assert u.shape == (9, 9)
    assert r["diagnostics"]["converged"]
    # The first index is x1: a boundary row varying in x1 holds phi(x1, -1).
    xs = np.linspace(-1, 1, 9)
    np.testing.assert_allclose(u[:, 0], xs**2 - 0.5)
    assert (mask[1:-1, 1:-1] == 0).all()
    assert r["residual_max"] <= r["diagnostics"]["threshold"]


def test_errors_carry_codes():
    with pytest.raises(lagpot.LagpotError) as e:
        lagpot.m_lag(np.array([[1.0, 2.0], [0.0, 1.0]]))
    assert e.value.args[0] == "NonSymmetric"
    with pytest.raises(lagpot.LagpotError) as e:
        lagpot.solve(1, "x1 +* 2", m=5)
    assert e.value.args[0] == "SyntaxError"


def test_cli_roundtrip(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"form": {"n": 2, "entries": np.diag([1.0, 2, 3, 4]).tolist()}}))
    out = tmp_path / "out"
    assert lagpot.run_cli(["crosscheck", "--config", str(cfg), "--out", str(out), "--quiet"]) == 0
    r = json.loads((out / "crosscheck.json").read_text())
    assert r["product"] == pytest.approx(600.0)
    assert r["max_rel_gap"] < 1e-7
    assert lagpot.run_cli(["eval", "--config", str(tmp_path / "missing.json"), "--out", str(out)]) == 2


def test_imported_module_location():
    build = os.environ.get("LAGPOT_BUILD_PYTHONPATH")
    if build:
        assert lagpot._core.__file__.startswith(build)
