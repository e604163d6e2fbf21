"""Smoke tests for the python bindings: thin checks that the surface is
wired correctly, with numpy as the independent reference where possible."""

import json

import numpy as np
import pytest

import mpcleak as mp


def test_qtp_spectrum_matches_numpy():
    sys = mp.qtp_model()
    assert (sys.n, sys.m, sys.p) == (4, 2, 2)
    ours = sorted(mp.eigenvalues(sys.a), key=lambda z: z.real)
    ref = sorted(np.linalg.eigvals(sys.a), key=lambda z: z.real)
    assert np.allclose(ours, ref, atol=1e-12)


def test_discretization_of_scalar_lag():
    sys = mp.LtiSystem(np.array([[-1.0]]), np.array([[1.0]]),
                       np.array([[1.0]]), False)
    sysd = mp.zoh_discretize(sys, np.log(2.0))
    assert sysd.a[0, 0] == pytest.approx(0.5, abs=1e-14)
    assert sysd.b[0, 0] == pytest.approx(0.5, abs=1e-14)


def test_dense_shapes_and_terminal_block():
    sys = mp.qtp_model()
    qp = mp.build_dense(sys, mp.qtp_cost(5), mp.qtp_box())
    assert qp.h.shape == (10, 10)
    assert qp.f.shape == (4, 10)
    assert qp.g.shape == (40, 10)
    assert qp.o.shape == (40, 4)
    # Zero terminal weight: the last diagonal block of H/2 is just R.
    assert np.allclose(qp.h_block(4, 4), np.eye(2), atol=1e-12)


def test_unconstrained_qp_against_numpy():
    sys = mp.qtp_model()
    wide = mp.BoxConstraints(-1e6 * np.ones(2), 1e6 * np.ones(2),
                             -1e6 * np.ones(2), 1e6 * np.ones(2))
    qp = mp.build_dense(sys, mp.qtp_cost(4), wide)
    x0 = np.array([0.3, -0.2, 0.1, 0.4])
    sol = mp.qp_solve(qp, x0)
    assert sol.active == []
    z_ref = np.linalg.solve(qp.h, -qp.f.T @ x0)
    assert np.allclose(sol.z, z_ref, atol=1e-9)


def test_identity_key_is_a_no_op():
    sys = mp.qtp_model()
    cost = mp.qtp_cost(5)
    key = mp.SeparateKey.identity(4, 2, 2)
    tp = mp.apply_separate(key, sys, cost)
    assert np.allclose(tp.a_t, sys.a, atol=1e-14)
    assert np.allclose(tp.m22, cost.r, atol=1e-14)


def test_separate_attack_round_trip():
    sys = mp.qtp_model()
    cost = mp.qtp_cost(5)
    opts = mp.KeyGenOptions()
    opts.range = 1.0
    key = mp.gen_separate_key(11, sys, mp.SeparateVariant.AFFINE, opts)
    rep = mp.attack_separate(mp.apply_separate(key, sys, cost))
    ours = sorted(rep.eigenvalues, key=lambda z: z.real)
    ref = sorted(np.linalg.eigvals(sys.a), key=lambda z: z.real)
    assert np.allclose(ours, ref, atol=1e-7)
    assert "r_hat" in json.loads(rep.to_json())


def test_dense_mask_round_trip():
    sys = mp.qtp_model()
    qp = mp.build_dense(sys, mp.qtp_cost(5), mp.qtp_box())
    key = mp.gen_dense_key(5, qp.h.shape[0], qp.g.shape[0], range=1.0)
    x0 = np.array([1.0, -0.5, 0.2, 0.8])
    masked = mp.apply_dense(key, qp, x0)
    hidden = mp.qp_solve_raw(masked.h_t, masked.f_t, masked.g_t, masked.e_t)
    truth = mp.qp_solve(qp, x0)
    assert np.allclose(key.r_mat @ hidden.z + key.r_vec, truth.z, atol=1e-6)


def test_scenario_report():
    pf = mp.parse_problem("qtp")
    res = mp.run_scenario(pf, "separate", [5], 3)
    assert res.records[0].eps_a < 1e-8
    report = json.loads(res.report_json())
    assert report["scenario"] == "separate"
    assert report["problem"]["n"] == 4


def test_reproduce_outputs(tmp_path):
    out = tmp_path / "study"
    mp.reproduce_qtp(str(out), [5, 20], 7)
    assert (out / "report.json").is_file()
    assert (out / "rms.csv").read_text().startswith("horizon,")


def test_errors_are_mapped():
    with pytest.raises(mp.ParseError):
        mp.parse_problem("/nonexistent/problem.json")
    with pytest.raises(mp.Error):
        mp.transmission_zeros(
            mp.LtiSystem(np.eye(2), np.ones((2, 1)), np.ones((2, 2)), True))
