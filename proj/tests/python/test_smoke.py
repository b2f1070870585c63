import json
import math

import numpy as np
import pytest

import vcdetector as vcd


def test_volume_and_correlation():
    x = np.array([[3.0, 0.0], [0.0, 4.0], [0.0, 0.0]])
    assert vcd.volume(x, 2) == pytest.approx(12.0)
    assert vcd.log_volume(x, 2) == pytest.approx(math.log(12.0))
    a = np.array([[1.0], [0.0]])
    b = np.array([[math.cos(math.pi / 6)], [math.sin(math.pi / 6)]])
    assert vcd.volume_correlation(a, b) == pytest.approx(0.5)
    assert vcd.principal_angles(a, b)[0] == pytest.approx(math.pi / 6)
    assert vcd.elementary_symmetric([1.0, 2.0, 3.0], 2) == pytest.approx(11.0)


def test_orthonormalize_matches_numpy_projector():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((10, 3))
    q = vcd.orthonormalize(x)
    assert q.shape == (10, 3)
    qn, _ = np.linalg.qr(x)
    assert np.allclose(q @ q.T, qn @ qn.T, atol=1e-12)


def test_non_orthonormal_basis_rejected():
    with pytest.raises(ValueError):
        vcd.volume_correlation(np.array([[2.0], [0.0]]), np.array([[0.0], [1.0]]))


def test_noiseless_detection_and_breakpoint():
    sc = vcd.make_scenario(40, 5, 2, None, True, 7)
    assert sc["noise_variance"] == 0.0
    ys = vcd.draw_samples(40, 5, 2, None, True, 7, count=20, sample_seed=3)
    out = vcd.detect(ys, sc["target_basis"], sigma2=0.0)
    assert out["decision"] == "TargetPresent"
    assert out["decided_at"] == 6
    assert vcd.noiseless_breakpoint(sc["target_basis"], ys) == (6, True)

    absent = vcd.draw_samples(40, 5, 2, None, False, 7, count=20, sample_seed=3)
    res = vcd.detect(absent, sc["target_basis"], sigma2=0.0)
    assert res["decision"] == "TargetAbsent"
    t = vcd.tau(sc["target_basis"], sc["clutter_basis"])
    assert res["trajectory"]["T"][-1] == pytest.approx(t, abs=1e-8)


def test_bound():
    r = vcd.bound("present", [3.0, 2.0], 1.0, 10, 0.1, 0.5, d2=1)
    assert r["m_required"] == 21408
    assert r["deviation_bound"] == pytest.approx(0.1)
    with pytest.raises(vcd.SingularInputError):
        vcd.bound("absent", [2.0, 2.0], 1.0, 10, 0.1, 0.5)


def test_simulate_is_deterministic():
    csv1, summary = vcd.simulate("fig1_desk", trials=1)
    csv2, _ = vcd.simulate("fig1_desk", trials=1, parallelism=2)
    assert csv1 == csv2
    assert csv1.startswith("trial_id,hypothesis,i,T,inv_T,k_i,decision\n")
    s = json.loads(summary)
    assert s["config"]["scenario"]["n"] == 256
