import json

import numpy as np
import pytest

from weylconv.measures import EmpiricalMeasure, standardized_discrepancy


def _cloud(rng, n=500, q=2, complex_weights=False):
    d = np.sort(rng.uniform(0, 2, (n, q)), axis=1)[:, ::-1].copy()
    theta = rng.normal(size=n)
    w = None
    if complex_weights:
        w = np.exp(1j * rng.uniform(-3, 3, n)) / n
    return EmpiricalMeasure(d, theta, w)


def test_default_weights_uniform():
    m = _cloud(np.random.default_rng(0))
    assert m.is_probability()
    assert m.total_mass == pytest.approx(1.0)
    assert m.total_variation == pytest.approx(1.0)


def test_expect_matches_manual():
    m = _cloud(np.random.default_rng(1))
    got = m.expect(lambda d, th: d[:, 0] * np.cos(th))
    want = np.mean(m.d[:, 0] * np.cos(m.theta))
    assert got == pytest.approx(want)


def test_complex_weight_total_variation():
    m = _cloud(np.random.default_rng(2), complex_weights=True)
    assert m.total_variation == pytest.approx(1.0)
    assert not m.is_probability()
    with pytest.raises(ValueError):
        m.moment_vector()


def test_csv_round_trip(tmp_path):
    m = _cloud(np.random.default_rng(3), n=50, complex_weights=True)
    path = tmp_path / "cloud.csv"
    m.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "d_1,d_2,theta,weight_re,weight_im"
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data.shape == (50, 5)
    assert np.allclose(data[:, :2], m.d)
    assert np.allclose(data[:, 2], m.theta)
    assert np.allclose(data[:, 3] + 1j * data[:, 4], m.weights)


def test_json_summary(tmp_path):
    m = _cloud(np.random.default_rng(4), n=80)
    m.meta.update({"seed": 4, "p": 3.5})
    path = tmp_path / "summary.json"
    m.to_json(path)
    data = json.loads(path.read_text())
    assert data["n"] == 80 and data["q"] == 2
    assert data["seed"] == 4 and data["p"] == 3.5
    assert data["total_mass"][0] == pytest.approx(1.0)
    assert len(data["mean_d"]) == 2


def test_points_view():
    m = _cloud(np.random.default_rng(5), n=5)
    pts = m.points()
    assert len(pts) == 5
    assert pts[0].t.coords == tuple(m.d[0])


def test_standardized_discrepancy_same_law_small():
    rng = np.random.default_rng(6)
    m1 = _cloud(rng, n=40_000)
    m2 = _cloud(rng, n=40_000)
    assert standardized_discrepancy(m1, m2) < 4.0


def test_standardized_discrepancy_detects_shift():
    rng = np.random.default_rng(7)
    m1 = _cloud(rng, n=20_000)
    m2 = _cloud(rng, n=20_000)
    m2.d += 0.05
    assert standardized_discrepancy(m1, m2) > 5.0
