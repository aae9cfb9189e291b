import itertools
import math

import numpy as np
import pytest

import divsel


def test_catalog():
    ids = [d.id for d in divsel.list_functions()]
    assert "f1-sphere" in ids
    assert len(ids) == len(set(ids))
    f = divsel.make_function("f1-sphere", 3)
    assert f([1.0, 2.0, 2.0]) == pytest.approx(9.0)
    assert f.f_opt == 0.0


def test_sample_shapes():
    f = divsel.make_function("f1-sphere", 2)
    for sampler in ("uniform", "sobol", "cmaes"):
        p = divsel.sample(f, sampler, budget=200, seed=3)
        assert len(p) == 200
        assert p.coords.shape == (200, 2)
        assert np.allclose(p.fitness, (p.coords**2).sum(axis=1))
        assert np.all(np.abs(p.coords) <= 5.0)


def test_greedy_and_envelope():
    f = divsel.make_function("f1-sphere", 2)
    p = divsel.sample(f, "uniform", budget=500, seed=1)
    recs = divsel.greedy_sweep(p, k=4, iterations=200)
    ds = [r.min_distance for r in recs]
    assert ds == sorted(ds)
    for r in recs:
        assert divsel.verify_batch(p, r.batch, r.min_distance)
    env = divsel.lower_envelope(recs)
    assert env[0][0] <= env[-1][0]
    assert divsel.interpolate_at(env, env[-1][0] + 1.0) is None
    assert divsel.interpolate_at(env, 0.0) == env[0][1]


def test_exact_matches_enumeration():
    rng = np.random.default_rng(0)
    coords = rng.uniform(-5, 5, size=(14, 2))
    fit = (coords**2).sum(axis=1)
    p = divsel.Portfolio(coords, fit, "f1-sphere")
    best = math.inf
    for c in itertools.combinations(range(14), 3):
        pts = coords[list(c)]
        dmin = min(np.linalg.norm(pts[a] - pts[b]) for a, b in itertools.combinations(range(3), 2))
        if dmin >= 2.5:
            best = min(best, fit[list(c)].mean())
    res = divsel.exact_select(p, k=3, d_min=2.5)
    assert res.status == "optimal"
    assert res.batch.loss == pytest.approx(best, abs=1e-12)


def test_external_portfolio_roundtrip(tmp_path):
    p = divsel.Portfolio([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]], [0.0, 1.0, 4.0], "f1-sphere")
    path = tmp_path / "p.csv"
    p.save(path)
    q = divsel.Portfolio.load(path)
    assert np.array_equal(q.coords, p.coords)
    assert np.array_equal(q.fitness, p.fitness)


def test_errors():
    with pytest.raises(Exception):
        divsel.make_function("no-such-function", 2)
    p = divsel.Portfolio([[0.0, 0.0], [1.0, 0.0]], [0.0, 1.0])
    res = divsel.exact_select(p, k=2, d_min=5.0)
    assert res.status == "infeasible"
    assert res.batch is None
