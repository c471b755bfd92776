import math

import numpy as np
import pytest

import atomreg


def unit_atom(tau=(0.0, 0.0), coeff=1.0):
    return atomreg.Atom(coeff, 0.0, np.array(tau), np.array([1.0, 1.0]))


def random_pattern(seed, n=6):
    rng = np.random.default_rng(seed)
    rows = np.column_stack([
        rng.uniform(-1, 1, n),
        rng.uniform(0, math.pi, n),
        rng.uniform(-2, 2, n),
        rng.uniform(-2, 2, n),
        rng.uniform(0.4, 1.5, n),
        rng.uniform(0.4, 1.5, n),
    ])
    return atomreg.Pattern.from_array(rows)


def test_unit_atom_inner_product():
    p = atomreg.Pattern([unit_atom()])
    assert atomreg.inner_product(p, p) == pytest.approx(math.pi / 2, rel=1e-15)
    q = atomreg.Pattern([unit_atom((2.0, 0.0))])
    assert atomreg.inner_product(p, q) == pytest.approx(math.pi / 2 * math.exp(-2.0), rel=1e-14)


def test_array_round_trip():
    p = random_pattern(1)
    rows = p.to_array()
    assert rows.shape == (6, 6)
    assert np.array_equal(atomreg.Pattern.from_array(rows).to_array(), rows)
    assert atomreg.Pattern.from_csv(p.to_csv()).to_array().tolist() == rows.tolist()
    with pytest.raises(ValueError):
        atomreg.Pattern.from_array(np.zeros((3, 5)))


def test_distance_matches_sampled_integral():
    p = random_pattern(2)
    u = np.array([0.7, -0.4])
    n, ext = 240, 8.0
    a = atomreg.evaluate(p, n, n, ext)
    b = atomreg.evaluate(atomreg.translate(p, u), n, n, ext)
    h = 2 * ext / n
    assert atomreg.distance(p, p, u) == pytest.approx(float(np.sum((a - b) ** 2) * h * h), rel=1e-6)


def test_unit_atom_derivatives():
    p = atomreg.Pattern([unit_atom()])
    T = np.array([0.0, 1.0])
    assert atomreg.distance_derivative(p, 1.0, T) == pytest.approx(math.pi * math.exp(-0.5), rel=1e-14)
    assert atomreg.distance_second_derivative(p, 0.0, T) == pytest.approx(math.pi, rel=1e-14)


def test_siden_and_grid():
    p = atomreg.Pattern([unit_atom()])
    est = atomreg.siden_boundary(p, 16)
    assert len(est.delta) == 16
    assert min(est.delta) == pytest.approx(est.min_delta())
    grid = atomreg.build_grid(p, 0.0, 4.0)
    assert grid.spacing == pytest.approx(math.sqrt(2) * est.min_delta())
    assert len(grid) == grid.per_axis ** 2


def test_noiseless_registration():
    p = random_pattern(3, 10)
    u = np.array([1.2, -0.8])
    r = atomreg.two_stage_register(p, atomreg.translate(p, u), 1.0, t_range=3.0)
    assert r.converged
    assert np.linalg.norm(r.translation - u) < 1e-6


def test_bounds_and_noise():
    p = random_pattern(4, 10)
    noise = atomreg.NoiseSpec(eta=0.0)
    rep = atomreg.gaussian_bound(p, noise)
    assert rep.eta0 > 0
    assert rep.rt0 == 0.0
    assert "eta0" in rep.to_text()
    w = atomreg.gaussian_field(atomreg.NoiseSpec(L=50, eta=0.1), seed=5)
    assert len(w) == 50
    gb = atomreg.generic_bound(p, 0.0)
    assert gb.nu0 > 0


def test_sweep_csv_is_deterministic():
    text = "sweep.patterns = 1\nsweep.trials = 2\nsweep.rho_list = 0, 1\nsweep.eta_list = 0\n"
    a = atomreg.run_sweep("error-sweep", text)
    assert a == atomreg.run_sweep("error-sweep", text)
    assert a.splitlines()[0].startswith("rho,eta,mean_error")
    with pytest.raises(ValueError):
        atomreg.run_sweep("error-sweep", "no.such.key = 1\n")


def test_numeric_error_is_raised():
    zero = atomreg.Pattern([unit_atom(coeff=0.0)])
    with pytest.raises(atomreg.NumericError):
        atomreg.build_grid(zero, 0.0, 1.0)
