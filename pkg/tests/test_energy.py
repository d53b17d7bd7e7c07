import numpy as np
import pytest

from pobs.core import ProblemParams, build_grid, eval_coefficient, field_from_function, zero_field
from pobs.energy import (
    energy,
    energy_gradient,
    estimate_sobolev_constant,
    mountain_pass_floor,
    ray_profile,
)
from pobs.errors import ParameterError, SeedError
from pobs.solver import default_seed_spec

RNG = np.random.default_rng(3)


def unit_coeff(*coords):
    return np.ones_like(coords[0])


@pytest.fixture()
def small_setup():
    grid = build_grid([(0, 1), (0, 1)], [16, 16])
    a = eval_coefficient(unit_coeff, grid)
    params = ProblemParams(p=2.0, lam=4.0, m1=1.0, m2=1.0, dim=2, eps=0.05)
    return grid, a, params


def test_energy_of_zero_field(small_setup):
    grid, a, params = small_setup
    e = energy(zero_field(grid), a, params)
    assert e.gradient_term == 0.0
    assert e.penalty_term == 0.0
    assert e.reaction_term == 0.0
    assert e.total == 0.0


def test_breakdown_total_is_sum(small_setup):
    grid, a, params = small_setup
    vals = np.zeros(grid.shape)
    vals[1:-1, 1:-1] = RNG.standard_normal((15, 15))
    u = field_from_function(grid, lambda x, y: 0.0).with_values(vals)
    e = energy(u, a, params)
    assert e.total == e.gradient_term + e.penalty_term + e.reaction_term
    assert e.gradient_term > 0
    assert e.penalty_term >= 0
    assert e.reaction_term <= 0


def test_gradient_matches_finite_differences(small_setup):
    grid, a, params = small_setup
    vals = np.zeros(grid.shape)
    vals[1:-1, 1:-1] = 0.5 * RNG.standard_normal((15, 15))
    u = field_from_function(grid, lambda x, y: 0.0).with_values(vals)
    g = energy_gradient(u, a, params).values
    dh = 1e-6
    for _ in range(10):
        i, j = RNG.integers(1, 16, size=2)
        up, dn = vals.copy(), vals.copy()
        up[i, j] += dh
        dn[i, j] -= dh
        ep = energy(u.with_values(up), a, params).total
        en = energy(u.with_values(dn), a, params).total
        fd = (ep - en) / (2 * dh)
        assert fd == pytest.approx(g[i, j], rel=2e-5, abs=1e-8)


def test_gradient_matches_finite_differences_p3(small_setup):
    grid, a, _ = small_setup
    params = ProblemParams(p=3.0, lam=4.0, m1=1.0, m2=1.0, dim=2, eps=0.05)
    vals = np.zeros(grid.shape)
    vals[1:-1, 1:-1] = 0.5 + 0.2 * RNG.standard_normal((15, 15))
    u = field_from_function(grid, lambda x, y: 0.0).with_values(vals)
    g = energy_gradient(u, a, params).values
    dh = 1e-6
    for _ in range(10):
        i, j = RNG.integers(1, 16, size=2)
        up, dn = vals.copy(), vals.copy()
        up[i, j] += dh
        dn[i, j] -= dh
        ep = energy(u.with_values(up), a, params).total
        en = energy(u.with_values(dn), a, params).total
        fd = (ep - en) / (2 * dh)
        assert fd == pytest.approx(g[i, j], rel=5e-5, abs=1e-7)


def test_ray_profile_mountain_pass_shape(small_setup):
    grid, a, params = small_setup
    w = field_from_function(grid, lambda x, y: 0.0).with_values(
        default_seed_spec(grid).sample(grid)
    )
    ts = [0.0, 1.0, 64.0]
    j0, j1, j2 = ray_profile(w, a, params, ts)
    assert j0 == 0.0
    assert j1 > 0.0  # small amplitudes climb the mountain pass
    assert j2 < 0.0  # large amplitudes fall below zero energy


def test_ray_profile_rejects_bad_input(small_setup):
    grid, a, params = small_setup
    with pytest.raises(SeedError):
        ray_profile(zero_field(grid), a, params, [1.0])
    w = field_from_function(grid, lambda x, y: 0.0).with_values(
        default_seed_spec(grid).sample(grid)
    )
    with pytest.raises(ParameterError):
        ray_profile(w, a, params, [-1.0])


def test_mountain_pass_floor_closed_form():
    params = ProblemParams(p=2.0, lam=4.0, m1=1.0, m2=1.0, dim=2, eps=0.1)
    # ((lam-p)/(lam p)) a0^{lam/(lam-p)} m2^{p/(p-lam)} S^{lam p/(lam-p)}
    got = mountain_pass_floor(params, a0=1.0, sobolev_est=2.0)
    assert got == pytest.approx(0.25 * 2.0 ** 4, rel=1e-14)
    got = mountain_pass_floor(params, a0=4.0, sobolev_est=1.0)
    assert got == pytest.approx(0.25 * 16.0, rel=1e-14)
    with pytest.raises(ParameterError):
        mountain_pass_floor(params, a0=0.0, sobolev_est=1.0)
    with pytest.raises(ParameterError):
        mountain_pass_floor(params, a0=1.0, sobolev_est=-1.0)


def test_sobolev_estimate_positive_and_reproducible():
    grid = build_grid([(0, 1), (0, 1)], [16, 16])
    s1 = estimate_sobolev_constant(grid, 2.0, 4.0, iters=50, seed=0)
    s2 = estimate_sobolev_constant(grid, 2.0, 4.0, iters=50, seed=0)
    assert s1 > 0
    assert s1 == s2
