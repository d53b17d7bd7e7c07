import numpy as np
import pytest

from pobs.analysis import (
    barrier_comparison_check,
    c2_constant,
    degiorgi_iterate,
    growth_fit,
    holder_seminorm_probe,
    nondegeneracy_check,
    pointwise_c3,
    pointwise_inequality_check,
    r2_bound,
    sphere_sup,
    stable_holder_exponent,
    uniform_bounds_report,
)
from pobs.core import ProblemParams, build_grid, eval_coefficient, field_from_function, zero_field
from pobs.errors import DomainError, FitError, ParameterError
from pobs.freeboundary import FreeBoundary
from pobs.solver import ContinuationResult


def unit_coeff(*coords):
    return np.ones_like(coords[0])


def _params(p=2.0, lam=4.0, m1=1.0, m2=1.0, eps=0.1):
    return ProblemParams(p=p, lam=lam, m1=m1, m2=m2, dim=2, eps=eps)


def test_c2_constant_closed_form():
    # p=2: (1/2) * (1 / (2*2*(1+1))) = 1/16
    assert c2_constant(_params(), 1.0) == pytest.approx(0.0625, rel=1e-14)
    # p=3, m1=2: (2/3) * (2 / (2*2*2))^{1/2} = (2/3) * 0.5 = 1/3
    assert c2_constant(_params(p=3.0, m1=2.0), 1.0) == pytest.approx(1 / 3, rel=1e-14)
    with pytest.raises(ParameterError):
        c2_constant(_params(), 0.0)


def test_r2_bound_closed_form():
    # with m1 = 2 m2 c1^{lam-1} the third term is exactly 1
    params = _params(m1=2.0)
    assert r2_bound(params, a1=1.0, c1_growth=1.0, r1=10.0) == pytest.approx(1.0)
    # the 1/a1 term dominates for stiff coefficients
    assert r2_bound(params, a1=10.0, c1_growth=1.0, r1=10.0) == pytest.approx(0.1)
    # r1 dominates for boundary-limited points
    assert r2_bound(params, a1=1.0, c1_growth=1.0, r1=0.05) == pytest.approx(0.05)
    # large c1 drives the admissible radius toward zero
    big = r2_bound(params, a1=1.0, c1_growth=1e6, r1=10.0)
    assert big < 1e-2
    with pytest.raises(ParameterError):
        r2_bound(params, a1=1.0, c1_growth=0.0, r1=1.0)
    with pytest.raises(ParameterError):
        r2_bound(params, a1=1.0, c1_growth=1.0, r1=0.0)


def test_sphere_sup_domain_check():
    g = build_grid([(0, 1), (0, 1)], [32, 32])
    u = field_from_function(g, lambda x, y: x + y)
    with pytest.raises(DomainError):
        sphere_sup(u.values, g, (0.5, 0.5), 0.6)


def test_growth_fit_quadratic_slope_exact():
    g = build_grid([(0, 2), (0, 2)], [64, 64])
    u = field_from_function(g, lambda x, y: (x - 1) ** 2 + (y - 1) ** 2)
    fit = growth_fit(u, (1.0, 1.0), [0.1, 0.2, 0.3, 0.4])
    # cubic interpolation reproduces the quadratic exactly
    assert fit.slope == pytest.approx(2.0, abs=1e-10)
    assert fit.c1_growth == pytest.approx(1.0, rel=1e-8)
    assert fit.grad_slope == pytest.approx(1.0, abs=1e-3)


def test_growth_fit_power_three_halves():
    g = build_grid([(0, 2), (0, 2)], [256, 256])
    u = field_from_function(
        g, lambda x, y: ((x - 1) ** 2 + (y - 1) ** 2) ** 0.75
    )
    fit = growth_fit(u, (1.0, 1.0), [0.1, 0.2, 0.3, 0.4])
    assert fit.slope == pytest.approx(1.5, abs=0.02)


def test_growth_fit_needs_nonzero_radii():
    g = build_grid([(0, 1), (0, 1)], [32, 32])
    with pytest.raises(FitError):
        growth_fit(zero_field(g), (0.5, 0.5), [0.1, 0.2, 0.3, 0.4])


def _point_fb(grid, y):
    lows = np.array([lo for lo, _ in grid.extents])
    cell = np.floor((np.asarray(y) - lows) / np.array(grid.h)).astype(int)
    cells = cell[None, :]
    points = lows + (cells + 0.5) * np.array(grid.h)
    return FreeBoundary(grid, cells, points)


def test_nondegeneracy_barrier_margin_is_one():
    # the barrier field C2 |x-y|^{p/(p-1)} meets the bound with margin
    # exactly 1 at its own center
    g = build_grid([(0, 2), (0, 2)], [64, 64])
    params = _params()
    c2 = c2_constant(params, 1.0)
    y = (1.0 + 0.5 * g.h[0], 1.0 + 0.5 * g.h[1])  # a cell center
    u = field_from_function(
        g, lambda x, z: c2 * ((x - y[0]) ** 2 + (z - y[1]) ** 2)
    )
    fb = _point_fb(g, y)
    rep = nondegeneracy_check(u, fb, [0.2, 0.4], params, a1=1.0, slack=0.999)
    assert rep.all_pass
    for e in rep.entries:
        assert e.margin == pytest.approx(1.0, abs=1e-10)


def test_nondegeneracy_scaling_with_amplitude():
    g = build_grid([(0, 2), (0, 2)], [64, 64])
    params = _params()
    c2 = c2_constant(params, 1.0)
    y = (1.0 + 0.5 * g.h[0], 1.0 + 0.5 * g.h[1])
    u = field_from_function(
        g, lambda x, z: 2.0 * c2 * ((x - y[0]) ** 2 + (z - y[1]) ** 2)
    )
    rep = nondegeneracy_check(u, _point_fb(g, y), [0.2], params, a1=1.0)
    assert rep.entries[0].margin == pytest.approx(2.0, abs=1e-9)


def test_nondegeneracy_rejects_tiny_radii():
    g = build_grid([(0, 2), (0, 2)], [64, 64])
    params = _params()
    fb = _point_fb(g, (1.0, 1.0))
    with pytest.raises(ParameterError):
        nondegeneracy_check(zero_field(g), fb, [g.h[0]], params, a1=1.0)


def test_barrier_comparison_quarter_of_bound():
    # unit coefficient, p=2: the barrier divergence is the constant
    # 4 C2 = 0.25, safely below m1/2 = 0.5
    g = build_grid([(0, 2), (0, 2)], [64, 64])
    a = eval_coefficient(unit_coeff, g)
    check = barrier_comparison_check(_params(), a, (1.0, 1.0), 0.5)
    assert check.passed
    assert check.max_divergence == pytest.approx(0.25, abs=1e-8)
    assert check.bound == pytest.approx(0.5 + 5 * g.h[0])


def test_barrier_comparison_scales_linearly_in_m1():
    g = build_grid([(0, 2), (0, 2)], [64, 64])
    a = eval_coefficient(unit_coeff, g)
    c1 = barrier_comparison_check(_params(m1=1.0), a, (1.0, 1.0), 0.5)
    c4 = barrier_comparison_check(_params(m1=4.0), a, (1.0, 1.0), 0.5)
    # at p=2 the barrier divergence is proportional to m1
    assert c4.max_divergence == pytest.approx(4.0 * c1.max_divergence, rel=1e-8)
    assert c4.passed


def test_barrier_comparison_radius_domain_checks():
    g = build_grid([(0, 2), (0, 2)], [64, 64])
    stiff = eval_coefficient(lambda x, y: 1.0 + 3.0 * x, g)
    with pytest.raises(DomainError):
        barrier_comparison_check(_params(), stiff, (1.0, 1.0), 0.5)
    a = eval_coefficient(unit_coeff, g)
    with pytest.raises(DomainError):
        barrier_comparison_check(_params(), a, (0.1, 0.1), 0.5)


def test_degiorgi_threshold_sequence():
    # at the critical value g0 = 1/2 (C=1, D=2, zeta=1) the iteration is
    # exactly g_n = 2^{-(n+1)}
    trace = degiorgi_iterate(1.0, 2.0, 1.0, 0.5, 40)
    assert trace.threshold == pytest.approx(0.5)
    for n, g in enumerate(trace.sequence):
        assert g == pytest.approx(2.0 ** -(n + 1), rel=1e-12)
    assert trace.converged


def test_degiorgi_above_threshold_diverges():
    trace = degiorgi_iterate(1.0, 2.0, 1.0, 0.6, 200)
    assert not trace.converged
    assert trace.sequence[-1] > 1e100


def test_degiorgi_below_threshold_converges_fast():
    trace = degiorgi_iterate(1.0, 2.0, 1.0, 0.25, 30)
    assert trace.converged
    assert trace.sequence[-1] < 1e-50


def test_degiorgi_zero_start():
    trace = degiorgi_iterate(2.0, 3.0, 0.5, 0.0, 5)
    assert trace.converged
    assert all(g == 0.0 for g in trace.sequence)


def test_degiorgi_validation():
    for bad in ((0.0, 2.0, 1.0, 0.1), (1.0, 1.0, 1.0, 0.1),
                (1.0, 2.0, 0.0, 0.1), (1.0, 2.0, 1.0, -0.1)):
        with pytest.raises(ParameterError):
            degiorgi_iterate(*bad, 10)


def test_pointwise_c3_value():
    assert pointwise_c3(_params(), 1.0) == pytest.approx(8.0)
    assert pointwise_c3(_params(p=3.0), 2.0) == pytest.approx(2 * 4 * 4 * 4)


def test_pointwise_check_zero_field():
    g = build_grid([(0, 1), (0, 1)], [16, 16])
    rep = pointwise_inequality_check(zero_field(g), 1.0, _params())
    assert rep.max_ratio == 0.0


def test_uniform_bounds_empty_continuation():
    cont = ContinuationResult(schedule=(), solutions=(), sup_norm_track=(),
                              grad_sup_track=(), drift=())
    with pytest.raises(ParameterError):
        uniform_bounds_report(cont)


def test_uniform_bounds_benchmark_track(bench_cont):
    rep = uniform_bounds_report(bench_cont)
    assert len(rep.u_track) == 6
    assert rep.c1 > 0
    assert rep.relative_spread < 0.10


def test_holder_probe_validation():
    g = build_grid([(0, 1), (0, 1)], [16, 16])
    u = field_from_function(g, lambda x, y: x * y)
    with pytest.raises(ParameterError):
        holder_seminorm_probe(u, [1.5])


def test_holder_probe_smooth_field_stable():
    # a quadratic has Lipschitz gradient: every exponent up to 1 is stable
    # under refinement
    def f(x, y):
        return (x - 0.5) ** 2 + (y - 0.5) ** 2

    probes = {}
    for n in (16, 64):
        g = build_grid([(0, 1), (0, 1)], [n, n])
        probes[n] = holder_seminorm_probe(
            field_from_function(g, f), [0.5, 0.9, 1.0], n_pairs=2000
        )
    assert stable_holder_exponent(probes[16], probes[64]) == 1.0


def test_holder_probe_kink_field_caps_exponent():
    # grad of max(x-1/2,0)^{3/2} is only C^{0,1/2}; under a 64x grid
    # refinement the alpha=0.9 seminorm blows up while alpha=0.5 stays put
    def f(x, y):
        return np.maximum(x - 0.5, 0.0) ** 1.5

    probes = {}
    for n in (16, 1024):
        g = build_grid([(0, 1), (0, 1)], [n, n])
        u = field_from_function(g, f)
        # sample inside a thin strip around the kink so pairs at lattice
        # separation straddle it
        x = g.meshgrid()[0]
        win = np.abs(x - 0.5) <= 3 * g.h[0]
        win[0:2, :] = win[-2:, :] = win[:, 0:2] = win[:, -2:] = False
        probes[n] = holder_seminorm_probe(
            u, [0.5, 0.9], window=win, n_pairs=20000, seed=2
        )
    assert stable_holder_exponent(probes[16], probes[1024]) == 0.5
