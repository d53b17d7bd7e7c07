"""Quantitative checks on computed fields: growth and non-degeneracy rates
at the free boundary, barrier comparison, the geometric-series recursion,
the penalized pointwise inequality, and uniform-bound reporting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from .core import CoefficientField, GridField, ProblemParams
from .errors import DomainError, FitError, ParameterError
from .freeboundary import FreeBoundary
from .operator import apply_divergence_form
from .penalty import chi_eps
from .stencil import gradient_magnitude, hessian_frobenius


def c2_constant(params: ProblemParams, a1: float) -> float:
    """Non-degeneracy constant ((p-1)/p) (m1 / (2 N (a1+1)))^{1/(p-1)}."""
    if not a1 > 0:
        raise ParameterError(f"need a1 > 0, got {a1}")
    p = params.p
    return (p - 1.0) / p * (params.m1 / (2.0 * params.dim * (a1 + 1.0))) ** (
        1.0 / (p - 1.0)
    )


def r2_bound(params: ProblemParams, a1: float, c1_growth: float, r1: float) -> float:
    """Admissible-radius bound min{r1, 1/a1, (m1/(2 m2 C1^{lam-1}))^{(p-1)/(p(lam-1))}}."""
    if not c1_growth > 0:
        raise ParameterError(f"need c1_growth > 0, got {c1_growth}")
    if not r1 > 0:
        raise ParameterError(f"need r1 > 0, got {r1}")
    p, lam = params.p, params.lam
    third = (params.m1 / (2.0 * params.m2 * c1_growth ** (lam - 1.0))) ** (
        (p - 1.0) / (p * (lam - 1.0))
    )
    return min(r1, 1.0 / a1, third)


def _sphere_directions(dim: int, n: int, seed: int = 0) -> np.ndarray:
    if dim == 2:
        th = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        return np.stack([np.cos(th), np.sin(th)], axis=-1)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _interp(values: np.ndarray, grid, points: np.ndarray) -> np.ndarray:
    """Cubic-spline interpolation of node values at physical points."""
    lows = np.array([lo for lo, _ in grid.extents])
    idx = (points - lows) / np.array(grid.h)
    return ndimage.map_coordinates(values, idx.T, order=3, mode="nearest")


def sphere_sup(values: np.ndarray, grid, center, r: float, n_dirs: int = 256) -> float:
    """sup of the field over the sphere of radius r about center."""
    center = np.asarray(center, dtype=float)
    for (lo, hi), c in zip(grid.extents, center):
        if c - r < lo or c + r > hi:
            raise DomainError(f"sphere of radius {r} at {tuple(center)} leaves the domain")
    dirs = _sphere_directions(grid.dim, n_dirs)
    pts = center + r * dirs
    return float(np.max(_interp(values, grid, pts)))


@dataclass(frozen=True)
class GrowthFit:
    center: tuple[float, ...]
    radii: tuple[float, ...]
    sup_values: tuple[float, ...]
    slope: float
    c1_growth: float
    grad_slope: float


def growth_fit(u: GridField, center, radii: Sequence[float]) -> GrowthFit:
    """Log-log rate of sup_{sphere r} |u| about a free-boundary point.

    Also fits the rate of the gradient magnitude on the same spheres.
    Radii where the sup vanishes are dropped; at least 4 must remain.
    """
    grid = u.grid
    center = np.asarray(center, dtype=float)
    gmag = gradient_magnitude(u.values, grid.h)
    rs, sups, gsups = [], [], []
    for r in radii:
        s = sphere_sup(np.abs(u.values), grid, center, r)
        if s <= 0:
            continue
        rs.append(float(r))
        sups.append(s)
        gsups.append(sphere_sup(gmag, grid, center, r))
    if len(rs) < 4:
        raise FitError(f"only {len(rs)} radii with nonzero sup; need >= 4")
    logr = np.log(rs)
    slope, logc = np.polyfit(logr, np.log(sups), 1)
    gslope = np.polyfit(logr, np.log(np.maximum(gsups, 1e-300)), 1)[0]
    return GrowthFit(
        center=tuple(center),
        radii=tuple(rs),
        sup_values=tuple(sups),
        slope=float(slope),
        c1_growth=float(np.exp(logc)),
        grad_slope=float(gslope),
    )


@dataclass(frozen=True)
class NondegeneracyEntry:
    center: tuple[float, ...]
    radius: float
    sup_value: float
    margin: float
    passed: bool


@dataclass(frozen=True)
class NondegeneracyReport:
    c2_theoretical: float
    slack: float
    entries: tuple[NondegeneracyEntry, ...]

    @property
    def all_pass(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def min_margin(self) -> float:
        return min(e.margin for e in self.entries)


def nondegeneracy_check(
    u: GridField,
    fb: FreeBoundary,
    radii: Sequence[float],
    params: ProblemParams,
    a1: float,
    slack: float = 0.9,
    max_points: Optional[int] = None,
) -> NondegeneracyReport:
    """Check sup_{sphere r, u>0} u >= slack * C2 r^{p/(p-1)} at boundary points."""
    grid = u.grid
    c2 = c2_constant(params, a1)
    q = params.p / (params.p - 1.0)
    hmax = max(grid.h)
    admissible = [float(r) for r in radii if r >= 4.0 * hmax]
    if not admissible:
        raise ParameterError("no admissible radii (all below 4h)")
    points = fb.points
    if max_points is not None and len(points) > max_points:
        points = points[:: max(1, len(points) // max_points)]
    entries = []
    for y in points:
        for r in admissible:
            s = max(sphere_sup(np.maximum(u.values, 0.0), grid, y, r), 0.0)
            margin = s / (c2 * r ** q)
            entries.append(
                NondegeneracyEntry(tuple(y), r, s, float(margin), margin >= slack)
            )
    return NondegeneracyReport(c2, slack, tuple(entries))


@dataclass(frozen=True)
class BarrierCheck:
    passed: bool
    max_divergence: float
    bound: float
    c2: float


def barrier_comparison_check(
    params: ProblemParams,
    a: CoefficientField,
    y,
    r: float,
    slack_cells: float = 5.0,
) -> BarrierCheck:
    """Discrete divergence of the radial barrier stays below m1/2 + O(h).

    The barrier is v = C2 |x - y|^{p/(p-1)}; its divergence with the actual
    coefficient is compared on the annulus B_r(y) minus B_{2h}(y).
    """
    grid = a.grid
    y = np.asarray(y, dtype=float)
    if r > 1.0 / a.a1:
        raise DomainError(f"radius {r} exceeds 1/a1 = {1.0 / a.a1}")
    for (lo, hi), c in zip(grid.extents, y):
        if c - r < lo or c + r > hi:
            raise DomainError(f"ball of radius {r} at {tuple(y)} leaves the domain")
    c2 = c2_constant(params, a.a1)
    coords = grid.meshgrid()
    rho = np.sqrt(sum((x - c) ** 2 for x, c in zip(coords, y)))
    v = GridField(grid, c2 * rho ** (params.p / (params.p - 1.0)))
    div = apply_divergence_form(v, a, params.p, params.delta_reg)
    hmax = max(grid.h)
    annulus = (rho <= r) & (rho >= 2.0 * hmax) & ~grid.boundary_mask()
    if not np.any(annulus):
        raise DomainError("annulus contains no interior nodes")
    worst = float(np.max(div.values[annulus]))
    bound = params.m1 / 2.0 + slack_cells * hmax
    return BarrierCheck(worst <= bound, worst, bound, c2)


@dataclass(frozen=True)
class RecursionTrace:
    C: float
    D: float
    zeta: float
    g0: float
    sequence: tuple[float, ...]
    threshold: float
    converged: bool


def degiorgi_iterate(
    C: float, D: float, zeta: float, g0: float, n_max: int
) -> RecursionTrace:
    """Equality-case iteration g_{n+1} = C D^n g_n^{1+zeta}.

    The sequence decays to zero iff g0 is below C^{-1/zeta} D^{-1/zeta^2};
    above the threshold it eventually blows up, and iteration stops once
    values exceed 1e100.
    """
    if not C > 0:
        raise ParameterError(f"need C > 0, got {C}")
    if not D > 1:
        raise ParameterError(f"need D > 1, got {D}")
    if not zeta > 0:
        raise ParameterError(f"need zeta > 0, got {zeta}")
    if g0 < 0:
        raise ParameterError(f"need g0 >= 0, got {g0}")
    threshold = C ** (-1.0 / zeta) * D ** (-1.0 / zeta ** 2)
    seq = [float(g0)]
    g = float(g0)
    for n in range(n_max):
        g = C * D ** n * g ** (1.0 + zeta)
        seq.append(g)
        if g > 1e100:
            break
    converged = g0 == 0.0 or seq[-1] < 1e-12 * g0
    return RecursionTrace(C, D, zeta, float(g0), tuple(seq), threshold, converged)


@dataclass(frozen=True)
class PointwiseReport:
    c3: float
    max_ratio: float
    worst_node: tuple[int, ...]


def pointwise_c3(params: ProblemParams, a1: float) -> float:
    """Constant 2 N^2 a1^2 (p-1)^2 in the penalized pointwise inequality."""
    return 2.0 * params.dim ** 2 * a1 ** 2 * (params.p - 1.0) ** 2


def pointwise_inequality_check(
    u_eps: GridField, a1: float, params: ProblemParams
) -> PointwiseReport:
    """Reaction bound (m1 chi_eps - m2 u^{lam-1})^2 <= C3 (|grad u|^{2(p-1)}
    + (|grad u|^{p-2} |D2 u|)^2), checked two cells away from the boundary.
    """
    grid = u_eps.grid
    uv = u_eps.values
    c3 = pointwise_c3(params, a1)
    up = np.maximum(uv, 0.0)
    lhs = (params.m1 * chi_eps(uv, params.eps) - params.m2 * up ** (params.lam - 1.0)) ** 2
    gmag = gradient_magnitude(uv, grid.h)
    hess = hessian_frobenius(uv, grid.h)
    rhs = c3 * (gmag ** (2.0 * (params.p - 1.0)) + (gmag ** (params.p - 2.0) * hess) ** 2)
    window = np.zeros(grid.shape, dtype=bool)
    window[tuple(slice(2, -2) for _ in range(grid.dim))] = True
    ratio = np.zeros_like(lhs)
    live = window & (lhs > 0)
    ratio[live] = lhs[live] / np.maximum(rhs[live], 1e-300)
    worst = np.unravel_index(np.argmax(ratio), ratio.shape)
    return PointwiseReport(c3, float(ratio[worst]), tuple(int(i) for i in worst))


@dataclass(frozen=True)
class UniformBoundsReport:
    c1: float
    u_track: tuple[float, ...]
    grad_track: tuple[float, ...]
    relative_spread: float


def uniform_bounds_report(cont, interior_margin: float = 0.1) -> UniformBoundsReport:
    """Interior sup-norm track of u and grad u along a continuation schedule."""
    from .solver import interior_window_mask

    if not cont.solutions:
        raise ParameterError("empty continuation result")
    grid = cont.solutions[0].u.grid
    window = interior_window_mask(grid, interior_margin)
    u_track, g_track = [], []
    for sol in cont.solutions:
        uv = sol.u.values
        u_track.append(float(np.max(np.abs(uv[window]))))
        g_track.append(float(np.max(gradient_magnitude(uv, grid.h)[window])))
    combined = np.array(u_track) + np.array(g_track)
    c1 = float(np.max(combined))
    lo = float(np.min(combined))
    spread = 0.0 if c1 == 0.0 else (c1 - lo) / c1
    return UniformBoundsReport(c1, tuple(u_track), tuple(g_track), spread)


def holder_seminorm_probe(
    u: GridField,
    alpha_grid: Sequence[float],
    window: Optional[np.ndarray] = None,
    n_pairs: int = 4000,
    seed: int = 0,
) -> dict[float, float]:
    """Empirical Hölder seminorms of grad u over sampled interior node pairs."""
    grid = u.grid
    for alpha in alpha_grid:
        if not 0 < alpha <= 1:
            raise ParameterError(f"need alpha in (0,1], got {alpha}")
    if window is None:
        window = np.zeros(grid.shape, dtype=bool)
        window[tuple(slice(2, -2) for _ in range(grid.dim))] = True
    coords = np.stack([c.ravel() for c in grid.meshgrid()], axis=-1)
    gcomps = np.stack(
        [c.ravel() for c in (np.gradient(u.values, *grid.h))], axis=-1
    )
    live = np.flatnonzero(window.ravel())
    rng = np.random.default_rng(seed)
    i = rng.choice(live, size=n_pairs)
    j = rng.choice(live, size=n_pairs)
    keep = i != j
    i, j = i[keep], j[keep]
    dist = np.linalg.norm(coords[i] - coords[j], axis=1)
    dg = np.linalg.norm(gcomps[i] - gcomps[j], axis=1)
    return {
        float(alpha): float(np.max(dg / dist ** alpha)) for alpha in alpha_grid
    }


def stable_holder_exponent(
    probe_coarse: dict[float, float], probe_fine: dict[float, float]
) -> Optional[float]:
    """Largest alpha whose seminorm changes by at most 2x under refinement."""
    stable = []
    for alpha in sorted(set(probe_coarse) & set(probe_fine)):
        a, b = probe_coarse[alpha], probe_fine[alpha]
        if a > 0 and b > 0 and max(a / b, b / a) <= 2.0:
            stable.append(alpha)
    return max(stable) if stable else None
