"""Discrete free-boundary extraction and geometric estimators.

The free boundary is the set of interior grid cells where the thresholded
positivity mask changes sign across a corner.  On top of it sit three
estimators: porosity (largest ball inside B_r(x) avoiding the boundary),
box-counting of the codimension-one measure, and the integrated Lebesgue
measure of the small-gradient set near a boundary point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import Grid, GridField
from .errors import DomainError, FitError, ParameterError
from .stencil import gradient_magnitude


def default_tau_pos(grid: Grid, p: float) -> float:
    """Positivity threshold h^{p/(p-1)}, matching the boundary growth rate."""
    return float(max(grid.h)) ** (p / (p - 1.0))


@dataclass(frozen=True)
class PositivityMask:
    grid: Grid
    mask: np.ndarray
    tau_pos: float

    def __post_init__(self):
        if self.mask.shape != self.grid.shape:
            raise ParameterError("mask shape does not match grid")


@dataclass(frozen=True)
class FreeBoundary:
    """Interior cells whose corners straddle the positivity threshold."""

    grid: Grid
    cells: np.ndarray  # (k, dim) integer cell indices
    points: np.ndarray  # (k, dim) cell-center coordinates

    def __len__(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class SmallGradientSet:
    sigma: float
    mask: np.ndarray


def positivity_set(u: GridField, tau_pos: float) -> PositivityMask:
    if tau_pos < 0:
        raise ParameterError(f"need tau_pos >= 0, got {tau_pos}")
    return PositivityMask(u.grid, u.values > tau_pos, float(tau_pos))


def small_gradient_set(u: GridField, p: float, sigma: float) -> SmallGradientSet:
    """Nodes with |grad u| <= sigma^{1/(p-1)}."""
    if not 0 < sigma < 1:
        raise ParameterError(f"need sigma in (0,1), got {sigma}")
    gmag = gradient_magnitude(u.values, u.grid.h)
    return SmallGradientSet(float(sigma), gmag <= sigma ** (1.0 / (p - 1.0)))


def extract_free_boundary(mask: PositivityMask) -> FreeBoundary:
    """All interior sign-change cells of the positivity mask, each once."""
    grid = mask.grid
    m = mask.mask
    nd = m.ndim
    corner_slices = [
        tuple(slice(o, n - 1 + o) for o, n in zip(off, m.shape))
        for off in itertools.product((0, 1), repeat=nd)
    ]
    any_pos = np.zeros(tuple(n - 1 for n in m.shape), dtype=bool)
    any_neg = np.zeros_like(any_pos)
    for cs in corner_slices:
        any_pos |= m[cs]
        any_neg |= ~m[cs]
    change = any_pos & any_neg
    # interior cells only: every corner node off the domain boundary
    for k in range(nd):
        idx = [slice(None)] * nd
        idx[k] = 0
        change[tuple(idx)] = False
        idx[k] = -1
        change[tuple(idx)] = False
    cells = np.argwhere(change)
    lows = np.array([lo for lo, _ in grid.extents])
    points = lows + (cells + 0.5) * np.array(grid.h)
    return FreeBoundary(grid, cells, points)


def _cell_center_lattice(grid: Grid):
    axes = [
        lo + (np.arange(n) + 0.5) * h
        for (lo, _), n, h in zip(grid.extents, grid.cells, grid.h)
    ]
    return np.meshgrid(*axes, indexing="ij")


def porosity_estimate(
    fb: FreeBoundary, mask: PositivityMask, radii
) -> dict[float, float]:
    """Per-radius porosity constants of the free boundary.

    delta(x, r) is the largest rho/r such that some ball B_rho(y) with
    y on the cell-center lattice fits inside B_r(x) without meeting the
    free boundary; the reported statistic is min over boundary points x.
    Balls may overhang the domain; candidate centers y stay on the lattice.
    """
    grid = fb.grid
    if len(fb) == 0:
        raise DomainError("empty free boundary: porosity undefined")
    max_side = max(hi - lo for lo, hi in grid.extents)
    for r in radii:
        if not 0 < r <= max_side:
            raise DomainError(f"radius {r} outside (0, {max_side}]")
    on_fb = np.zeros(tuple(grid.cells), dtype=bool)
    on_fb[tuple(fb.cells.T)] = True
    dist = ndimage.distance_transform_edt(~on_fb, sampling=grid.h)
    centers = np.stack([c.ravel() for c in _cell_center_lattice(grid)], axis=-1)
    dist_flat = dist.ravel()
    out = {}
    for r in radii:
        worst = np.inf
        for x in fb.points:
            sep = np.linalg.norm(centers - x, axis=1)
            inside = sep <= r
            clearance = np.minimum(dist_flat[inside], r - sep[inside])
            worst = min(worst, float(np.max(clearance)) / r)
        out[float(r)] = worst
    return out


@dataclass(frozen=True)
class BoxCountResult:
    scales: tuple[float, ...]
    counts: tuple[int, ...]
    dimension: float
    measure_proxy: tuple[float, ...]


def box_count_measure(fb: FreeBoundary, scales) -> BoxCountResult:
    """Box counts of the free boundary, fitted dimension, and N * scale^{N-1}."""
    scales = sorted(float(s) for s in scales)
    if len(scales) < 3:
        raise FitError(f"need at least 3 scales, got {len(scales)}")
    grid = fb.grid
    hmin = min(grid.h)
    if scales[0] < hmin * (1 - 1e-12):
        raise FitError(f"scales must be >= grid spacing {hmin}")
    nd = grid.dim
    lows = np.array([lo for lo, _ in grid.extents])
    counts = []
    for s in scales:
        if len(fb) == 0:
            counts.append(0)
            continue
        boxes = np.floor((fb.points - lows) / s).astype(np.int64)
        counts.append(len(np.unique(boxes, axis=0)))
    positive = [(s, c) for s, c in zip(scales, counts) if c > 0]
    if len(positive) < 3:
        raise FitError("fewer than 3 scales with nonempty boxes")
    logs = np.log([s for s, _ in positive])
    logc = np.log([c for _, c in positive])
    slope = np.polyfit(logs, logc, 1)[0]
    proxy = tuple(c * s ** (nd - 1) for s, c in zip(scales, counts))
    return BoxCountResult(tuple(scales), tuple(counts), float(-slope), proxy)


def gradient_smallness_measure(
    u: GridField,
    p: float,
    sigma: float,
    center,
    r: float,
    s_samples: int = 32,
    tau_pos: float = 0.0,
) -> float:
    """Integral over s in (0,1] of the measure of O_sigma in B_{rs}(center).

    O_sigma = {|grad u| <= sigma^{1/(p-1)}} intersected with {u > tau_pos};
    the measure is cell-counted and the s-integral uses the midpoint rule.
    Pass the same tau_pos as positivity_set so the penalized solution's
    small positive tail outside the support does not register as a
    zero-gradient region.
    """
    grid = u.grid
    if not 0 < sigma < 1:
        raise ParameterError(f"need sigma in (0,1), got {sigma}")
    if s_samples < 1:
        raise ParameterError(f"need s_samples >= 1, got {s_samples}")
    center = np.asarray(center, dtype=float)
    for (lo, hi), c in zip(grid.extents, center):
        if c - r < lo or c + r > hi:
            raise DomainError(f"ball of radius {r} at {tuple(center)} leaves the domain")
    gset = small_gradient_set(u, p, sigma)
    eligible = gset.mask & (u.values > tau_pos)
    coords = np.stack([c.ravel() for c in grid.meshgrid()], axis=-1)
    sep = np.linalg.norm(coords - center, axis=1)[eligible.ravel()]
    vol = grid.cellvol
    total = 0.0
    for k in range(s_samples):
        s = (k + 0.5) / s_samples
        total += vol * int(np.count_nonzero(sep <= r * s))
    return total / s_samples
