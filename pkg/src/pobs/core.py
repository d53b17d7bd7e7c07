"""Problem data, uniform Cartesian grids, and scalar-field containers.

All types here are immutable after construction and shared read-only by the
operator, energy, solver, and geometry modules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import CoefficientError, ConfigurationError, ParameterError


@dataclass(frozen=True)
class ProblemParams:
    """Scalar problem data for the penalized p-obstacle problem.

    The exponent window is 2 <= p < lambda, with lambda additionally below
    the critical exponent dim*p/(dim - p) whenever dim >= 3 and p < dim.
    """

    p: float
    lam: float
    m1: float
    m2: float
    dim: int
    eps: float
    delta_reg: float = 1e-8
    tol_res: float = 1e-8

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ParameterError(f"dim must be 1, 2, or 3, got {self.dim}")
        if not self.p >= 2:
            raise ParameterError(f"need p >= 2, got p={self.p}")
        if not self.p < self.lam:
            raise ParameterError(f"need p < lambda, got p={self.p}, lambda={self.lam}")
        if self.dim >= 3 and self.p < self.dim:
            crit = self.dim * self.p / (self.dim - self.p)
            if not self.lam < crit:
                raise ParameterError(
                    f"lambda={self.lam} is not subcritical (critical exponent {crit})"
                )
        if not self.m1 > 0:
            raise ParameterError(f"need m1 > 0, got {self.m1}")
        if not self.m2 > 0:
            raise ParameterError(f"need m2 > 0, got {self.m2}")
        if not 0 < self.eps < 1:
            raise ParameterError(f"need 0 < eps < 1, got {self.eps}")
        if not self.delta_reg >= 0:
            raise ParameterError(f"need delta_reg >= 0, got {self.delta_reg}")
        if not self.tol_res > 0:
            raise ParameterError(f"need tol_res > 0, got {self.tol_res}")


@dataclass(frozen=True)
class Grid:
    """Uniform Cartesian grid over an axis-aligned box with Dirichlet-zero boundary.

    Nodes along axis k sit at lo[k] + i * h[k] for i = 0..cells[k]; the node
    coordinate is always computed multiplicatively, never by accumulation.
    """

    extents: tuple[tuple[float, float], ...]
    cells: tuple[int, ...]
    h: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        if len(self.extents) != len(self.cells):
            raise ConfigurationError("extents and cells must have the same length")
        if not 1 <= len(self.cells) <= 3:
            raise ConfigurationError("grid dimension must be 1, 2, or 3")
        spacings = []
        for (lo, hi), n in zip(self.extents, self.cells):
            if not hi > lo:
                raise ConfigurationError(f"degenerate interval [{lo}, {hi}]")
            if n < 4:
                raise ConfigurationError(f"need at least 4 cells per axis, got {n}")
            spacings.append((hi - lo) / n)
        object.__setattr__(self, "h", tuple(spacings))

    @property
    def dim(self) -> int:
        return len(self.cells)

    @property
    def shape(self) -> tuple[int, ...]:
        """Node-array shape (cells + 1 per axis)."""
        return tuple(n + 1 for n in self.cells)

    @property
    def cellvol(self) -> float:
        return float(np.prod(self.h))

    def axis_coords(self, k: int) -> np.ndarray:
        lo, _ = self.extents[k]
        return lo + np.arange(self.cells[k] + 1) * self.h[k]

    def meshgrid(self) -> list[np.ndarray]:
        """Node coordinate arrays, one per axis, each of node shape."""
        return list(np.meshgrid(*(self.axis_coords(k) for k in range(self.dim)),
                                indexing="ij"))

    def node(self, index: Sequence[int]) -> tuple[float, ...]:
        return tuple(lo + i * dh
                     for (lo, _), i, dh in zip(self.extents, index, self.h))

    def cell_centers(self) -> list[np.ndarray]:
        """Cell-center coordinate arrays (one per axis, cell shape)."""
        axes = []
        for k in range(self.dim):
            lo, _ = self.extents[k]
            axes.append(lo + (np.arange(self.cells[k]) + 0.5) * self.h[k])
        return list(np.meshgrid(*axes, indexing="ij"))

    def interior(self) -> tuple[slice, ...]:
        """Slices selecting interior nodes."""
        return tuple(slice(1, -1) for _ in range(self.dim))

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        for k in range(self.dim):
            idx = [slice(None)] * self.dim
            idx[k] = 0
            mask[tuple(idx)] = True
            idx[k] = -1
            mask[tuple(idx)] = True
        return mask


def build_grid(extents: Sequence[Sequence[float]], cells: Sequence[int]) -> Grid:
    """Construct a grid; raises ConfigurationError on degenerate input."""
    return Grid(tuple((float(lo), float(hi)) for lo, hi in extents),
                tuple(int(n) for n in cells))


@dataclass(frozen=True)
class GridField:
    """Scalar field sampled at grid nodes."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            raise ConfigurationError(
                f"field shape {vals.shape} does not match grid shape {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ConfigurationError("field values must be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def with_values(self, values: np.ndarray) -> "GridField":
        return GridField(self.grid, values)


def zero_field(grid: Grid) -> GridField:
    return GridField(grid, np.zeros(grid.shape))


def field_from_function(grid: Grid, fn: Callable[..., np.ndarray]) -> GridField:
    """Sample a closed-form function of the coordinates at the nodes."""
    return GridField(grid, np.asarray(fn(*grid.meshgrid()), dtype=float)
                     * np.ones(grid.shape))


@dataclass(frozen=True)
class CoefficientField:
    """Coefficient a(x) with certified bounds a0 <= a and C^2-type bound a1.

    a1 bounds |a| together with the magnitudes of its discrete first and
    second differences; the slack relative to the true C^2 norm is one order
    of the grid spacing.
    """

    grid: Grid
    values: np.ndarray
    a0: float
    a1: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            raise ConfigurationError(
                f"coefficient shape {vals.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise CoefficientError("coefficient values must be finite")
        if not np.all(vals > 0):
            raise CoefficientError("coefficient must be strictly positive everywhere")
        if not 0 < self.a0 <= float(np.min(vals)) * (1 + 1e-12):
            raise CoefficientError(f"a0={self.a0} is not a lower bound for the coefficient")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def _difference_bounds(vals: np.ndarray, grid: Grid) -> float:
    """Max magnitude over the field and its discrete first/second differences."""
    bound = float(np.max(np.abs(vals)))
    for k in range(grid.dim):
        d1 = np.diff(vals, axis=k) / grid.h[k]
        bound = max(bound, float(np.max(np.abs(d1))))
        d2 = np.diff(vals, n=2, axis=k) / grid.h[k] ** 2
        if d2.size:
            bound = max(bound, float(np.max(np.abs(d2))))
    return bound


def eval_coefficient(spec: Callable[..., np.ndarray], grid: Grid) -> CoefficientField:
    """Evaluate a closed-form coefficient on the grid and certify its bounds.

    a0 is the nodal minimum; a1 bounds the nodal values and all discrete
    first/second difference magnitudes.
    """
    vals = np.asarray(spec(*grid.meshgrid()), dtype=float) * np.ones(grid.shape)
    if not np.all(np.isfinite(vals)):
        raise CoefficientError("coefficient evaluates to a non-finite value")
    if not np.all(vals > 0):
        raise CoefficientError("coefficient must be positive at every node")
    a0 = float(np.min(vals))
    a1 = _difference_bounds(vals, grid)
    return CoefficientField(grid, vals, a0=a0, a1=a1)
