"""Regularized Newton solver for the penalized problem and the eps-continuation.

The Jacobian is assembled by finite differences with graph coloring: the
face stencil couples a node only to nodes within a +-2 box of offsets, so a
stride-5 coloring per axis identifies every Jacobian column from a handful
of residual evaluations.  Newton steps carry a Levenberg-Marquardt shift
adapted to the 2-norm merit.  Because the sought critical point is a saddle
of the energy, plain descent cannot reach it; when Newton stalls far from a
root the iterate is restarted on the scaling ray at the energy maximizer
t* = argmax_t J(t * u), which sits in the basin of the mountain-pass
solution, with a short ladder of restart scalings before giving up.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .core import CoefficientField, GridField, ProblemParams
from .energy import EnergyBreakdown, energy, ray_profile
from .errors import NumericError, SeedError
from .operator import residual_values
from .stencil import centered_gradient

_COLOR_STRIDE = 5  # stencil offsets stay within +-2 per axis


@dataclass(frozen=True)
class BumpSpec:
    """Closed-form seed bump: cos^2 profile supported on a ball."""

    center: tuple[float, ...]
    radius: float
    amplitude: float = 1.0

    def sample(self, grid) -> np.ndarray:
        coords = grid.meshgrid()
        r2 = sum((x - c) ** 2 for x, c in zip(coords, self.center))
        r = np.sqrt(r2)
        vals = np.where(
            r < self.radius,
            self.amplitude * np.cos(0.5 * np.pi * r / self.radius) ** 2,
            0.0,
        )
        vals[grid.boundary_mask()] = 0.0
        return vals


def default_seed_spec(grid) -> BumpSpec:
    center = tuple(0.5 * (lo + hi) for lo, hi in grid.extents)
    radius = 0.35 * min(hi - lo for lo, hi in grid.extents)
    return BumpSpec(center=center, radius=radius)


@dataclass(frozen=True)
class SolveResult:
    u: GridField
    residual_norm: float
    energy: EnergyBreakdown
    iterations: int
    converged: bool
    nontrivial: bool
    min_before_clamp: float = 0.0


@dataclass(frozen=True)
class ContinuationResult:
    schedule: tuple[float, ...]
    solutions: tuple[SolveResult, ...]
    sup_norm_track: tuple[float, ...]
    grad_sup_track: tuple[float, ...]
    drift: tuple[float, ...]
    failure_index: Optional[int] = None


def find_descent_seed(
    a: CoefficientField,
    params: ProblemParams,
    seed_spec: Optional[BumpSpec] = None,
    max_doublings: int = 60,
) -> tuple[GridField, float]:
    """Normalized bump w0 and ray parameter t0 with J_eps(t0 * w0) < 0."""
    grid = a.grid
    spec = seed_spec or default_seed_spec(grid)
    vals = spec.sample(grid)
    if not np.any(vals > 0):
        raise SeedError("seed bump has no positive part on this grid")
    vals = vals / np.max(vals)
    w0 = GridField(grid, vals)
    t = 1.0
    for _ in range(max_doublings):
        (j,) = ray_profile(w0, a, params, [t])
        if j < 0:
            return w0, t
        t *= 2.0
    raise SeedError(
        f"no energy sign change within {max_doublings} doublings; "
        "parameter set gives no mountain-pass ray"
    )


def _interior_multi_indices(shape: tuple[int, ...]) -> np.ndarray:
    grids = np.meshgrid(*(np.arange(1, n - 1) for n in shape), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def _assemble_jacobian(
    u: np.ndarray,
    a: CoefficientField,
    params: ProblemParams,
    base_res: np.ndarray,
) -> sp.csr_matrix:
    """Forward-difference Jacobian of the interior residual, via coloring."""
    grid = a.grid
    shape = grid.shape
    nd = len(shape)
    interior = _interior_multi_indices(shape)
    full_flat = np.ravel_multi_index(interior.T, shape)
    dof_of_flat = -np.ones(int(np.prod(shape)), dtype=np.int64)
    dof_of_flat[full_flat] = np.arange(len(full_flat))

    tau = 1e-7 * (1.0 + float(np.max(np.abs(u))))
    offsets = list(itertools.product(range(-2, 3), repeat=nd))
    rows, cols, vals = [], [], []

    color_of = np.zeros(len(interior), dtype=np.int64)
    for k in range(nd):
        color_of = color_of * _COLOR_STRIDE + interior[:, k] % _COLOR_STRIDE

    for color in np.unique(color_of):
        nodes = interior[color_of == color]
        up = u.copy()
        up[tuple(nodes.T)] += tau
        dres = (residual_values(up, a, params) - base_res) / tau
        for off in offsets:
            target = nodes + np.asarray(off)
            ok = np.ones(len(target), dtype=bool)
            for k in range(nd):
                ok &= (target[:, k] >= 1) & (target[:, k] <= shape[k] - 2)
            if not np.any(ok):
                continue
            tgt = target[ok]
            src = nodes[ok]
            entries = dres[tuple(tgt.T)]
            nz = entries != 0.0
            if not np.any(nz):
                continue
            rows.append(dof_of_flat[np.ravel_multi_index(tgt[nz].T, shape)])
            cols.append(dof_of_flat[np.ravel_multi_index(src[nz].T, shape)])
            vals.append(entries[nz])

    n = len(interior)
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    )


def _ray_energy_argmax(
    u: np.ndarray,
    a: CoefficientField,
    params: ProblemParams,
    lo: float = 1e-3,
    hi: float = 1.0,
) -> float:
    """Maximizer of t -> J_eps(t * u) over the scaling ray."""
    grid = a.grid

    def j(t):
        e = energy(GridField(grid, t * u), a, params).total
        return e if np.isfinite(e) else -np.inf

    while j(hi) > j(0.9 * hi) and hi < 1e8:
        hi *= 2.0
    for _ in range(200):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if j(m1) < j(m2):
            lo = m1
        else:
            hi = m2
        if hi - lo < 1e-12 * hi:
            break
    return 0.5 * (lo + hi)


def solve_penalized(
    a: CoefficientField,
    params: ProblemParams,
    init: GridField,
    max_newton: int = 200,
) -> SolveResult:
    """Levenberg-Marquardt-regularized Newton with ray-restart globalization."""
    grid = a.grid
    if init.grid != grid:
        raise NumericError("initial guess lives on a different grid")
    inner = grid.interior()
    ident = sp.identity(int(np.prod([n - 2 for n in grid.shape])), format="csr")

    def res_norm2(vals_res):
        return float(np.linalg.norm(vals_res[inner]))

    u0 = init.values.copy()
    u0[grid.boundary_mask()] = 0.0
    restart_fracs = (None, 1.0, 1.05, 1.1, 0.95)

    best = None  # (norm, u, res, iterations)
    total_iters = 0
    for attempt, frac in enumerate(restart_fracs):
        if frac is None:
            u = u0.copy()
        else:
            # Restart on the scaling ray at the energy maximizer: the saddle
            # we seek is downhill in every direction from there.
            tstar = _ray_energy_argmax(u0, a, params)
            u = (frac * tstar) * u0
        res = residual_values(u, a, params)
        norm = res_norm2(res)
        mu = 1e-3
        iters = 0
        while norm > params.tol_res and iters < max_newton:
            if not np.all(np.isfinite(u)):
                break
            # Gauss-Newton normal equations with a Levenberg-Marquardt shift:
            # (J^T J + mu I) delta = -J^T r always yields a descent direction
            # of |r|^2 even where J is indefinite.
            J = _assemble_jacobian(u, a, params, res).tocsr()
            jt = J.T.tocsr()
            rhs = -jt @ res[inner].ravel()
            jtj = (jt @ J).tocsc()
            accepted = False
            for _ in range(15):
                try:
                    delta = spla.spsolve(jtj + mu * ident, rhs)
                except RuntimeError:
                    delta = None
                if delta is not None and np.all(np.isfinite(delta)):
                    step = np.zeros(grid.shape)
                    step[inner] = delta.reshape(step[inner].shape)
                    trial = u + step
                    tres = residual_values(trial, a, params)
                    tnorm = res_norm2(tres)
                    if np.isfinite(tnorm) and tnorm < norm:
                        u, res, norm = trial, tres, tnorm
                        mu = max(mu / 3.0, 1e-4)
                        accepted = True
                        break
                mu *= 4.0
            iters += 1
            if not accepted:
                break
        total_iters += iters
        if best is None or norm < best[0]:
            best = (norm, u, res, total_iters)
        sup_inf = float(np.max(np.abs(u[inner]))) if u[inner].size else 0.0
        if norm <= params.tol_res and sup_inf > 10.0 * params.eps:
            break  # converged to a nontrivial root; no more restarts
    norm, u, res, newton_iters = best

    min_before = float(np.min(u))
    u = np.maximum(u, 0.0)
    res = residual_values(u, a, params)
    norm = float(np.max(np.abs(res[inner]))) if u[inner].size else 0.0
    converged = norm <= params.tol_res
    sup = float(np.max(np.abs(u)))
    field = GridField(grid, u)
    return SolveResult(
        u=field,
        residual_norm=norm,
        energy=energy(field, a, params),
        iterations=newton_iters,
        converged=converged,
        nontrivial=sup > 10.0 * params.eps,
        min_before_clamp=min_before,
    )


def interior_window_mask(grid, margin_frac: float = 0.1) -> np.ndarray:
    """Nodes at least margin_frac of each axis length away from the boundary."""
    coords = grid.meshgrid()
    mask = np.ones(grid.shape, dtype=bool)
    for k, x in enumerate(coords):
        lo, hi = grid.extents[k]
        m = margin_frac * (hi - lo)
        mask &= (x >= lo + m) & (x <= hi - m)
    return mask


def continuation_solve(
    a: CoefficientField,
    params: ProblemParams,
    eps0: float,
    factor: float,
    steps: int,
    seed_spec: Optional[BumpSpec] = None,
    margin_frac: float = 0.1,
) -> ContinuationResult:
    """Solve along the schedule eps_k = eps0 * factor^k with warm starts."""
    if not 0 < eps0 < 1:
        raise NumericError(f"need 0 < eps0 < 1, got {eps0}")
    if not 0 < factor < 1:
        raise NumericError(f"need factor in (0,1), got {factor}")
    if steps < 1:
        raise NumericError(f"need steps >= 1, got {steps}")

    grid = a.grid
    window = interior_window_mask(grid, margin_frac)
    schedule, results, sups, gsups, drifts = [], [], [], [], []
    prev_u = None
    failure = None
    for k in range(steps):
        eps_k = eps0 * factor ** k
        pk = replace(params, eps=eps_k)
        if prev_u is None:
            w0, t0 = find_descent_seed(a, pk, seed_spec)
            init = GridField(grid, t0 * w0.values)
        else:
            init = GridField(grid, prev_u)
        result = solve_penalized(a, pk, init)
        schedule.append(eps_k)
        results.append(result)
        uv = result.u.values
        sups.append(float(np.max(np.abs(uv[window]))))
        gmag = np.sqrt(sum(c * c for c in centered_gradient(uv, grid.h)))
        gsups.append(float(np.max(gmag[window])))
        if prev_u is not None:
            drifts.append(float(np.max(np.abs(uv - prev_u))))
        if not result.converged:
            failure = k
            break
        prev_u = uv
    return ContinuationResult(
        schedule=tuple(schedule),
        solutions=tuple(results),
        sup_norm_track=tuple(sups),
        grad_sup_track=tuple(gsups),
        drift=tuple(drifts),
        failure_index=failure,
    )
