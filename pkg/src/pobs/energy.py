"""Penalized energy, its first variation, and mountain-pass ray diagnostics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import CoefficientField, Grid, GridField, ProblemParams
from .errors import ParameterError, SeedError, ShapeError
from .operator import grad_energy_and_gradient, residual
from .penalty import phi_eps
from .stencil import centered_gradient


@dataclass(frozen=True)
class EnergyBreakdown:
    """The three terms of the penalized energy and their sum."""

    gradient_term: float
    penalty_term: float
    reaction_term: float

    @property
    def total(self) -> float:
        return self.gradient_term + self.penalty_term + self.reaction_term


def _check_pair(u: GridField, a: CoefficientField) -> None:
    if u.grid != a.grid:
        raise ShapeError("field and coefficient live on different grids")


def energy(u: GridField, a: CoefficientField, params: ProblemParams) -> EnergyBreakdown:
    """Discrete penalized energy using the operator module's face stencil.

    The gradient term shares its quadrature with apply_divergence_form, so
    the first variation of this functional is exactly -residual * cellvol.
    """
    _check_pair(u, a)
    grid = u.grid
    grad_term, _ = grad_energy_and_gradient(
        u.values, a.values, params.p, params.delta_reg, grid.h, grid.cellvol
    )
    vol = grid.cellvol
    penalty_term = params.m1 * vol * float(np.sum(phi_eps(u.values, params.eps)))
    up = np.maximum(u.values, 0.0)
    reaction_term = -(params.m2 / params.lam) * vol * float(np.sum(up ** params.lam))
    return EnergyBreakdown(grad_term, penalty_term, reaction_term)


def energy_gradient(u: GridField, a: CoefficientField, params: ProblemParams) -> GridField:
    """Nodewise first variation of the discrete energy.

    Equals -residual(u) * cellvol identically: the residual is built from the
    same face stencil, so this is a definition, not an approximation.
    """
    res = residual(u, a, params)
    return GridField(u.grid, -res.values * u.grid.cellvol)


def ray_profile(
    w: GridField,
    a: CoefficientField,
    params: ProblemParams,
    t_values: Sequence[float],
) -> list[float]:
    """Energy along the ray t -> J_eps(t * w)."""
    _check_pair(w, a)
    if not np.any(w.values > 0):
        raise SeedError("seed direction has no positive part; reaction term vanishes")
    out = []
    for t in t_values:
        if t < 0:
            raise ParameterError(f"ray parameter must be >= 0, got {t}")
        out.append(energy(GridField(w.grid, t * w.values), a, params).total)
    return out


def mountain_pass_floor(params: ProblemParams, a0: float, sobolev_est: float) -> float:
    """Diagnostic lower bar for candidate mountain-pass critical values.

    Uses the closed form ((lam-p)/(lam p)) a0^{lam/(lam-p)} m2^{p/(p-lam)}
    S^{lam p/(lam-p)} with a numerically estimated embedding constant S.
    """
    if not a0 > 0:
        raise ParameterError(f"need a0 > 0, got {a0}")
    if not sobolev_est > 0:
        raise ParameterError(f"need sobolev_est > 0, got {sobolev_est}")
    p, lam, m2 = params.p, params.lam, params.m2
    gap = lam - p
    return (
        gap / (lam * p)
        * a0 ** (lam / gap)
        * m2 ** (p / (p - lam))
        * sobolev_est ** (lam * p / gap)
    )


def estimate_sobolev_constant(
    grid: Grid, p: float, lam: float, iters: int = 300, seed: int = 0
) -> float:
    """Discrete estimate of S = inf ||grad u||_p / ||u||_lam over W0 fields.

    Normalized projected gradient descent on the Rayleigh quotient with
    node-centered gradients; a diagnostic, not a certified constant.
    """
    rng = np.random.default_rng(seed)
    coords = grid.meshgrid()
    bump = np.ones(grid.shape)
    for k, x in enumerate(coords):
        lo, hi = grid.extents[k]
        bump = bump * np.sin(np.pi * (x - lo) / (hi - lo))
    u = bump + 0.01 * rng.standard_normal(grid.shape)
    bmask = grid.boundary_mask()
    u[bmask] = 0.0
    vol = grid.cellvol

    def quotient(v):
        comps = centered_gradient(v, grid.h)
        gmag = np.sqrt(sum(c * c for c in comps))
        num = (vol * np.sum(gmag ** p)) ** (1.0 / p)
        den = (vol * np.sum(np.abs(v) ** lam)) ** (1.0 / lam)
        return num / den

    best = quotient(u)
    step = 0.1
    for _ in range(iters):
        pert = rng.standard_normal(grid.shape)
        pert[bmask] = 0.0
        trial = u + step * pert / np.max(np.abs(pert))
        q = quotient(trial)
        if q < best:
            best, u = q, trial
        else:
            step *= 0.97
            if step < 1e-4:
                break
    return float(best)
