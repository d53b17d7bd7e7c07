"""Smooth monotone Heaviside approximation and its primitive.

The smoothing profile is the quintic smoothstep q(t) = 6t^5 - 15t^4 + 10t^3,
which is C^2 across the endpoints so the Newton linearization of the penalty
derivative stays continuous.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


def _check_eps(eps: float) -> None:
    if not eps > 0:
        raise ParameterError(f"penalty width eps must be positive, got {eps}")


def chi_eps(s, eps: float):
    """Smoothed characteristic function: 0 for s <= 0, 1 for s >= eps."""
    _check_eps(eps)
    t = np.clip(np.asarray(s, dtype=float) / eps, 0.0, 1.0)
    out = t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
    return out if out.ndim else float(out)


def chi_eps_prime(s, eps: float):
    """Derivative of chi_eps; nonnegative, supported on (0, eps)."""
    _check_eps(eps)
    t = np.clip(np.asarray(s, dtype=float) / eps, 0.0, 1.0)
    out = 30.0 * t * t * (1.0 - t) ** 2 / eps
    return out if out.ndim else float(out)


def phi_eps(s, eps: float):
    """Exact antiderivative of chi_eps, with phi_eps(-inf) = 0.

    Equals 0 for s <= 0, eps * Q(s/eps) with Q(t) = t^6 - 3t^5 + 2.5t^4 on
    the smoothing interval, and s - eps/2 for s >= eps.
    """
    _check_eps(eps)
    arr = np.asarray(s, dtype=float)
    t = np.clip(arr / eps, 0.0, 1.0)
    mid = eps * t ** 4 * (2.5 + t * (-3.0 + t))
    out = np.where(arr >= eps, arr - 0.5 * eps, mid)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PenaltyFn:
    """Bundled penalty family at a fixed smoothing width."""

    eps: float

    def __post_init__(self):
        _check_eps(self.eps)

    def chi(self, s):
        return chi_eps(s, self.eps)

    def chi_prime(self, s):
        return chi_eps_prime(s, self.eps)

    def phi(self, s):
        return phi_eps(s, self.eps)
