"""Face-based difference/averaging primitives and their exact adjoints.

All operators act along one axis of an N-d node array.  Forward differences
and two-point averages map node arrays to face arrays; the centered
difference (one-sided at the two boundary nodes) maps nodes to nodes.  Each
primitive has an exact transpose so energies built from them admit exact
analytic gradients.
"""

from __future__ import annotations

import numpy as np


def _sl(ndim: int, axis: int, s: slice) -> tuple:
    idx = [slice(None)] * ndim
    idx[axis] = s
    return tuple(idx)


def forward_diff(u: np.ndarray, axis: int, h: float) -> np.ndarray:
    """(u[i+1] - u[i]) / h on faces along `axis`."""
    return np.diff(u, axis=axis) / h


def forward_diff_T(v: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Exact transpose of forward_diff: node j receives (v[j-1] - v[j]) / h."""
    shape = list(v.shape)
    shape[axis] += 1
    out = np.zeros(shape)
    out[_sl(out.ndim, axis, slice(None, -1))] -= v / h
    out[_sl(out.ndim, axis, slice(1, None))] += v / h
    return out


def face_avg(u: np.ndarray, axis: int) -> np.ndarray:
    """Two-point average onto faces along `axis`."""
    a = u[_sl(u.ndim, axis, slice(None, -1))]
    b = u[_sl(u.ndim, axis, slice(1, None))]
    return 0.5 * (a + b)


def face_avg_T(v: np.ndarray, axis: int) -> np.ndarray:
    shape = list(v.shape)
    shape[axis] += 1
    out = np.zeros(shape)
    out[_sl(out.ndim, axis, slice(None, -1))] += 0.5 * v
    out[_sl(out.ndim, axis, slice(1, None))] += 0.5 * v
    return out


def centered_diff(u: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Centered difference at nodes, one-sided two-point at the axis ends."""
    out = np.empty_like(u, dtype=float)
    nd = u.ndim
    out[_sl(nd, axis, slice(1, -1))] = (
        u[_sl(nd, axis, slice(2, None))] - u[_sl(nd, axis, slice(None, -2))]
    ) / (2.0 * h)
    out[_sl(nd, axis, slice(0, 1))] = (
        u[_sl(nd, axis, slice(1, 2))] - u[_sl(nd, axis, slice(0, 1))]
    ) / h
    out[_sl(nd, axis, slice(-1, None))] = (
        u[_sl(nd, axis, slice(-1, None))] - u[_sl(nd, axis, slice(-2, -1))]
    ) / h
    return out


def centered_diff_T(v: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Exact transpose of centered_diff (including the one-sided end rows)."""
    out = np.zeros_like(v, dtype=float)
    nd = v.ndim
    inner = v[_sl(nd, axis, slice(1, -1))] / (2.0 * h)
    out[_sl(nd, axis, slice(2, None))] += inner
    out[_sl(nd, axis, slice(None, -2))] -= inner
    first = v[_sl(nd, axis, slice(0, 1))] / h
    out[_sl(nd, axis, slice(0, 1))] -= first
    out[_sl(nd, axis, slice(1, 2))] += first
    last = v[_sl(nd, axis, slice(-1, None))] / h
    out[_sl(nd, axis, slice(-1, None))] += last
    out[_sl(nd, axis, slice(-2, -1))] -= last
    return out


def centered_gradient(u: np.ndarray, h: tuple[float, ...]) -> list[np.ndarray]:
    """Node-centered gradient components (one-sided at the boundary)."""
    return [centered_diff(u, k, h[k]) for k in range(u.ndim)]


def gradient_magnitude(u: np.ndarray, h: tuple[float, ...]) -> np.ndarray:
    comps = centered_gradient(u, h)
    return np.sqrt(sum(c * c for c in comps))


def hessian_frobenius(u: np.ndarray, h: tuple[float, ...]) -> np.ndarray:
    """Frobenius norm of the centered second-difference Hessian.

    Valid at nodes at least two cells from the boundary; entries elsewhere
    use one-sided pieces and should be masked by the caller.
    """
    nd = u.ndim
    acc = np.zeros_like(u, dtype=float)
    for i in range(nd):
        dii = np.zeros_like(u, dtype=float)
        dii[_sl(nd, i, slice(1, -1))] = (
            u[_sl(nd, i, slice(2, None))]
            - 2.0 * u[_sl(nd, i, slice(1, -1))]
            + u[_sl(nd, i, slice(None, -2))]
        ) / h[i] ** 2
        acc += dii * dii
        for j in range(i + 1, nd):
            dij = centered_diff(centered_diff(u, i, h[i]), j, h[j])
            acc += 2.0 * dij * dij
    return np.sqrt(acc)
