"""Shared fixtures: the 64^2 benchmark continuation and a 128^2 refinement.

Both are session-scoped because the continuation solves are the expensive
part of the suite and every geometry test consumes the same fields.
"""

import numpy as np
import pytest

from pobs.core import ProblemParams, build_grid, eval_coefficient
from pobs.freeboundary import default_tau_pos, extract_free_boundary, positivity_set
from pobs.solver import continuation_solve

BENCH_L = 7.0
BENCH_CELLS = 64


def unit_coefficient(*coords):
    return np.ones_like(coords[0])


@pytest.fixture(scope="session")
def bench_grid():
    return build_grid([(0.0, BENCH_L)] * 2, [BENCH_CELLS] * 2)


@pytest.fixture(scope="session")
def bench_coeff(bench_grid):
    return eval_coefficient(unit_coefficient, bench_grid)


@pytest.fixture(scope="session")
def bench_params():
    return ProblemParams(p=2.0, lam=4.0, m1=1.0, m2=1.0, dim=2, eps=0.1)


@pytest.fixture(scope="session")
def bench_cont(bench_coeff, bench_params):
    cont = continuation_solve(bench_coeff, bench_params, eps0=0.1, factor=0.5, steps=6)
    assert cont.failure_index is None, "benchmark continuation failed to converge"
    return cont


@pytest.fixture(scope="session")
def bench_u(bench_cont):
    return bench_cont.solutions[-1].u


@pytest.fixture(scope="session")
def bench_mask(bench_u):
    tau = default_tau_pos(bench_u.grid, 2.0)
    return positivity_set(bench_u, tau)


@pytest.fixture(scope="session")
def bench_fb(bench_mask):
    fb = extract_free_boundary(bench_mask)
    assert len(fb) > 0, "benchmark free boundary is empty"
    return fb


@pytest.fixture(scope="session")
def fine_cont():
    """128^2 refinement of the benchmark, continued down to eps = 0.01."""
    grid = build_grid([(0.0, BENCH_L)] * 2, [128] * 2)
    a = eval_coefficient(unit_coefficient, grid)
    params = ProblemParams(p=2.0, lam=4.0, m1=1.0, m2=1.0, dim=2, eps=0.08)
    cont = continuation_solve(a, params, eps0=0.08, factor=0.5, steps=4)
    assert cont.failure_index is None
    return cont


@pytest.fixture(scope="session")
def fine_u(fine_cont):
    return fine_cont.solutions[-1].u
