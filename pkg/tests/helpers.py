"""Shared test utilities: finite-difference oracles, an independent
quadrature reference for the similarity kernel, and random problem
generators with controlled well-posedness properties.

Everything here deliberately avoids the library's own evaluation paths
where it serves as an oracle: quad_cdf integrates the defining integral
directly, and the finite-difference routines only consume energies or
gradients as black boxes.
"""
import math

import numpy as np
from scipy.integrate import quad

from stefan import ProblemSpec, energy, gradient


def quad_cdf(x: float) -> float:
    """Kernel reference by adaptive quadrature of the defining integral.

    Integrates outward from 0, where the value is exactly 1/2 by
    symmetry of the integrand, so no infinite interval is involved.
    """
    if x == 0.0:
        return 0.5
    val, _ = quad(
        lambda s: math.exp(-0.25 * s * s),
        0.0,
        x,
        epsabs=1e-14,
        epsrel=1e-13,
        limit=300,
    )
    return 0.5 + val / (2.0 * math.sqrt(math.pi))


def fd_gradient(spec: ProblemSpec, xi, h: float = 1e-6) -> np.ndarray:
    """Central differences of the energy."""
    xi = np.asarray(xi, dtype=float)
    out = np.empty_like(xi)
    for j in range(xi.size):
        step = np.zeros_like(xi)
        step[j] = h
        out[j] = (energy(spec, xi + step) - energy(spec, xi - step)) / (2 * h)
    return out


def fd_hessian(spec: ProblemSpec, xi, h: float = 1e-5) -> np.ndarray:
    """Central differences of the analytic gradient, column by column."""
    xi = np.asarray(xi, dtype=float)
    n = xi.size
    out = np.empty((n, n))
    for j in range(n):
        step = np.zeros_like(xi)
        step[j] = h
        gp = gradient(spec, xi + step)
        gm = gradient(spec, xi - step)
        out[:, j] = (np.asarray(gp) - np.asarray(gm)) / (2 * h)
    return out


def rel_err(got, want) -> float:
    """Componentwise error scaled by max(1, magnitude), reduced to max."""
    got = np.atleast_1d(np.asarray(got, dtype=float))
    want = np.atleast_1d(np.asarray(want, dtype=float))
    scale = np.maximum(1.0, np.abs(want))
    return float(np.max(np.abs(got - want) / scale))


def _arrays(rng: np.random.Generator, n: int):
    jumps = rng.uniform(0.3, 1.5, size=n + 1)
    u0 = rng.uniform(-3.0, -1.0)
    u = np.concatenate(([u0], u0 + np.cumsum(jumps)))
    a = rng.uniform(0.6, 1.6, size=n + 1)
    k = rng.uniform(0.3, 2.0, size=n + 1)
    return u, a, k


def _neighbor_mins(u, a, k, n):
    kappa = k / a**2
    loads = kappa * np.diff(u)  # kappa_i * (u_{i+1} - u_i), i = 0..n
    return np.minimum(loads[1:], loads[:-1]), loads


def random_convex_spec(
    rng: np.random.Generator, n: int, margin_floor: float = 0.05
) -> ProblemSpec:
    """Spec whose convexity margins all clear margin_floor.

    Margins at least 0 also force every coercivity sum positive, so
    these specs are simultaneously coercive.
    """
    u, a, k = _arrays(rng, n)
    mins, _ = _neighbor_mins(u, a, k, n)
    d = 0.5 * (margin_floor - mins) + rng.uniform(0.0, 0.6, size=n)
    return ProblemSpec(u=u, a=a, k=k, d=d)


def random_coercive_spec(rng: np.random.Generator, n: int) -> ProblemSpec:
    """Coercive by termwise positivity of both partial-sum families;
    convexity is not guaranteed (margins may go negative)."""
    u, a, k = _arrays(rng, n)
    mins, _ = _neighbor_mins(u, a, k, n)
    d = -mins + 0.05 + rng.uniform(0.0, 0.4, size=n)
    return ProblemSpec(u=u, a=a, k=k, d=d)


def random_noncoercive_spec(rng: np.random.Generator, n: int) -> ProblemSpec:
    """Every prefix sum is negative: each term of the upper family is
    pushed below zero by a fixed tilt, so the energy is unbounded below
    along the first escape ray (and all others)."""
    u, a, k = _arrays(rng, n)
    kappa = k / a**2
    loads = kappa * np.diff(u)
    d = -loads[:-1] - rng.uniform(0.4, 1.0, size=n)
    return ProblemSpec(u=u, a=a, k=k, d=d)


def random_fronts(rng: np.random.Generator, n: int) -> tuple:
    """Strictly increasing point with |xi_i| <= 3 and gaps >= 0.2."""
    gaps = rng.uniform(0.2, 1.0, size=n)
    xi = np.cumsum(gaps)
    xi = xi - xi.mean() + rng.uniform(-0.4, 0.4)
    return tuple(float(v) for v in xi)
