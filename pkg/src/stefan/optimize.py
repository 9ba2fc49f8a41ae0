"""Damped Newton minimization of the interface energy, plus the slow
reference solvers used to cross-check it.

The energy is smooth on the open cone of increasing interface
positions and blows up (+inf) whenever two interfaces touch, so a line
search that never steps more than a fixed fraction of the way to the
cone boundary keeps every iterate feasible.  When the coercivity
criterion fails the infimum is -inf along explicit escape rays;
``minimize`` detects that regime by watching for iterates that leave a
large box while the energy is still falling, and reports Diverged
instead of grinding to max_iter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import kernel
from .energy import (
    FreeBoundaries,
    Fronts,
    ProblemSpec,
    _fronts,
    energy,
    gradient,
    hessian,
)

__all__ = [
    "SolveOptions",
    "SolveStatus",
    "SolveResult",
    "IterationRecord",
    "NewtonBreakdown",
    "minimize",
    "newton_step",
    "ray_point",
    "single_front_bisection",
    "grid_search",
    "GridSearchResult",
]

_ARMIJO_C = 1e-4
_BACKTRACK = 0.5
_DAMPING_MAX = 1e12
_DIVERGENCE_WINDOW = 10


class NewtonBreakdown(RuntimeError):
    """Raised when no tractable damping renders the model convex."""


@dataclass(frozen=True)
class SolveOptions:
    grad_tol: float = 1e-12
    max_iter: int = 200
    xi_max: float = 1e2
    boundary_fraction: float = 0.9
    damping_min: float = 1e-12

    def __post_init__(self):
        if not self.grad_tol > 0.0:
            raise ValueError("grad_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.xi_max > 0.0:
            raise ValueError("xi_max must be positive")
        if not 0.0 < self.boundary_fraction < 1.0:
            raise ValueError("boundary_fraction must lie in (0, 1)")
        if not self.damping_min > 0.0:
            raise ValueError("damping_min must be positive")


class SolveStatus(str, Enum):
    CONVERGED = "Converged"
    DIVERGED = "Diverged"
    MAX_ITERATIONS = "MaxIterations"


class IterationRecord(NamedTuple):
    iteration: int
    energy: float
    grad_norm: float


@dataclass(frozen=True)
class SolveResult:
    status: SolveStatus
    xi_star: Optional[FreeBoundaries]
    energy_value: float
    grad_norm: float
    iterations: int
    trace: Tuple[IterationRecord, ...]


def newton_step(
    spec: ProblemSpec, xi: Fronts, damping_min: float = 1e-12
) -> Tuple[np.ndarray, float]:
    """Damped Newton direction at a feasible point.

    Solves (H + lam*I) p = -g with lam = 0 when the Hessian is already
    positive definite, otherwise the smallest value of a doubling
    schedule starting at damping_min that makes the factorization
    succeed.  The returned direction always satisfies g.p < 0 unless
    the gradient is zero, in which case p = 0.
    """
    g = gradient(spec, xi)
    h = hessian(spec, xi)
    n = len(g)
    eye = np.eye(n)
    lam = 0.0
    while True:
        try:
            chol = np.linalg.cholesky(h + lam * eye)
        except np.linalg.LinAlgError:
            chol = None
        if chol is not None:
            p = np.linalg.solve(h + lam * eye, -g)
            descent = float(g @ p)
            if descent < 0.0 or not g.any():
                return p, lam
        lam = damping_min if lam == 0.0 else 2.0 * lam
        if lam > _DAMPING_MAX:
            raise NewtonBreakdown(
                f"damping exceeded {_DAMPING_MAX:g} without a usable direction"
            )


def _boundary_cap(x: np.ndarray, p: np.ndarray, fraction: float) -> float:
    """Largest step times `fraction` that keeps the ordering strict."""
    cap = math.inf
    for i in range(len(x) - 1):
        closing = p[i] - p[i + 1]
        if closing > 0.0:
            cap = min(cap, (x[i + 1] - x[i]) / closing)
    return fraction * cap


def _default_start(spec: ProblemSpec) -> np.ndarray:
    abar = sum(spec.a) / len(spec.a)
    n = spec.n
    return np.array([(i - 0.5 * (n + 1)) * abar for i in range(1, n + 1)])


def minimize(
    spec: ProblemSpec,
    opts: Optional[SolveOptions] = None,
    start: Optional[Fronts] = None,
) -> SolveResult:
    """Minimize the interface energy by damped Newton with backtracking.

    Starts from equispaced interfaces centered at the origin (spacing:
    the mean diffusivity) unless an explicit feasible start is given.
    Accepted iterates decrease the energy strictly and stay inside the
    feasibility cone.  Termination:

    Converged      max-norm of the gradient at or below opts.grad_tol
    Diverged       an iterate left [-xi_max, xi_max] while the energy was
                   still falling over the trailing window; happens when
                   the coercivity criterion fails
    MaxIterations  neither of the above within opts.max_iter steps

    Once the expected energy decrease falls below machine resolution,
    sufficient-decrease tests stop meaning anything; a final Newton
    step is then accepted if it lands the gradient under grad_tol.
    Such a step changes the energy by at most a representable step and
    is folded into the result without its own trace record, so trace
    energies are strictly decreasing by construction.
    """
    opts = SolveOptions() if opts is None else opts
    if start is None:
        x = _default_start(spec)
    else:
        x = np.array(_fronts(spec, start))

    f = energy(spec, x)
    g = gradient(spec, x)
    gn = float(np.max(np.abs(g)))
    trace = [IterationRecord(0, f, gn)]
    iterations = 0

    for it in range(1, opts.max_iter + 1):
        if gn <= opts.grad_tol:
            break
        p, _ = newton_step(spec, x, opts.damping_min)
        slope = float(g @ p)
        if slope >= 0.0:
            break  # gradient is numerically zero; nothing to gain
        alpha = min(1.0, _boundary_cap(x, p, opts.boundary_fraction))
        flat_tol = 8.0 * np.finfo(float).eps * max(1.0, abs(f))
        accepted = False
        while alpha > 1e-20:
            xt = x + alpha * p
            moved = bool(np.any(xt != x))
            if moved and all(xt[i] < xt[i + 1] for i in range(len(xt) - 1)):
                ft = energy(spec, xt)
                if ft < f and ft <= f + _ARMIJO_C * alpha * slope:
                    accepted = True
                    break
                if abs(ft - f) <= flat_tol:
                    # Energy is flat at machine resolution; let the
                    # gradient decide whether this step finishes the job.
                    gt = gradient(spec, xt)
                    gnt = float(np.max(np.abs(gt)))
                    if gnt <= opts.grad_tol:
                        point = FreeBoundaries(tuple(float(v) for v in xt))
                        return SolveResult(
                            SolveStatus.CONVERGED,
                            point,
                            float(ft),
                            gnt,
                            it,
                            tuple(trace),
                        )
                    break  # flat but not stationary: no certifiable progress
            alpha *= _BACKTRACK
        if not accepted:
            break  # stalled by roundoff; report honestly below

        x, f = xt, ft
        g = gradient(spec, x)
        gn = float(np.max(np.abs(g)))
        iterations = it
        trace.append(IterationRecord(it, f, gn))

        escaped = float(np.max(np.abs(x))) > opts.xi_max
        window_ok = len(trace) > _DIVERGENCE_WINDOW
        if (
            escaped
            and window_ok
            and trace[-1].energy < trace[-1 - _DIVERGENCE_WINDOW].energy
        ):
            return SolveResult(
                SolveStatus.DIVERGED, None, f, gn, iterations, tuple(trace)
            )

    if gn <= opts.grad_tol:
        point = FreeBoundaries(tuple(float(v) for v in x))
        return SolveResult(
            SolveStatus.CONVERGED, point, f, gn, iterations, tuple(trace)
        )
    return SolveResult(
        SolveStatus.MAX_ITERATIONS, None, f, gn, iterations, tuple(trace)
    )


def ray_point(spec: ProblemSpec, r: int, sigma: float) -> FreeBoundaries:
    """Point at parameter sigma on the r-th escape ray.

    The first r interfaces sit at -sigma + (i - r) for i = 1..r and the
    rest at i - r; when the r-th partial coercivity sum is negative the
    energy falls to -inf along this ray as sigma grows.
    """
    if not 1 <= r <= spec.n:
        raise IndexError(f"r must lie in 1..{spec.n}")
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    xi = tuple(
        float(-sigma + i - r) if i <= r else float(i - r)
        for i in range(1, spec.n + 1)
    )
    return FreeBoundaries(xi)


def single_front_bisection(
    spec: ProblemSpec, bracket: Tuple[float, float], tol: float = 1e-12
) -> float:
    """Reference root of the single-interface flux balance by bisection.

    Deliberately independent of the Newton machinery: transcribes the
    flux balance with plain cdf/pdf quotients and halves the bracket
    until it is narrower than tol.
    """
    if spec.n != 1:
        raise ValueError("bisection reference handles exactly one interface")
    u0, u1, u2 = spec.u
    a0, a1 = spec.a
    k0, k1 = spec.k
    d1 = spec.d[0]

    def balance(t: float) -> float:
        right = k1 * (u2 - u1) * kernel.pdf(t / a1) / (a1 * (1.0 - kernel.cdf(t / a1)))
        left = k0 * (u1 - u0) * kernel.pdf(t / a0) / (a0 * kernel.cdf(t / a0))
        return 0.5 * d1 * t + right - left

    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError("bracket must be ordered")
    f_lo = balance(lo)
    f_hi = balance(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo < 0.0) == (f_hi < 0.0):
        raise ValueError("bracket does not straddle a sign change")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = balance(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class GridSearchResult:
    xi: FreeBoundaries
    energy: float
    on_boundary: bool


def grid_search(
    spec: ProblemSpec,
    box: Sequence[Tuple[float, float]],
    points_per_axis: int,
) -> GridSearchResult:
    """Exhaustive energy minimum over a product grid, increasing tuples only.

    Enumerates in lexicographic order and keeps strictly better values,
    so exact ties resolve to the lowest-index tuple.  The result is
    flagged when the winner touches the box boundary, which means the
    true minimizer may lie outside (or at -inf for non-coercive data).
    """
    if len(box) != spec.n:
        raise ValueError(f"box must provide {spec.n} coordinate ranges")
    if points_per_axis < 2:
        raise ValueError("points_per_axis must be at least 2")
    axes = []
    for lo, hi in box:
        if not lo < hi:
            raise ValueError("box ranges must be ordered")
        axes.append(np.linspace(lo, hi, points_per_axis))

    n = spec.n
    best_e = math.inf
    best: Optional[Tuple[float, ...]] = None
    prefix = [0.0] * n

    def descend(depth: int, floor: float):
        nonlocal best_e, best
        for v in axes[depth]:
            fv = float(v)
            if fv <= floor:
                continue
            prefix[depth] = fv
            if depth + 1 == n:
                e = energy(spec, tuple(prefix))
                if e < best_e:
                    best_e = e
                    best = tuple(prefix)
            else:
                descend(depth + 1, fv)

    descend(0, -math.inf)
    if best is None:
        raise ValueError("no strictly increasing tuple fits in the grid")
    on_boundary = any(
        best[i] == axes[i][0] or best[i] == axes[i][-1] for i in range(n)
    )
    return GridSearchResult(
        xi=FreeBoundaries(best), energy=best_e, on_boundary=on_boundary
    )
