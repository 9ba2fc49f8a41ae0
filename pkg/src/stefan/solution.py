"""Piecewise self-similar temperature profiles and their a-posteriori checks.

Once interface positions are known, the temperature is, phase by
phase, an affine image of the similarity kernel.  Each piece here
carries both of its anchor forms

    v(xi) = u_lo + scale * (cdf(xi/a) - cdf_lo)
          = u_hi + scale * (cdf(xi/a) - cdf_hi)

and evaluation picks the anchor nearer to the query, so the profile
hits the phase temperatures at the interfaces exactly, by
construction, and stays well conditioned next to either end even when
a front is parked deep in a kernel tail (scale is computed through
log_gap, never by dividing by a raw cdf difference).
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import kernel
from .energy import FreeBoundaries, Fronts, ProblemSpec, _fronts

__all__ = [
    "Piece",
    "SelfSimilarSolution",
    "ResidualReport",
    "assemble",
    "evaluate_profile",
    "profile_slope",
    "profile_curvature",
    "evaluate_spacetime",
    "stefan_residuals",
    "validate",
]

# Half-width of the sampling window used for the two unbounded phases.
_END_WINDOW = 10.0


@dataclass(frozen=True)
class Piece:
    a: float
    u_lo: float
    u_hi: float
    cdf_lo: float
    cdf_hi: float
    scale: float

    @property
    def cdf_mid(self) -> float:
        return 0.5 * (self.cdf_lo + self.cdf_hi)


@dataclass(frozen=True)
class SelfSimilarSolution:
    spec: ProblemSpec
    xi_star: Tuple[float, ...]
    pieces: Tuple[Piece, ...]

    @property
    def piece_coefficients(self) -> Tuple[Tuple[float, float], ...]:
        """(offset, scale) per phase, anchored at the lower end."""
        return tuple((p.u_lo, p.scale) for p in self.pieces)


def assemble(spec: ProblemSpec, xi_star: Fronts) -> SelfSimilarSolution:
    fronts = _fronts(spec, xi_star)
    ext = (-math.inf,) + fronts + (math.inf,)
    pieces = []
    for i in range(spec.n + 1):
        lo = ext[i] / spec.a[i]
        hi = ext[i + 1] / spec.a[i]
        lg = kernel.log_gap(lo, hi)
        du = spec.u[i + 1] - spec.u[i]
        pieces.append(
            Piece(
                a=spec.a[i],
                u_lo=spec.u[i],
                u_hi=spec.u[i + 1],
                cdf_lo=kernel.cdf(lo),
                cdf_hi=kernel.cdf(hi),
                scale=du * math.exp(-lg),
            )
        )
    return SelfSimilarSolution(spec=spec, xi_star=fronts, pieces=tuple(pieces))


def _piece_at(sol: SelfSimilarSolution, xi: float) -> Piece:
    return sol.pieces[bisect_right(sol.xi_star, xi)]


def evaluate_profile(sol: SelfSimilarSolution, xi: float) -> float:
    """Temperature at similarity coordinate xi; +-inf give the far fields.

    At an interface both one-sided limits equal the phase temperature,
    which is what gets returned.
    """
    if math.isnan(xi):
        raise ValueError("xi must not be NaN")
    fronts = sol.xi_star
    j = bisect_right(fronts, xi)
    if j > 0 and fronts[j - 1] == xi:
        return sol.spec.u[j]
    p = sol.pieces[j]
    c = kernel.cdf(xi / p.a)
    if c <= p.cdf_mid:
        return p.u_lo + p.scale * (c - p.cdf_lo)
    return p.u_hi + p.scale * (c - p.cdf_hi)


def profile_slope(sol: SelfSimilarSolution, xi: float) -> float:
    """dv/dxi, taken from the right at an interface."""
    p = _piece_at(sol, xi)
    return p.scale * kernel.pdf(xi / p.a) / p.a


def profile_curvature(sol: SelfSimilarSolution, xi: float) -> float:
    """d2v/dxi2, using the identity pdf'(z) = -z pdf(z) / 2."""
    p = _piece_at(sol, xi)
    z = xi / p.a
    return -0.5 * z * kernel.pdf(z) * p.scale / (p.a * p.a)


def evaluate_spacetime(sol: SelfSimilarSolution, t: float, x: float) -> float:
    """Temperature of the space-time solution u(t, x) for t > 0."""
    if not t > 0.0:
        raise ValueError("t must be positive")
    return evaluate_profile(sol, x / math.sqrt(t))


def stefan_residuals(spec: ProblemSpec, xi: Fronts) -> np.ndarray:
    """Literal interface flux balances, one per interface.

    Written independently of the gradient: raw cdf/pdf quotients, no
    log-space rearrangement, so it can serve as a second opinion on
    stationarity.
    """
    fronts = _fronts(spec, xi)
    ext = (-math.inf,) + fronts + (math.inf,)
    out = np.empty(spec.n)
    for j in range(1, spec.n + 1):
        a_r, a_l = spec.a[j], spec.a[j - 1]
        gap_r = kernel.cdf(ext[j + 1] / a_r) - kernel.cdf(ext[j] / a_r)
        gap_l = kernel.cdf(ext[j] / a_l) - kernel.cdf(ext[j - 1] / a_l)
        du_r = spec.u[j + 1] - spec.u[j]
        du_l = spec.u[j] - spec.u[j - 1]
        out[j - 1] = (
            0.5 * spec.d[j - 1] * ext[j]
            + spec.k[j] * du_r * kernel.pdf(ext[j] / a_r) / (a_r * gap_r)
            - spec.k[j - 1] * du_l * kernel.pdf(ext[j] / a_l) / (a_l * gap_l)
        )
    return out


@dataclass(frozen=True)
class ResidualReport:
    max_ode_residual: float
    max_stefan_residual: float
    max_interface_jump: float
    samples: int


def _chebyshev(lo: float, hi: float, m: int):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    for j in range(1, m + 1):
        yield mid + half * math.cos((2 * j - 1) * math.pi / (2 * m))


def validate(sol: SelfSimilarSolution, samples_per_phase: int) -> ResidualReport:
    """Residuals of the assembled profile against the governing equations.

    ODE residuals |a^2 v'' + xi v'/2| are sampled at Chebyshev points
    inside every phase (the unbounded end phases over a window of
    width 10 beyond the outermost interface); interface jumps compare
    both one-sided piece values against the phase temperatures; flux
    residuals are the literal interface balances.  The ODE and jump
    numbers check the construction itself, the flux residuals check
    whether the supplied interface positions actually solve the
    problem.
    """
    if samples_per_phase < 3:
        raise ValueError("samples_per_phase must be at least 3")
    spec = sol.spec
    fronts = sol.xi_star
    n = len(fronts)

    max_ode = 0.0
    count = 0
    for i, p in enumerate(sol.pieces):
        lo = fronts[i - 1] if i > 0 else fronts[0] - _END_WINDOW
        hi = fronts[i] if i < n else fronts[-1] + _END_WINDOW
        for t in _chebyshev(lo, hi, samples_per_phase):
            z = t / p.a
            vp = p.scale * kernel.pdf(z) / p.a
            vpp = -0.5 * z * kernel.pdf(z) * p.scale / (p.a * p.a)
            max_ode = max(max_ode, abs(p.a * p.a * vpp + 0.5 * t * vp))
            count += 1

    max_jump = 0.0
    for j in range(1, n + 1):
        left, right = sol.pieces[j - 1], sol.pieces[j]
        target = spec.u[j]
        from_left = left.u_hi + left.scale * (
            kernel.cdf(fronts[j - 1] / left.a) - left.cdf_hi
        )
        from_right = right.u_lo + right.scale * (
            kernel.cdf(fronts[j - 1] / right.a) - right.cdf_lo
        )
        max_jump = max(max_jump, abs(from_left - target), abs(from_right - target))

    max_stefan = float(np.max(np.abs(stefan_residuals(spec, fronts))))
    return ResidualReport(
        max_ode_residual=max_ode,
        max_stefan_residual=max_stefan,
        max_interface_jump=max_jump,
        samples=count,
    )
