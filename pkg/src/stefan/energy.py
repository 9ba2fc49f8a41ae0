"""Problem data, the variational energy, its derivatives, and the exact
well-posedness criteria.

A problem with n moving interfaces is described by n+2 ordered phase
temperatures u, per-phase diffusivities a and conductivities k, and n
signed interface heat capacities d (negative values are allowed, which
is what makes existence and uniqueness nontrivial).  Candidate
interface positions in similarity coordinates live on the open cone
xi_1 < ... < xi_n.

The energy of a candidate position is

    E(xi) = - sum_i k_i (u_{i+1} - u_i) log(cdf(xi_{i+1}/a_i) - cdf(xi_i/a_i))
            + sum_i d_i xi_i^2 / 4

with xi_0 = -inf and xi_{n+1} = +inf.  Its stationary points are
exactly the interface flux-balance conditions, so the solver reduces
to minimizing E.  All flux ratios are evaluated as
exp(log_pdf - log_gap) so the formulas survive interfaces parked far
out in the kernel tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from . import kernel

__all__ = [
    "InvalidProblem",
    "InfeasiblePoint",
    "ProblemSpec",
    "FreeBoundaries",
    "WellPosednessReport",
    "HessianParts",
    "energy",
    "gradient",
    "hessian_parts",
    "hessian",
    "check_wellposedness",
]

# |value| at or below this means a well-posedness sum sits on the boundary
# of the criterion and the verdict should not be trusted to one side.
BORDERLINE_TOL = 1e-12


class InvalidProblem(ValueError):
    """Problem data violates a structural requirement."""


class InfeasiblePoint(ValueError):
    """Interface coordinates are not finite and strictly increasing."""


def _as_float_tuple(name: str, values: Iterable[float]) -> Tuple[float, ...]:
    try:
        out = tuple(float(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise InvalidProblem(f"{name}: expected a sequence of numbers") from exc
    if any(math.isnan(v) or math.isinf(v) for v in out):
        raise InvalidProblem(f"{name}: entries must be finite")
    return out


@dataclass(frozen=True)
class ProblemSpec:
    """Immutable description of one multi-phase problem.

    u : n+2 phase temperatures, strictly increasing; u[0] and u[-1] are
        the far-field values of the initial step.
    a : n+1 diffusivities, positive, one per phase.
    k : n+1 conductivities, positive, one per phase.
    d : n interface heat capacities, any sign.
    """

    u: Tuple[float, ...]
    a: Tuple[float, ...]
    k: Tuple[float, ...]
    d: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "u", _as_float_tuple("u", self.u))
        object.__setattr__(self, "a", _as_float_tuple("a", self.a))
        object.__setattr__(self, "k", _as_float_tuple("k", self.k))
        object.__setattr__(self, "d", _as_float_tuple("d", self.d))
        n = len(self.d)
        if n < 1:
            raise InvalidProblem("d: need at least one interface")
        if len(self.u) != n + 2:
            raise InvalidProblem(f"u: expected {n + 2} temperatures, got {len(self.u)}")
        if len(self.a) != n + 1:
            raise InvalidProblem(f"a: expected {n + 1} diffusivities, got {len(self.a)}")
        if len(self.k) != n + 1:
            raise InvalidProblem(f"k: expected {n + 1} conductivities, got {len(self.k)}")
        if any(v2 <= v1 for v1, v2 in zip(self.u, self.u[1:])):
            raise InvalidProblem("u: temperatures must be strictly increasing")
        if any(v <= 0.0 for v in self.a):
            raise InvalidProblem("a: diffusivities must be positive")
        if any(v <= 0.0 for v in self.k):
            raise InvalidProblem("k: conductivities must be positive")

    @property
    def n(self) -> int:
        return len(self.d)

    def kappa(self, i: int) -> float:
        """Conductivity rescaled by diffusivity, k_i / a_i^2."""
        return self.k[i] / (self.a[i] * self.a[i])


@dataclass(frozen=True)
class FreeBoundaries:
    """A feasible point: finite, strictly increasing interface positions."""

    xi: Tuple[float, ...]

    def __post_init__(self):
        try:
            vals = tuple(float(v) for v in self.xi)
        except (TypeError, ValueError) as exc:
            raise InfeasiblePoint("xi: expected a sequence of numbers") from exc
        if len(vals) < 1:
            raise InfeasiblePoint("xi: need at least one coordinate")
        if any(math.isnan(v) or math.isinf(v) for v in vals):
            raise InfeasiblePoint("xi: coordinates must be finite")
        if any(v2 <= v1 for v1, v2 in zip(vals, vals[1:])):
            raise InfeasiblePoint("xi: coordinates must be strictly increasing")
        object.__setattr__(self, "xi", vals)

    def __len__(self) -> int:
        return len(self.xi)

    def __iter__(self):
        return iter(self.xi)


Fronts = Union[FreeBoundaries, Sequence[float]]


def _fronts(spec: ProblemSpec, xi: Fronts) -> Tuple[float, ...]:
    vals = xi.xi if isinstance(xi, FreeBoundaries) else FreeBoundaries(tuple(xi)).xi
    if len(vals) != spec.n:
        raise InfeasiblePoint(f"xi: expected {spec.n} coordinates, got {len(vals)}")
    return vals


def _strips(spec: ProblemSpec, fronts: Tuple[float, ...]):
    """Per-phase (lo_arg, hi_arg, log_gap) with the ends at -inf/+inf."""
    ext = (-math.inf,) + fronts + (math.inf,)
    out = []
    for i in range(spec.n + 1):
        lo = ext[i] / spec.a[i]
        hi = ext[i + 1] / spec.a[i]
        out.append((lo, hi, kernel.log_gap(lo, hi)))
    return out


@dataclass(frozen=True)
class WellPosednessReport:
    """Outcome of the exact existence/uniqueness criteria.

    S_upper[j-1] carries the running sum of kappa_{i-1}(u_i - u_{i-1}) + d_i
    for i up to j; S_lower[j-1] the corresponding sum from j down to n.
    The energy is coercive (a minimizer exists) if and only if every
    entry of both is >= 0.  convexity_margins[i-1] holds
    min(neighbor fluxes) + 2 d_i; nonnegative margins everywhere force a
    strictly convex energy and hence a unique solution.  borderline is
    set when any of these quantities is within BORDERLINE_TOL of zero,
    meaning the verdict rests on cancellation at roundoff scale.
    """

    S_upper: Tuple[float, ...]
    S_lower: Tuple[float, ...]
    coercive: bool
    convexity_margins: Tuple[float, ...]
    strictly_convex_sufficient: bool
    borderline: bool


def check_wellposedness(spec: ProblemSpec) -> WellPosednessReport:
    n = spec.n
    du = [spec.u[i + 1] - spec.u[i] for i in range(n + 1)]
    load = [spec.kappa(i) * du[i] for i in range(n + 1)]

    upper_terms = [load[i - 1] + spec.d[i - 1] for i in range(1, n + 1)]
    lower_terms = [load[i] + spec.d[i - 1] for i in range(1, n + 1)]
    s_upper = tuple(math.fsum(upper_terms[:j]) for j in range(1, n + 1))
    s_lower = tuple(math.fsum(lower_terms[j - 1:]) for j in range(1, n + 1))
    margins = tuple(
        min(load[i], load[i - 1]) + 2.0 * spec.d[i - 1] for i in range(1, n + 1)
    )

    coercive = all(v >= 0.0 for v in s_upper) and all(v >= 0.0 for v in s_lower)
    convex = all(v >= 0.0 for v in margins)
    borderline = any(
        abs(v) <= BORDERLINE_TOL for v in (*s_upper, *s_lower, *margins)
    )
    return WellPosednessReport(
        S_upper=s_upper,
        S_lower=s_lower,
        coercive=coercive,
        convexity_margins=margins,
        strictly_convex_sufficient=convex,
        borderline=borderline,
    )


def energy(spec: ProblemSpec, xi: Fronts) -> float:
    """Variational energy at a feasible point. Finite on the open cone."""
    fronts = _fronts(spec, xi)
    total = 0.0
    for i, (_, _, lg) in enumerate(_strips(spec, fronts)):
        total -= spec.k[i] * (spec.u[i + 1] - spec.u[i]) * lg
    for i, v in enumerate(fronts):
        total += 0.25 * spec.d[i] * v * v
    return total


def gradient(spec: ProblemSpec, xi: Fronts) -> np.ndarray:
    """Energy gradient; its zeros are the interface flux balances."""
    fronts = _fronts(spec, xi)
    strips = _strips(spec, fronts)
    n = spec.n
    g = np.empty(n)
    for j in range(1, n + 1):
        lo_r, _, lg_r = strips[j]
        _, hi_l, lg_l = strips[j - 1]
        du_r = spec.u[j + 1] - spec.u[j]
        du_l = spec.u[j] - spec.u[j - 1]
        flux_r = spec.k[j] * du_r / spec.a[j] * math.exp(kernel.log_pdf(lo_r) - lg_r)
        flux_l = spec.k[j - 1] * du_l / spec.a[j - 1] * math.exp(
            kernel.log_pdf(hi_l) - lg_l
        )
        g[j - 1] = 0.5 * spec.d[j - 1] * fronts[j - 1] + flux_r - flux_l
    return g


@dataclass(frozen=True)
class HessianParts:
    """Second-derivative building blocks, indexed by phase strip.

    beta_minus[i-1] and beta_plus[i] come from strip i's dependence on
    its lower and upper end (strips 1..n and 0..n-1 respectively);
    gamma[i] couples the two ends of strip i and vanishes identically
    for the unbounded end strips.  All beta entries are positive and
    all gamma entries nonnegative at any feasible point.
    """

    beta_minus: Tuple[float, ...]  # length n, entry j for strip j+1
    beta_plus: Tuple[float, ...]   # length n, entry j for strip j
    gamma: Tuple[float, ...]       # length n+1, entry j for strip j


def hessian_parts(spec: ProblemSpec, xi: Fronts) -> HessianParts:
    fronts = _fronts(spec, xi)
    strips = _strips(spec, fronts)
    n = spec.n

    beta_minus = []
    beta_plus = []
    gamma = []
    for i, (lo, hi, lg) in enumerate(strips):
        c = spec.kappa(i) * (spec.u[i + 1] - spec.u[i])
        r_lo = math.exp(kernel.log_pdf(lo) - lg)
        r_hi = math.exp(kernel.log_pdf(hi) - lg)
        slope = r_hi - r_lo  # (pdf(hi) - pdf(lo)) / gap
        gamma.append(c * r_lo * r_hi)
        if i >= 1:
            beta_minus.append(c * r_lo * (-0.5 * lo - slope))
        if i <= n - 1:
            beta_plus.append(c * r_hi * (0.5 * hi + slope))
    return HessianParts(
        beta_minus=tuple(beta_minus),
        beta_plus=tuple(beta_plus),
        gamma=tuple(gamma),
    )


def hessian(spec: ProblemSpec, xi: Fronts) -> np.ndarray:
    """Dense symmetric tridiagonal Hessian of the energy."""
    parts = hessian_parts(spec, xi)
    n = spec.n
    h = np.zeros((n, n))
    for r in range(n):
        h[r, r] = (
            parts.beta_minus[r]
            + parts.gamma[r + 1]
            + parts.beta_plus[r]
            + parts.gamma[r]
            + 0.5 * spec.d[r]
        )
        if r + 1 < n:
            h[r, r + 1] = -parts.gamma[r + 1]
            h[r + 1, r] = -parts.gamma[r + 1]
    return h
