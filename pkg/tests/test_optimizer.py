"""Newton solver, divergence detection, and the brute-force oracles."""
import numpy as np
import pytest

from stefan import (
    ProblemSpec,
    SolveOptions,
    SolveStatus,
    check_wellposedness,
    energy,
    grid_search,
    minimize,
    newton_step,
    ray_point,
    single_front_bisection,
    stefan_residuals,
)

from helpers import random_convex_spec, random_fronts

SYM = ProblemSpec(u=(-1.0, 0.0, 1.0), a=(1.0, 1.0), k=(1.0, 1.0), d=(0.0,))
ASYM = ProblemSpec(u=(-1.0, 0.0, 2.0), a=(1.0, 1.0), k=(1.0, 1.0), d=(0.0,))
MIRROR = ProblemSpec(u=(-2.0, 0.0, 1.0), a=(1.0, 1.0), k=(1.0, 1.0), d=(0.0,))
THREE = ProblemSpec(
    u=(-2.0, -0.5, 0.7, 1.1, 2.4),
    a=(1.2, 0.8, 1.5, 0.9),
    k=(0.7, 1.9, 1.1, 0.6),
    d=(0.3, -0.2, 0.5),
)
SINK = ProblemSpec(u=(-1.0, 0.0, 1.0), a=(1.0, 1.0), k=(1.0, 1.0), d=(-1.5,))
SINK2 = ProblemSpec(
    u=(-1.0, -0.2, 0.3, 1.0),
    a=(1.0, 0.9, 1.1),
    k=(0.2, 0.3, 0.25),
    d=(-1.0, -1.2),
)

# root of the single-front balance for ASYM; the balance reduces to
# cdf(xi) = 1/3, value from the 60-digit inverse
ASYM_ROOT = -0.6091403883479712


class TestSolveOptions:
    def test_defaults(self):
        opts = SolveOptions()
        assert opts.grad_tol == 1e-12
        assert opts.max_iter == 200
        assert opts.xi_max == 1e2
        assert opts.boundary_fraction == 0.9
        assert opts.damping_min == 1e-12

    def test_validation(self):
        with pytest.raises(ValueError):
            SolveOptions(grad_tol=0.0)
        with pytest.raises(ValueError):
            SolveOptions(max_iter=0)
        with pytest.raises(ValueError):
            SolveOptions(boundary_fraction=1.0)
        with pytest.raises(ValueError):
            SolveOptions(xi_max=-1.0)


class TestNewtonStep:
    def test_zero_at_stationary_point(self):
        p, lam = newton_step(SYM, (0.0,))
        assert tuple(p) == (0.0,)
        assert lam == 0.0

    def test_points_downhill(self):
        p, lam = newton_step(SYM, (0.5,))
        assert lam == 0.0
        assert p[0] < 0.0

    def test_damps_indefinite_hessian(self):
        # margin is negative and the curvature at the origin is
        # 2/pi - 0.75 < 0, so undamped factorization must fail
        p, lam = newton_step(SINK, (0.0,))
        assert lam > 0.0


class TestMinimize:
    def test_symmetric_converges_at_origin(self):
        res = minimize(SYM)
        assert res.status is SolveStatus.CONVERGED
        assert res.xi_star is not None
        assert abs(res.xi_star.xi[0]) <= 1e-10
        assert res.energy_value == pytest.approx(1.3862943611198906, rel=1e-15)
        assert res.iterations == 0  # the default start is already optimal

    def test_single_front_matches_frozen_root(self):
        res = minimize(ASYM)
        assert res.status is SolveStatus.CONVERGED
        assert res.xi_star.xi[0] == pytest.approx(ASYM_ROOT, abs=1e-10)

    def test_three_front_instance(self):
        res = minimize(THREE)
        assert res.status is SolveStatus.CONVERGED
        assert res.grad_norm <= 1e-12
        xi = res.xi_star.xi
        assert all(b > a for a, b in zip(xi, xi[1:]))
        # stationarity through an independent transcription of the balances
        resid = stefan_residuals(THREE, res.xi_star)
        assert max(abs(r) for r in resid) <= 1e-10

    def test_trace_strictly_decreasing(self):
        res = minimize(THREE)
        es = [rec.energy for rec in res.trace]
        assert len(es) >= 2
        assert all(b < a for a, b in zip(es, es[1:]))

    def test_trace_shape(self):
        res = minimize(THREE)
        assert res.trace[0].iteration == 0
        assert res.trace[0].grad_norm > res.grad_norm
        its = [rec.iteration for rec in res.trace]
        assert its == sorted(its)

    def test_multistart_agreement(self):
        rng = np.random.default_rng(5)
        spec = random_convex_spec(rng, 3, margin_floor=0.2)
        solutions = []
        for _ in range(10):
            res = minimize(spec, start=random_fronts(rng, 3))
            assert res.status is SolveStatus.CONVERGED
            solutions.append(np.array(res.xi_star.xi))
        base = solutions[0]
        for other in solutions[1:]:
            assert float(np.max(np.abs(other - base))) <= 1e-8

    def test_divergence_on_noncoercive_spec(self):
        assert not check_wellposedness(SINK2).coercive
        res = minimize(SINK2)
        assert res.status is SolveStatus.DIVERGED
        assert res.xi_star is None

    def test_max_iterations_is_honest(self):
        res = minimize(ASYM, SolveOptions(max_iter=1))
        assert res.status is SolveStatus.MAX_ITERATIONS
        assert res.xi_star is None
        assert res.grad_norm > 1e-12

    def test_tight_start_stays_feasible(self):
        res = minimize(THREE, start=(-0.001, 0.0, 0.001))
        assert res.status is SolveStatus.CONVERGED
        xi = res.xi_star.xi
        assert all(b > a for a, b in zip(xi, xi[1:]))


class TestRayPoint:
    def test_formula(self):
        assert ray_point(ProblemSpec(u=(-1, 0, 1, 2), a=(1, 1, 1), k=(1, 1, 1),
                                     d=(0.0, 0.0)), 1, 5.0).xi == (-5.0, 1.0)
        assert ray_point(SYM, 1, 3.0).xi == (-3.0,)
        assert ray_point(THREE, 2, 10.0).xi == (-11.0, -10.0, 1.0)

    def test_errors(self):
        with pytest.raises(IndexError):
            ray_point(SYM, 0, 1.0)
        with pytest.raises(IndexError):
            ray_point(SYM, 2, 1.0)
        with pytest.raises(ValueError):
            ray_point(SYM, 1, 0.0)

    def test_energy_decreases_along_ray(self):
        rep = check_wellposedness(SINK)
        assert rep.S_upper[0] < 0.0
        vals = [energy(SINK, ray_point(SINK, 1, s)) for s in (10, 20, 40, 80)]
        assert all(b < a for a, b in zip(vals, vals[1:]))


class TestBisection:
    def test_symmetric_root(self):
        root = single_front_bisection(SYM, (-1.0, 1.0))
        assert abs(root) <= 1e-12

    def test_matches_frozen_root(self):
        root = single_front_bisection(ASYM, (-5.0, 5.0))
        assert root == pytest.approx(ASYM_ROOT, abs=1e-10)

    def test_mirror_spec_negates_root(self):
        left = single_front_bisection(ASYM, (-5.0, 5.0))
        right = single_front_bisection(MIRROR, (-5.0, 5.0))
        assert right == pytest.approx(-left, abs=1e-10)

    def test_agrees_with_minimize(self):
        root = single_front_bisection(ASYM, (-5.0, 5.0))
        res = minimize(ASYM)
        assert abs(root - res.xi_star.xi[0]) <= 1e-8

    def test_requires_sign_change(self):
        with pytest.raises(ValueError):
            single_front_bisection(ASYM, (1.0, 5.0))

    def test_rejects_multifront_spec(self):
        with pytest.raises(ValueError):
            single_front_bisection(THREE, (-1.0, 1.0))


class TestGridSearch:
    def test_symmetric_hits_origin(self):
        res = grid_search(SYM, [(-2.0, 2.0)], 4001)
        assert res.xi.xi == (0.0,)
        assert not res.on_boundary

    def test_boundary_flag_for_noncoercive(self):
        res = grid_search(SINK, [(-50.0, 50.0)], 101)
        assert res.on_boundary

    def test_two_front_agreement_with_minimize(self):
        spec = ProblemSpec(
            u=(-1.0, 0.0, 1.0, 2.0), a=(1, 1, 1), k=(1, 1, 1), d=(0.0, 0.0)
        )
        grid = grid_search(spec, [(-3.0, 3.0), (-3.0, 3.0)], 301)
        res = minimize(spec)
        assert res.status is SolveStatus.CONVERGED
        cell = 6.0 / 300.0
        for g, m in zip(grid.xi.xi, res.xi_star.xi):
            assert abs(g - m) <= cell
        assert not grid.on_boundary

    def test_increasing_filter(self):
        spec = ProblemSpec(
            u=(-1.0, 0.0, 1.0, 2.0), a=(1, 1, 1), k=(1, 1, 1), d=(0.0, 0.0)
        )
        res = grid_search(spec, [(0.5, 1.0), (0.0, 0.6)], 7)
        xi = res.xi.xi
        assert xi[0] < xi[1]

    def test_empty_grid_errors(self):
        spec = ProblemSpec(
            u=(-1.0, 0.0, 1.0, 2.0), a=(1, 1, 1), k=(1, 1, 1), d=(0.0, 0.0)
        )
        with pytest.raises(ValueError):
            grid_search(spec, [(2.0, 3.0), (0.0, 1.0)], 5)
