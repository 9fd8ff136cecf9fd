"""Solver contract tests: analytic corpus, certificates, IPM invariants."""

import numpy as np
import pytest
import scipy.sparse as sp
from scipy.optimize import linprog

from swiptbeam.conic import (ConicProblem, NonNeg, PSD, ProblemBuilder,
                             ProblemValidationError, RotatedSOC, SolverStatus,
                             dump_problem, load_problem, solve_conic, svec)


def lp_problem(c, A, b):
    return ConicProblem(c=np.asarray(c, float), A=sp.csr_matrix(np.atleast_2d(A)),
                        b=np.asarray(b, float), cones=(NonNeg(len(c)),))


class TestTrivialExamples:
    def test_fixed_point_lp(self):
        sol = solve_conic(lp_problem([1.0], [[1.0]], [1.0]))
        assert sol.status == SolverStatus.OPTIMAL
        assert sol.primal_objective == pytest.approx(1.0, abs=1e-7)

    def test_rotated_cone_norm_epigraph(self):
        # min t s.t. 2 t v >= 3^2 + 4^2 with v pinned to 1/2  ->  t = 25
        bld = ProblemBuilder()
        u, v, zz = bld.add_rsoc(2)
        bld.set_objective([u], [1.0])
        bld.add_eq({v: 1.0}, 0.5)
        bld.add_eq({int(zz[0]): 1.0}, 3.0)
        bld.add_eq({int(zz[1]): 1.0}, 4.0)
        sol = solve_conic(bld.build())
        assert sol.status == SolverStatus.OPTIMAL
        assert sol.primal_objective == pytest.approx(25.0, rel=1e-7)

    def test_psd_diagonal_minimization(self):
        bld = ProblemBuilder()
        w = bld.add_psd(2)
        bld.set_objective(w, svec(np.eye(2)))
        bld.add_eq({int(w[0]): 1.0}, 2.0)
        sol = solve_conic(bld.build())
        assert sol.status == SolverStatus.OPTIMAL
        assert sol.primal_objective == pytest.approx(2.0, abs=1e-7)

    def test_infeasible_lp_certificate(self):
        sol = solve_conic(lp_problem([1.0], [[1.0]], [-1.0]))
        assert sol.status == SolverStatus.PRIMAL_INFEASIBLE
        y = sol.certificate
        assert y is not None
        # Farkas: A^T y <= 0 (within tolerance), b^T y = 1
        assert np.array([-1.0]) @ y == pytest.approx(1.0, rel=1e-6)
        assert float((np.array([[1.0]]).T @ y)[0]) <= 1e-7

    def test_unbounded_detected(self):
        bld = ProblemBuilder()
        i = bld.add_nonneg(1)
        bld.set_objective(i, [-1.0])
        sol = solve_conic(bld.build())
        assert sol.status == SolverStatus.DUAL_INFEASIBLE
        assert sol.certificate is not None


class TestAnalyticCorpus:
    def test_random_lps_match_highs(self, rng):
        for trial in range(25):
            m = int(rng.integers(2, 7))
            n = int(rng.integers(m + 2, 14))
            A = rng.standard_normal((m, n))
            b = A @ rng.uniform(0.5, 2.0, n)
            c = rng.uniform(0.1, 2.0, n)
            sol = solve_conic(lp_problem(c, A, b))
            ref = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
            assert sol.status == SolverStatus.OPTIMAL
            err = abs(sol.primal_objective - ref.fun)
            assert err <= 1e-7 * max(1.0, abs(ref.fun))

    def test_random_psd_min_eigenvalue(self, rng):
        # min <C, X> s.t. tr X = 1, X >= 0   has optimum lambda_min(C)
        for trial in range(10):
            side = int(rng.integers(2, 6))
            C = rng.standard_normal((side, side))
            C = (C + C.T) / 2
            bld = ProblemBuilder()
            w = bld.add_psd(side)
            bld.set_objective(w, svec(C))
            diag = svec(np.eye(side))
            bld.add_eq({int(w[k]): float(diag[k])
                        for k in np.flatnonzero(diag)}, 1.0)
            sol = solve_conic(bld.build())
            ref = float(np.linalg.eigvalsh(C)[0])
            assert sol.status == SolverStatus.OPTIMAL
            assert abs(sol.primal_objective - ref) <= 1e-7 * max(1.0, abs(ref))

    def test_random_squared_norm(self, rng):
        # min t s.t. 2 t (1/2) >= ||a||^2 -> t = ||a||^2
        for trial in range(10):
            d = int(rng.integers(1, 6))
            a = rng.standard_normal(d)
            bld = ProblemBuilder()
            u, v, zz = bld.add_rsoc(d)
            bld.set_objective([u], [1.0])
            bld.add_eq({v: 1.0}, 0.5)
            for k in range(d):
                bld.add_eq({int(zz[k]): 1.0}, float(a[k]))
            sol = solve_conic(bld.build())
            ref = float(a @ a)
            assert sol.status == SolverStatus.OPTIMAL
            assert abs(sol.primal_objective - ref) <= 1e-7 * max(1.0, ref)

    def test_constructed_infeasible_lps_certified(self, rng):
        for trial in range(10):
            n = int(rng.integers(2, 6))
            A = np.vstack([np.eye(n), np.ones(n)])
            b = np.concatenate([rng.uniform(0.5, 1.0, n), [-1.0]])
            sol = solve_conic(lp_problem(rng.uniform(0.1, 1.0, n), A, b))
            assert sol.status == SolverStatus.PRIMAL_INFEASIBLE
            y = sol.certificate
            assert b @ y == pytest.approx(1.0, rel=1e-6)
            assert np.max(A.T @ y) <= 1e-6


class TestInvariants:
    def test_weak_duality_along_path(self, rng):
        A = rng.standard_normal((3, 8))
        b = A @ rng.uniform(0.5, 1.5, 8)
        c = rng.uniform(0.1, 1.0, 8)
        sol = solve_conic(lp_problem(c, A, b), record_history=True)
        assert sol.status == SolverStatus.OPTIMAL
        for h in sol.history:
            scale = max(1.0, abs(h["pobj"]), abs(h["dobj"]))
            # pobj >= dobj up to the residual-induced slack of the embedding
            slack = 1e-10 * scale + 10.0 * (h["pres"] + h["dres"]) * scale
            assert h["pobj"] >= h["dobj"] - slack

    def test_complementary_slackness_at_optimum(self, rng):
        bld = ProblemBuilder()
        u, v, zz = bld.add_rsoc(2)
        p = bld.add_nonneg(2)
        bld.set_objective([u], [1.0])
        bld.set_objective(p, [0.5, 0.25])
        bld.add_eq({v: 1.0}, 0.5)
        bld.add_eq({int(zz[0]): 1.0, int(p[0]): -1.0}, 1.0)
        bld.add_eq({int(zz[1]): 1.0, int(p[1]): 1.0}, 2.0)
        prob = bld.build()
        sol = solve_conic(prob)
        assert sol.status == SolverStatus.OPTIMAL
        layout = prob.layout()
        for k in range(len(layout.kinds)):
            xb = layout.block(k, sol.primal)
            zb = layout.block(k, sol.dual_cone)
            assert abs(xb @ zb) <= 1e-6 * max(1.0, abs(sol.primal_objective))

    def test_row_scaling_invariance(self, rng):
        A = rng.standard_normal((4, 10))
        x0 = rng.uniform(0.5, 2.0, 10)
        b = A @ x0
        c = rng.uniform(0.1, 1.0, 10)
        base = solve_conic(lp_problem(c, A, b))
        assert base.status == SolverStatus.OPTIMAL
        for factors in ([1e-2, 1.0, 1e2, 1.0], [1e2, 1e-2, 1e2, 1e-2]):
            D = np.asarray(factors)
            scaled = solve_conic(lp_problem(c, D[:, None] * A, D * b))
            assert scaled.status == SolverStatus.OPTIMAL
            assert scaled.primal_objective == pytest.approx(
                base.primal_objective, rel=1e-7)

    def test_determinism(self, rng):
        A = rng.standard_normal((3, 7))
        b = A @ rng.uniform(0.5, 1.5, 7)
        c = rng.uniform(0.1, 1.0, 7)
        prob = lp_problem(c, A, b)
        s1 = solve_conic(prob)
        s2 = solve_conic(prob)
        assert np.array_equal(s1.primal, s2.primal)
        assert np.array_equal(s1.dual_eq, s2.dual_eq)
        assert s1.iterations == s2.iterations

    def test_optimal_residual_contract(self, rng):
        A = rng.standard_normal((3, 7))
        b = A @ rng.uniform(0.5, 1.5, 7)
        c = rng.uniform(0.1, 1.0, 7)
        prob = lp_problem(c, A, b)
        sol = solve_conic(prob)
        assert sol.status == SolverStatus.OPTIMAL
        scale = max(1.0, float(np.max(np.abs(A @ sol.primal))))
        assert sol.primal_residual <= 1e-8 * scale
        assert sol.gap <= 1e-8 * max(1.0, abs(sol.primal_objective))
        assert np.min(sol.primal) >= -1e-8


class TestValidationAndIO:
    def test_cone_partition_checked(self):
        prob = ConicProblem(c=np.ones(3), A=sp.csr_matrix((1, 3)), b=np.zeros(1),
                            cones=(NonNeg(2),))
        with pytest.raises(ProblemValidationError):
            solve_conic(prob)

    def test_shape_mismatch_checked(self):
        prob = ConicProblem(c=np.ones(2), A=sp.csr_matrix((1, 3)), b=np.zeros(1),
                            cones=(NonNeg(2),))
        with pytest.raises(ProblemValidationError):
            solve_conic(prob)

    def test_zero_row_infeasible(self):
        A = np.array([[1.0, 1.0], [0.0, 0.0]])
        prob = lp_problem([1.0, 1.0], A, [1.0, 2.0])
        sol = solve_conic(prob)
        assert sol.status == SolverStatus.PRIMAL_INFEASIBLE

    def test_zero_row_satisfied_dropped(self):
        A = np.array([[1.0, 1.0], [0.0, 0.0]])
        prob = lp_problem([1.0, 2.0], A, [1.0, 0.0])
        sol = solve_conic(prob)
        assert sol.status == SolverStatus.OPTIMAL
        assert sol.primal_objective == pytest.approx(1.0, abs=1e-7)

    def test_dump_load_round_trip(self, tmp_path, rng):
        bld = ProblemBuilder()
        u, v, zz = bld.add_rsoc(2)
        p = bld.add_nonneg(2)
        w = bld.add_psd(2)
        bld.set_objective([u], [1.0])
        bld.set_objective(w, svec(np.eye(2)))
        bld.add_eq({v: 1.0, int(p[0]): 0.25}, 0.5)
        bld.add_eq({int(zz[0]): 1.0}, 3.0)
        bld.add_eq({int(w[0]): 1.0, int(p[1]): -1.0}, 1.0)
        prob = bld.build()
        path = tmp_path / "prob.txt"
        dump_problem(prob, path)
        loaded = load_problem(path)
        assert loaded.cones == prob.cones
        np.testing.assert_array_equal(loaded.c, prob.c)
        np.testing.assert_array_equal(loaded.b, prob.b)
        np.testing.assert_array_equal(loaded.A.toarray(), prob.A.toarray())
        s1 = solve_conic(prob)
        s2 = solve_conic(loaded)
        assert s1.primal_objective == pytest.approx(s2.primal_objective, rel=1e-12)
