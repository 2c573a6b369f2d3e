"""Transverse boundary-layer problem: closed forms, expansion, residuals."""

import math

import numpy as np
import pytest

from mitbag.geometry import CurvatureData
from mitbag.numerics import ToleranceConfig
from mitbag.transverse import (
    TransverseProblem,
    cutoff_chi,
    cutoff_chi_d1,
    cutoff_chi_d2,
    expansion_lambda,
    formal_profiles,
    residual_of_ansatz,
    solve_transverse,
    transverse_form,
    transverse_mass_check,
)

FLAT = CurvatureData.flat()


def flat_lambda(m: float) -> float:
    return 1.0 / math.tanh(math.sqrt(m))


def flat_mass(m: float) -> float:
    T = math.sqrt(m)
    return (math.sinh(2.0 * T) / 4.0 - T / 2.0) / math.sinh(T) ** 2


class TestFlatClosedForms:
    def test_energy_m4(self):
        sol = solve_transverse(TransverseProblem(m=4.0, curv=FLAT))
        assert sol.lam == pytest.approx(1.0 / math.tanh(2.0), abs=1e-11)
        assert sol.deriv0 == pytest.approx(-1.0 / math.tanh(2.0), abs=1e-10)

    def test_mass_m4(self):
        # mass = (sinh 4 / 4 - 1)/sinh^2 2 = 0.44263553...
        sol = solve_transverse(TransverseProblem(m=4.0, curv=FLAT))
        expected = (math.sinh(4.0) / 4.0 - 1.0) / math.sinh(2.0) ** 2
        assert sol.mass == pytest.approx(expected, abs=1e-10)
        assert transverse_mass_check(sol) == pytest.approx(0.5 - expected, abs=1e-10)

    @pytest.mark.parametrize("m", (1.0, 9.0, 64.0, 900.0))
    def test_energy_any_interval(self, m):
        sol = solve_transverse(TransverseProblem(m=m, curv=FLAT))
        assert sol.lam == pytest.approx(flat_lambda(m), rel=1e-11)
        assert sol.mass == pytest.approx(flat_mass(m), rel=1e-9)

    def test_large_mass_limit(self):
        sol = solve_transverse(TransverseProblem(m=1e4, curv=FLAT))
        assert abs(sol.lam - 1.0) <= 1e-8

    def test_profile_matches_closed_form(self):
        m = 16.0
        sol = solve_transverse(TransverseProblem(m=m, curv=FLAT))
        taus = np.linspace(0.0, 4.0, 9)
        u, du = sol.evaluate(taus)
        np.testing.assert_allclose(u, np.sinh(4.0 - taus) / math.sinh(4.0), rtol=1e-9, atol=1e-12)
        np.testing.assert_allclose(du, -np.cosh(4.0 - taus) / math.sinh(4.0), rtol=1e-9, atol=1e-12)

    def test_boundary_samples_pinned(self):
        sol = solve_transverse(TransverseProblem(m=4.0, curv=FLAT))
        assert sol.u[0] == 1.0 and sol.u[-1] == 0.0


class TestExpansion:
    def test_flat_is_one(self):
        assert expansion_lambda(TransverseProblem(m=123.0, curv=FLAT)) == 1.0

    def test_direct_arithmetic(self):
        prob = TransverseProblem(m=100.0, curv=CurvatureData(3.0, 1.0))
        assert expansion_lambda(prob) == pytest.approx(1.0149375, abs=1e-15)

    def test_sphere_value(self):
        # kappa = 2/R, K = 1/R^2 at R=1: the m^-2 coefficient cancels exactly.
        prob = TransverseProblem(m=25.0, curv=CurvatureData.sphere(1.0))
        assert expansion_lambda(prob) == pytest.approx(1.04, abs=0.0)

    @pytest.mark.parametrize("kappa", (0.5, 1.0, 2.0, 3.0))
    def test_sphere_cancellation_exact(self, kappa):
        prob = TransverseProblem(m=64.0, curv=CurvatureData(kappa, kappa**2 / 4.0))
        assert expansion_lambda(prob) == 1.0 + kappa / 128.0

    def test_solver_matches_expansion_to_third_order(self):
        prob = TransverseProblem(m=100.0, curv=CurvatureData(3.0, 1.0))
        sol = solve_transverse(prob)
        # The next-order coefficient is kappa^3/8 - kappa K/2 = 1.875 here.
        assert abs(sol.lam - 1.0149375) <= 2.5e-6
        assert abs(sol.lam - 1.0149375) >= 1.0e-6

    def test_reflection_structure(self):
        # Mirroring kappa only flips the expansion's odd terms; the solved
        # energy tracks the mirrored expansion to third order.
        m = 400.0
        for kappa in (2.0, 3.0):
            prob = TransverseProblem(m=m, curv=CurvatureData(-kappa, 1.0))
            sol = solve_transverse(prob)
            c3 = abs((-kappa) ** 3 / 8.0 - (-kappa) * 1.0 / 2.0)
            assert abs(sol.lam - expansion_lambda(prob)) <= (c3 + 0.5) / m**3


class TestFormalProfiles:
    def test_leading_profile(self):
        u0, _, _ = formal_profiles(CurvatureData(1.0, 1.0))
        assert float(u0(0.0)) == 1.0
        assert float(u0(2.0)) == pytest.approx(math.exp(-2.0), rel=1e-15)

    def test_first_correction(self):
        _, u1, _ = formal_profiles(CurvatureData(2.0, -5.0))
        assert float(u1(1.0)) == pytest.approx(-math.exp(-1.0), rel=1e-15)
        assert float(u1(0.0)) == 0.0

    def test_second_correction(self):
        _, _, u2 = formal_profiles(CurvatureData(0.0, 2.0))
        assert float(u2(1.0)) == pytest.approx(-2.0 * math.exp(-1.0), rel=1e-15)
        assert float(u2(0.0)) == 0.0

    def test_derivative_at_zero_reproduces_expansion(self):
        # -(u0 + u1/m + u2/m^2)'(0) equals the three-term energy expansion.
        curv = CurvatureData(3.0, 1.0)
        m = 50.0
        h = 1e-7
        u0, u1, u2 = formal_profiles(curv)

        def v(tau):
            return float(u0(tau)) + float(u1(tau)) / m + float(u2(tau)) / m**2

        deriv = (v(h) - v(0.0)) / h
        prob = TransverseProblem(m=m, curv=curv)
        assert -deriv == pytest.approx(expansion_lambda(prob), abs=1e-6)


class TestCutoff:
    def test_plateaus(self):
        s = np.array([0.0, 0.25, 0.5, 1.0, 1.5])
        np.testing.assert_array_equal(cutoff_chi(s), [1.0, 1.0, 1.0, 0.0, 0.0])

    def test_smoothness_at_junctions(self):
        for s0 in (0.5, 1.0):
            for d in (cutoff_chi_d1, cutoff_chi_d2):
                left = float(d(np.array([s0 - 1e-9]))[0])
                right = float(d(np.array([s0 + 1e-9]))[0])
                assert abs(left - right) <= 1e-5

    def test_derivatives_by_finite_differences(self):
        s = np.linspace(0.55, 0.95, 9)
        h = 1e-6
        d1 = (cutoff_chi(s + h) - cutoff_chi(s - h)) / (2.0 * h)
        np.testing.assert_allclose(cutoff_chi_d1(s), d1, atol=1e-6)
        h2 = 1e-4  # second differences need a larger step to beat roundoff
        d2 = (cutoff_chi(s + h2) - 2.0 * cutoff_chi(s) + cutoff_chi(s - h2)) / h2**2
        np.testing.assert_allclose(cutoff_chi_d2(s), d2, atol=1e-4)


class TestAnsatzResidual:
    def test_flat_residual_is_cutoff_only(self):
        # Without curvature the ansatz solves the equation exactly; what is
        # left decays like exp(-sqrt(m)/4) with a constant fitted coarsely.
        r25 = residual_of_ansatz(TransverseProblem(m=25.0, curv=FLAT))
        c = r25 / math.exp(-math.sqrt(25.0) / 4.0)
        r100 = residual_of_ansatz(TransverseProblem(m=100.0, curv=FLAT))
        assert r100 <= c * math.exp(-math.sqrt(100.0) / 4.0)

    def test_flat_residual_vanishes_for_wide_interval(self):
        assert residual_of_ansatz(TransverseProblem(m=2500.0, curv=FLAT)) <= 1e-12

    def test_third_order_rate_curved(self):
        masses = (100.0, 400.0, 1600.0)
        values = [
            residual_of_ansatz(TransverseProblem(m=m, curv=CurvatureData(3.0, 1.0))) * m**3
            for m in masses
        ]
        envelope = values[0]
        assert all(v <= envelope * (1.0 + 1e-9) for v in values[1:])

    def test_cutoff_scale_validation(self):
        with pytest.raises(ValueError):
            residual_of_ansatz(TransverseProblem(m=100.0, curv=FLAT), cutoff_scale=0.0)


class TestVariationalStructure:
    def test_minimality_against_test_family(self):
        prob = TransverseProblem(m=36.0, curv=CurvatureData(2.0, 1.0))
        sol = solve_transverse(prob)
        T = prob.half_width
        for c in (-0.4, 0.0, 0.3):
            def w(tau, c=c):
                return np.exp(-tau) * (1.0 - tau / T) + c * np.sin(math.pi * tau / T)

            def dw(tau, c=c):
                return (
                    -np.exp(-tau) * (1.0 - tau / T)
                    - np.exp(-tau) / T
                    + c * math.pi / T * np.cos(math.pi * tau / T)
                )

            assert transverse_form(prob, w, dw) >= sol.lam - 1e-9

    def test_pythagoras_identity(self):
        prob = TransverseProblem(m=36.0, curv=CurvatureData(2.0, 1.0))
        sol = solve_transverse(prob)
        T = prob.half_width

        def w(tau):
            return np.exp(-tau) * (1.0 - tau / T) + 0.2 * np.sin(2.0 * math.pi * tau / T)

        def dw(tau):
            return (
                -np.exp(-tau) * (1.0 - tau / T)
                - np.exp(-tau) / T
                + 0.4 * math.pi / T * np.cos(2.0 * math.pi * tau / T)
            )

        q_w = transverse_form(prob, w, dw)

        def diff(tau):
            return w(tau) - sol.evaluate(tau)[0]

        def ddiff(tau):
            return dw(tau) - sol.evaluate(tau)[1]

        q_diff = transverse_form(prob, diff, ddiff)
        assert abs(q_w - sol.lam - q_diff) <= 1e-8


class TestMassCheck:
    def test_flat_deviation_m4(self):
        sol = solve_transverse(TransverseProblem(m=4.0, curv=FLAT))
        expected = 0.5 - (math.sinh(4.0) / 4.0 - 1.0) / math.sinh(2.0) ** 2
        assert transverse_mass_check(sol) == pytest.approx(expected, abs=1e-9)

    def test_flat_deviation_shrinks(self):
        devs = [
            transverse_mass_check(solve_transverse(TransverseProblem(m=m, curv=FLAT)))
            for m in (4.0, 16.0, 64.0)
        ]
        assert devs[0] > devs[1] > devs[2]

    def test_curved_rate(self):
        masses = (49.0, 196.0, 784.0)
        devs = [
            transverse_mass_check(solve_transverse(TransverseProblem(m=m, curv=CurvatureData(3.0, 1.0))))
            for m in masses
        ]
        scaled = [d * m for d, m in zip(devs, masses)]
        assert all(s <= scaled[0] * (1.0 + 1e-9) for s in scaled[1:])


class TestValidation:
    def test_below_validity_floor_rejected(self):
        with pytest.raises(ValueError):
            TransverseProblem(m=25.0, curv=CurvatureData(3.0, 1.0))

    def test_solver_invariants(self):
        sol = solve_transverse(TransverseProblem(m=49.0, curv=CurvatureData(3.0, 1.0)))
        assert sol.lam > 0.0 and sol.mass > 0.0
        assert abs(sol.lam + sol.deriv0) <= 1e-8

    def test_tolerance_is_honored(self):
        loose = solve_transverse(
            TransverseProblem(m=4.0, curv=FLAT), ToleranceConfig(1e-8, 1e-8, 200)
        )
        assert loose.lam == pytest.approx(1.0 / math.tanh(2.0), rel=1e-7)
