"""Exterior model problems: per-mode energies, effective functional, decay."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mitbag.exterior import (
    AgmonDivergenceError,
    BoundaryDatum,
    SphereMode,
    TorusMode,
    agmon_decay_check,
    ball_exterior_dtn,
    effective_energy,
    exterior_energy,
    halfspace_mode_energy,
    mass_estimate_check,
    sobolev_h32_norm_sq,
    sphere_datum,
    torus_datum,
)
from mitbag.geometry import BallExterior, FlatTorusHalfSpace

FOUR_PI = 4.0 * math.pi


class TestHalfspaceMode:
    def test_constant_datum(self):
        assert halfspace_mode_energy(7.0, 0.0) == 7.0

    def test_pythagorean_triple(self):
        assert halfspace_mode_energy(4.0, 3.0) == pytest.approx(5.0, abs=0.0)

    def test_taylor_remainder(self):
        m, xi = 100.0, 2.0
        exact = halfspace_mode_energy(m, xi)
        approx = m + xi**2 / (2.0 * m)
        assert abs(exact - approx) <= xi**4 / (8.0 * m**3)

    def test_validation(self):
        with pytest.raises(ValueError):
            halfspace_mode_energy(0.0, 1.0)
        with pytest.raises(ValueError):
            halfspace_mode_energy(1.0, -1.0)


class TestBallDtn:
    @pytest.mark.parametrize("m", (1.0, 10.0, 100.0, 1e4, 1e6))
    @pytest.mark.parametrize("R", (0.5, 1.0, 2.0))
    def test_monopole_closed_form(self, m, R):
        assert ball_exterior_dtn(m, R, 0) == pytest.approx(m + 1.0 / R, rel=1e-14)

    @pytest.mark.parametrize("m", (1.0, 10.0, 100.0, 1e4))
    def test_dipole_closed_form(self, m):
        expected = m + 1.0 + 1.0 / (m + 1.0)
        assert ball_exterior_dtn(m, 1.0, 1) == pytest.approx(expected, rel=1e-14)

    def test_gap_to_effective_expansion(self):
        m = 100.0
        exact = ball_exterior_dtn(m, 1.0, 1)
        assert exact - 101.01 == pytest.approx(1.0 / (m + 1.0) - 1.0 / m, rel=1e-10)

    def test_monotone_in_mass(self):
        values = [ball_exterior_dtn(m, 1.0, 2) for m in (10.0, 20.0, 40.0, 80.0)]
        assert all(b > a for a, b in zip(values, values[1:]))


class TestEffectiveEnergy:
    def test_sphere_monopole(self):
        v = sphere_datum(1.0, {0: 1.0})
        assert effective_energy(v, 50.0) == pytest.approx(51.0, rel=1e-15)

    def test_sphere_dipole(self):
        v = sphere_datum(1.0, {1: 1.0})
        m = 50.0
        assert effective_energy(v, m) == pytest.approx(m + 1.0 + 1.0 / m, rel=1e-15)

    def test_flat_mode(self):
        v = torus_datum(2.0 * math.pi, {(2, 0): 1.0})
        m = 40.0
        assert effective_energy(v, m) == pytest.approx(m + 4.0 / (2.0 * m), rel=1e-14)


class TestExteriorEnergy:
    def test_constant_sphere_datum(self):
        # v = 1 on the unit sphere: coefficient sqrt(4 pi) on the unit mode.
        v = sphere_datum(1.0, {0: math.sqrt(FOUR_PI)})
        m = 30.0
        sol = exterior_energy(v, m)
        assert sol.energy == pytest.approx(FOUR_PI * (m + 1.0), rel=1e-13)
        assert sol.exterior_mass == pytest.approx(FOUR_PI / (2.0 * m), rel=1e-10)

    def test_flat_single_mode(self):
        v = torus_datum(2.0 * math.pi, {(1, 1): 2.0})
        m = 12.0
        xi = math.sqrt(2.0)
        sol = exterior_energy(v, m)
        assert sol.energy == pytest.approx(4.0 * math.hypot(m, xi), rel=1e-14)
        assert sol.exterior_mass == pytest.approx(4.0 / (2.0 * math.hypot(m, xi)), rel=1e-14)

    def test_empty_datum(self):
        v = BoundaryDatum(geometry=BallExterior(1.0), modes=())
        sol = exterior_energy(v, 10.0)
        assert sol.energy == 0.0 and sol.exterior_mass == 0.0

    @settings(max_examples=20, deadline=None)
    @given(
        c0=st.floats(-2.0, 2.0),
        c1=st.floats(-2.0, 2.0),
        c3=st.floats(-2.0, 2.0),
    )
    def test_mode_additivity(self, c0, c1, c3):
        coeffs = {0: c0, 1: c1, 3: c3}
        v = sphere_datum(1.0, coeffs)
        m = 75.0
        sol = exterior_energy(v, m)
        expected = sum(abs(c) ** 2 * ball_exterior_dtn(m, 1.0, ell) for ell, c in coeffs.items())
        assert sol.energy == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_effective_rate_inside_bound(self):
        v = sphere_datum(1.0, {0: 1.0, 1: 0.7, 3: 0.4})
        h32 = sobolev_h32_norm_sq(v)
        values = []
        for m in (1e2, 1e3, 1e4):
            gap = abs(exterior_energy(v, m).energy - effective_energy(v, m))
            values.append(m**1.5 * gap / h32)
        assert values[0] >= values[1] >= values[2]


class TestMassEstimate:
    def test_monopole_is_exact(self):
        v = sphere_datum(1.0, {0: 2.0})
        m = 50.0
        assert mass_estimate_check(exterior_energy(v, m), v, m) <= 1e-10

    def test_flat_mode_bounded(self):
        v = torus_datum(2.0 * math.pi, {(2, 1): 1.0})
        xi2 = 5.0
        values = []
        for m in (10.0, 100.0, 1000.0):
            sol = exterior_energy(v, m)
            # Closed form: mass = 1/(2 sqrt(m^2 + xi^2)).
            assert sol.exterior_mass == pytest.approx(
                1.0 / (2.0 * math.sqrt(m * m + xi2)), rel=1e-14
            )
            values.append(mass_estimate_check(sol, v, m))
        assert max(values) <= values[0] * (1.0 + 1e-9)

    def test_zero_datum(self):
        v = BoundaryDatum(geometry=FlatTorusHalfSpace(1.0), modes=())
        assert mass_estimate_check(exterior_energy(v, 5.0), v, 5.0) == 0.0

    def test_sobolev_norm_conventions(self):
        v = sphere_datum(1.0, {0: 1.0, 2: 2.0})
        assert sobolev_h32_norm_sq(v) == pytest.approx(1.0 + 4.0 * 7.0**1.5, rel=1e-15)
        w = torus_datum(2.0 * math.pi, {(1, 0): 1.0})
        assert sobolev_h32_norm_sq(w) == pytest.approx(2.0**1.5, rel=1e-14)


class TestAgmonDecay:
    def test_monopole_ratio_is_exact(self):
        # The r^2 volume factor cancels the profile's 1/r^2, so the ratio is
        # exactly 1/(1-gamma) at l = 0.
        for gamma in (0.3, 0.5, 0.9):
            ratio = agmon_decay_check(200.0, 1.0, 0, gamma)
            assert ratio == pytest.approx(1.0 / (1.0 - gamma), rel=1e-9)

    def test_small_rate_limit(self):
        assert agmon_decay_check(100.0, 1.0, 0, 1e-6) == pytest.approx(1.0, rel=1e-5)

    @pytest.mark.parametrize("gamma", (0.3, 0.5, 0.9))
    @pytest.mark.parametrize("m", (1e2, 1e3, 1e4))
    def test_dipole_bounded(self, gamma, m):
        assert agmon_decay_check(m, 1.0, 1, gamma) <= 1.1 / (1.0 - gamma)

    def test_divergent_rate_rejected(self):
        with pytest.raises(AgmonDivergenceError):
            agmon_decay_check(100.0, 1.0, 0, 1.0)
        with pytest.raises(AgmonDivergenceError):
            agmon_decay_check(100.0, 1.0, 1, 1.5)


class TestBoundaryDatumValidation:
    def test_mode_geometry_mismatch(self):
        with pytest.raises(ValueError):
            BoundaryDatum(geometry=BallExterior(1.0), modes=((TorusMode(1, 0), 1.0),))
        with pytest.raises(ValueError):
            BoundaryDatum(geometry=FlatTorusHalfSpace(1.0), modes=((SphereMode(0), 1.0),))

    def test_duplicate_modes_rejected(self):
        with pytest.raises(ValueError):
            BoundaryDatum(
                geometry=BallExterior(1.0),
                modes=((SphereMode(1), 1.0), (SphereMode(1), 2.0)),
            )

    def test_parseval_norm(self):
        v = sphere_datum(1.0, {0: 3.0, 2: 4.0})
        assert v.boundary_norm_sq == pytest.approx(25.0, abs=0.0)

    def test_torus_frequency(self):
        v = torus_datum(math.pi, {(3, 4): 1.0})
        assert v.xi_norm(v.modes[0][0]) == pytest.approx(10.0, rel=1e-15)
