import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import exact_single_charge_n, spherical_average
from ghostsim.core import PhysicsContext
from ghostsim.exceptions import ConfigurationError, DomainError
from ghostsim.integrals import (
    CutoffPair,
    RadialModeGrid,
    SeparationGeometry,
    angular_reduced_integrand,
    asymptotic_slope,
    charge_decoherence_scaling,
    mass_decoherence_scaling,
    one_minus_sinc,
    per_mode_distance2,
    sinc,
    total_photon_number,
    visibility,
)

ALPHA = PhysicsContext.natural().alpha


class TestSinc:
    def test_values(self):
        x = np.array([0.0, 1e-8, 1e-3, 0.5, 3.0, 100.0])
        ref = np.where(x == 0, 1.0, np.sin(x) / np.where(x == 0, 1, x))
        assert np.allclose(sinc(x), ref, rtol=1e-15, atol=1e-17)

    def test_one_minus_sinc_small_argument(self):
        # series x^2/6 - x^4/120 keeps full relative precision where 1 - sin(x)/x cancels
        x = 1e-5
        assert one_minus_sinc(x) == pytest.approx(x * x / 6 - x**4 / 120, rel=1e-14)
        assert one_minus_sinc(0.0) == 0.0


class TestCutoffsAndGrid:
    def test_default(self):
        c = CutoffPair.default()
        assert (c.k_min, c.k_max) == (1e-6, 1.0)

    @pytest.mark.parametrize("lo,hi", [(0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (-1.0, 1.0)])
    def test_invalid(self, lo, hi):
        with pytest.raises(ConfigurationError):
            CutoffPair(lo, hi)

    def test_grid_integrates_one_over_k(self):
        g = RadialModeGrid.log_uniform(1e-6, 1.0)
        assert g.n_nodes == 2048
        assert g.integrate(1.0 / g.k) == pytest.approx(math.log(1e6), rel=1e-14)

    def test_nodes_inside_cutoffs(self):
        g = RadialModeGrid.log_uniform(1e-3, 10.0, 64)
        assert g.k.min() > 1e-3 and g.k.max() < 10.0
        assert np.all(np.diff(g.k) > 0)

    def test_mismatched_grid_rejected(self):
        g = RadialModeGrid.log_uniform(1e-6, 1.0)
        with pytest.raises(ConfigurationError):
            total_photon_number(10.0, cutoffs=CutoffPair(1e-5, 1.0), grid=g)


class TestAngularReduction:
    def test_spherical_oracle(self, ctx):
        rng = np.random.default_rng(7)
        for _ in range(10):
            k = 10 ** rng.uniform(-3, 0.5)
            dr = 10 ** rng.uniform(-1, 1.5)
            geom = SeparationGeometry.along_x(dr)

            def f(dirs):
                return np.array([per_mode_distance2(k * d, geom, 1.0, ctx) for d in dirs])

            brute = k * k * spherical_average(f, 80, 80)
            assert angular_reduced_integrand(k, dr, 1.0, ctx) == pytest.approx(brute, rel=1e-6)

    def test_asymptotic_slope(self, ctx):
        k = 1e4
        assert angular_reduced_integrand(k, 50.0, 2.0, ctx) * k == pytest.approx(asymptotic_slope(2.0, ctx), rel=1e-4)
        assert asymptotic_slope(1.0, ctx) == pytest.approx(2 * ALPHA / math.pi, rel=1e-15)

    def test_finite_at_small_k(self, ctx):
        # (1 - sinc(k dr)) / k -> k dr^2 / 6
        k, dr = 1e-9, 3.0
        assert angular_reduced_integrand(k, dr, 1.0, ctx) == pytest.approx(2 * ALPHA / math.pi * k * dr * dr / 6, rel=1e-8)


class TestTotalPhotonNumber:
    @pytest.mark.parametrize("dr", [0.1, 1.0, 10.0, 100.0])
    def test_sici_oracle(self, dr):
        assert total_photon_number(dr) == pytest.approx(exact_single_charge_n(dr, 1.0, 1e-6, 1.0, ALPHA), rel=1e-12)

    def test_large_separation(self):
        assert total_photon_number(1e5) == pytest.approx(exact_single_charge_n(1e5, 1.0, 1e-6, 1.0, ALPHA), rel=1e-4)

    def test_zero_separation_and_zero_charge(self):
        assert total_photon_number(0.0) == 0.0
        assert total_photon_number(10.0, q=0.0) == 0.0

    def test_geometry_object(self):
        geom = SeparationGeometry((1, 2, 3), (4, 6, 3))
        assert geom.delta_r == pytest.approx(5.0)
        assert total_photon_number(geom) == pytest.approx(total_photon_number(5.0), rel=1e-14)

    def test_kmax_doubling_adds_log2(self):
        dr = 100.0
        n1 = total_photon_number(dr, cutoffs=CutoffPair(1e-6, 1.0))
        n2 = total_photon_number(dr, cutoffs=CutoffPair(1e-6, 2.0))
        assert n2 - n1 == pytest.approx(2 * ALPHA / math.pi * math.log(2), rel=0.01)

    def test_monotone_in_separation(self):
        drs = np.logspace(-1, 4, 30)
        ns = [total_photon_number(d) for d in drs]
        assert np.all(np.diff(ns) > 0)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.01, 1e3), st.floats(0.05, 50))
    def test_charge_squared(self, dr, q):
        assert total_photon_number(dr, q=q) == pytest.approx(q * q * total_photon_number(dr), rel=1e-12)

    def test_convergence_order(self):
        # smooth case, 2-point panels: error falls at least quadratically with node count
        exact = exact_single_charge_n(1.0, 1.0, 1e-6, 1.0, ALPHA)
        errs = []
        for n in (32, 64, 128):
            g = RadialModeGrid.log_uniform(1e-6, 1.0, n, points_per_panel=2)
            errs.append(abs(total_photon_number(1.0, grid=g) - exact))
        orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(orders >= 2.0)

    def test_si_context_agrees(self):
        assert total_photon_number(100.0, ctx=PhysicsContext.si()) == pytest.approx(total_photon_number(100.0), rel=1e-10)


class TestVisibilityAndScaling:
    def test_visibility(self):
        assert visibility(0.0) == 1.0
        assert visibility(2.0) == pytest.approx(math.exp(-1), rel=1e-15)
        with pytest.raises(DomainError):
            visibility(-0.1)

    def test_charge_scaling(self, ctx):
        assert charge_decoherence_scaling(0.0, ctx) == 0.0
        assert charge_decoherence_scaling(1.0, ctx) == pytest.approx(-math.expm1(-ALPHA), rel=1e-14)
        # Q equal to the Planck charge
        qp = 1 / math.sqrt(ALPHA)
        assert charge_decoherence_scaling(qp, ctx) == pytest.approx(1 - math.exp(-1), rel=1e-12)
        assert charge_decoherence_scaling(1e3, ctx) == pytest.approx(1.0, abs=1e-12)

    def test_mass_scaling(self, ctx):
        mp = ctx.planck_mass
        assert mass_decoherence_scaling(mp, ctx) == pytest.approx(1 - math.exp(-1), rel=1e-12)
        assert mass_decoherence_scaling(1.0, ctx) == pytest.approx((1.0 / mp) ** 2, rel=1e-9)
        assert mp == pytest.approx(2.389e22, rel=1e-3)

    def test_scaling_monotone(self, ctx):
        qs = np.linspace(0, 50, 51)
        vals = [charge_decoherence_scaling(q, ctx) for q in qs]
        assert np.all(np.diff(vals) > 0)
