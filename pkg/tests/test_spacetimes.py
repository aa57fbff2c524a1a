"""Catalog frames, scale factors and the FRW coordinate map."""

import math

import numpy as np
import pytest

from curvedwork.errors import InputError
from curvedwork.frame import FramePoint, metric_components, redshift_weakfield, validate_frame
from curvedwork.spacetimes import (
    ScaleFactor,
    desitter_frame,
    desitter_scale_factor,
    flat_frame,
    frw_fermi_map,
    frw_frame,
    hubble_from_lambda,
    static_scale_factor,
    uniform_gravity_frame,
)


def finite_difference_d1(sf, t, h=1e-6):
    return (sf.value(t + h) - sf.value(t - h)) / (2 * h)


class TestScaleFactors:
    @pytest.mark.parametrize("t", [-1.0, 0.0, 0.7, 2.3])
    def test_desitter_derivatives_consistent(self, t):
        sf = desitter_scale_factor(0.4)
        assert sf.value(t) > 0
        assert finite_difference_d1(sf, t) == pytest.approx(sf.d1(t), rel=1e-9)
        d2_fd = (sf.d1(t + 1e-6) - sf.d1(t - 1e-6)) / 2e-6
        assert d2_fd == pytest.approx(sf.d2(t), rel=1e-8)

    def test_desitter_requires_positive_hubble(self):
        with pytest.raises(InputError):
            desitter_scale_factor(0.0)

    def test_hubble_from_lambda(self):
        lam = 0.12
        h = hubble_from_lambda(lam)
        assert h * h == pytest.approx(lam / 3.0, rel=1e-15)
        with pytest.raises(InputError):
            hubble_from_lambda(-1.0)


class TestCatalogFrames:
    def test_flat_frame_zero_everywhere(self):
        frame = flat_frame()
        assert np.all(frame.accel(2.0) == 0)
        assert np.all(frame.riemann_ikjl(-1.0) == 0)
        assert redshift_weakfield(frame, FramePoint(tau=0.0, x=np.array([0.1, 0.2, 0.0]))) == 1.0

    def test_uniform_gravity_zero_g_is_flat(self):
        frame = uniform_gravity_frame(0.0)
        assert np.all(frame.accel(0.0) == 0)
        m = metric_components(frame, FramePoint(tau=0.0, x=np.array([0.3, 0.0, 0.0])))
        assert m.g_tt == -1.0

    def test_static_universe_curvature_vanishes(self):
        frame = frw_frame(static_scale_factor())
        assert np.all(frame.riemann_titj(1.0) == 0)
        assert np.all(frame.riemann_ikjl(1.0) == 0)

    def test_desitter_curvature_components(self):
        hubble = 0.35
        frame = desitter_frame(hubble)
        for tau in (0.0, 1.2):
            np.testing.assert_allclose(
                frame.riemann_titj(tau), -(hubble**2) * np.eye(3), atol=1e-15
            )
            r = frame.riemann_ikjl(tau)
            # independent components R_{xyxy} = R_{xzxz} = R_{yzyz} = H^2
            assert r[0, 1, 0, 1] == pytest.approx(hubble**2)
            assert r[0, 2, 0, 2] == pytest.approx(hubble**2)
            assert r[1, 2, 1, 2] == pytest.approx(hubble**2)
        assert np.trace(frame.riemann_titj(0.0)) == pytest.approx(-3 * hubble**2)

    def test_desitter_matches_generic_frw(self):
        hubble = 0.27
        a = desitter_frame(hubble)
        b = frw_frame(desitter_scale_factor(hubble))
        rng = np.random.default_rng(5)
        for tau in rng.uniform(-2, 2, size=8):
            np.testing.assert_allclose(a.riemann_titj(tau), b.riemann_titj(tau), atol=1e-14)
            np.testing.assert_allclose(a.riemann_ikjl(tau), b.riemann_ikjl(tau), atol=1e-14)

    def test_hubble_to_zero_limit_is_flat(self):
        frame = desitter_frame(1e-9)
        assert np.max(np.abs(frame.riemann_titj(0.0))) < 1e-17
        assert np.max(np.abs(frame.riemann_ikjl(0.0))) < 1e-17

    def test_catalog_frames_pass_validation(self):
        taus = list(np.linspace(-1, 2, 5))
        for frame in (flat_frame(), uniform_gravity_frame(0.2), desitter_frame(0.5)):
            result = validate_frame(frame, taus)
            assert result.passed
            assert result.max_violation == 0.0

    def test_scale_factor_positivity_enforced(self):
        sf = ScaleFactor(value=lambda t: -1.0, d1=lambda t: 0.0, d2=lambda t: 0.0)
        frame = frw_frame(sf)
        with pytest.raises(InputError):
            frame.riemann_titj(0.0)


class TestFrwFermiMap:
    def test_on_worldline_identity(self):
        fmap = frw_fermi_map(desitter_scale_factor(0.4))
        assert fmap.cosmic_time(1.7, np.zeros(3)) == 1.7
        np.testing.assert_array_equal(fmap.comoving_position(1.7, np.zeros(3)), np.zeros(3))

    def test_static_universe_is_identity(self):
        fmap = frw_fermi_map(static_scale_factor())
        x = np.array([0.3, -0.1, 0.2])
        assert fmap.cosmic_time(0.9, x) == 0.9
        np.testing.assert_array_equal(fmap.comoving_position(0.9, x), x)

    def test_desitter_small_r(self):
        hubble, tau = 0.3, 0.8
        fmap = frw_fermi_map(desitter_scale_factor(hubble))
        x = np.array([0.05, 0.02, -0.01])
        r2 = x @ x
        assert fmap.cosmic_time(tau, x) == pytest.approx(tau - 0.5 * hubble * r2, abs=1e-15)
        expected = x * math.exp(-hubble * tau) * (1 + hubble**2 * r2 / 3.0)
        np.testing.assert_allclose(fmap.comoving_position(tau, x), expected, atol=1e-15)
