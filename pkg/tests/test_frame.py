"""Fermi-frame geometry: metric expansion, redshift, time dilation."""

import math

import numpy as np
import pytest

from curvedwork.errors import DomainError, GeometryError, InputError
from curvedwork.frame import (
    FrameData,
    FramePoint,
    metric_components,
    redshift_exact,
    redshift_weakfield,
    time_dilation,
    validate_frame,
)
from curvedwork.spacetimes import desitter_frame, flat_frame, uniform_gravity_frame


def point(x, tau=0.0):
    return FramePoint(tau=tau, x=np.asarray(x, dtype=float))


class TestMetricComponents:
    def test_flat_frame_is_exact_minkowski(self):
        m = metric_components(flat_frame(), point([0.3, -0.2, 0.1]))
        assert m.g_tt == -1.0
        assert np.all(m.g_ti == 0.0)
        assert np.array_equal(m.g_ij, np.eye(3))

    def test_uniform_gravity_gtt(self):
        g = 0.04
        m = metric_components(uniform_gravity_frame(g), point([0.5, 0.0, 0.0]))
        assert m.g_tt == pytest.approx(-((1 + g * 0.5) ** 2), abs=1e-15)
        # agrees with the weak-field form -(1 + 2gx) at linear order
        assert abs(m.g_tt - (-(1 + 2 * g * 0.5))) < 2 * (g * 0.5) ** 2

    def test_desitter_gtt(self):
        hubble = 0.25
        for r in (0.2, 0.7):
            m = metric_components(desitter_frame(hubble), point([0.0, r, 0.0], tau=1.3))
            assert m.g_tt == pytest.approx(-(1 - hubble**2 * r**2), abs=1e-14)

    def test_desitter_spatial_block(self):
        hubble = 0.3
        x = np.array([0.3, -0.2, 0.4])
        m = metric_components(desitter_frame(hubble), point(x))
        r2 = x @ x
        expected = np.eye(3) - hubble**2 * (r2 * np.eye(3) - np.outer(x, x)) / 3.0
        np.testing.assert_allclose(m.g_ij, expected, atol=1e-14)

    def test_validity_radius_enforced(self):
        frame = uniform_gravity_frame(1.0)
        with pytest.raises(DomainError):
            metric_components(frame, point([0.5, 0.0, 0.0]))  # |a.x| = 0.5 > 0.1
        hard = FrameData(
            accel=frame.accel,
            riemann_titj=frame.riemann_titj,
            riemann_tjik=frame.riemann_tjik,
            riemann_ikjl=frame.riemann_ikjl,
            validity_radius=0.1,
        )
        with pytest.raises(DomainError):
            metric_components(hard, point([0.0, 0.2, 0.0]))

    def test_nonfinite_tensor_rejected(self):
        frame = FrameData(
            accel=lambda tau: np.array([np.nan, 0.0, 0.0]),
            riemann_titj=lambda tau: np.zeros((3, 3)),
            riemann_tjik=lambda tau: np.zeros((3, 3, 3)),
            riemann_ikjl=lambda tau: np.zeros((3, 3, 3, 3)),
        )
        with pytest.raises(InputError):
            metric_components(frame, point([0.1, 0.0, 0.0]))

    def test_degenerate_spatial_block_rejected(self):
        # large curvature drives g_ij out of positive definiteness
        frame = FrameData(
            accel=lambda tau: np.zeros(3),
            riemann_titj=lambda tau: np.zeros((3, 3)),
            riemann_tjik=lambda tau: np.zeros((3, 3, 3)),
            riemann_ikjl=desitter_frame(2.0).riemann_ikjl,
            validity_radius=10.0,
        )
        with pytest.raises(GeometryError):
            metric_components(frame, point([1.0, 1.0, 0.0]))


class TestRedshift:
    def test_flat(self):
        m = metric_components(flat_frame(), point([0.1, 0.2, 0.3]))
        assert redshift_exact(m) == 1.0
        assert redshift_weakfield(flat_frame(), point([0.1, 0.2, 0.3])) == 1.0

    def test_uniform_gravity(self):
        g, x = 0.06, 0.8
        frame = uniform_gravity_frame(g)
        m = metric_components(frame, point([x, 0.0, 0.0]))
        assert redshift_exact(m) == pytest.approx(1 + g * x, abs=1e-14)
        assert redshift_weakfield(frame, point([x, 0.0, 0.0])) == pytest.approx(
            1 + g * x, abs=1e-15
        )

    def test_desitter(self):
        hubble, r = 0.3, 0.6
        m = metric_components(desitter_frame(hubble), point([r, 0.0, 0.0]))
        assert redshift_exact(m) == pytest.approx(math.sqrt(1 - hubble**2 * r**2), abs=1e-14)

    def test_weakfield_convergence_order(self):
        # frame with both acceleration and curvature; the difference between
        # the exact and expanded redshift must vanish at least quadratically
        ds = desitter_frame(0.4)
        frame = FrameData(
            accel=lambda tau: np.array([0.2, 0.1, 0.0]),
            riemann_titj=ds.riemann_titj,
            riemann_tjik=ds.riemann_tjik,
            riemann_ikjl=ds.riemann_ikjl,
        )
        direction = np.array([0.6, -0.5, 0.4])
        direction /= np.linalg.norm(direction)
        radii = 0.2 * 0.5 ** np.arange(6)
        diffs = [
            abs(
                redshift_exact(metric_components(frame, point(r * direction)))
                - redshift_weakfield(frame, point(r * direction))
            )
            for r in radii
        ]
        slope = np.polyfit(np.log(radii), np.log(diffs), 1)[0]
        assert slope >= 2.0


class TestTimeDilation:
    def test_flat_at_rest(self):
        assert time_dilation(flat_frame(), point([0.0, 0.0, 0.0]), [0, 0, 0], 1.0) == 1.0

    def test_flat_kinetic_only(self):
        p = np.array([0.02, -0.01, 0.03])
        mass = 2.5
        z = time_dilation(flat_frame(), point([0.4, 0.0, 0.0]), p, mass)
        assert z == 1.0 - (p @ p) / (2 * mass**2)

    def test_uniform_gravity_at_rest(self):
        g, x = 0.08, 0.9
        z = time_dilation(uniform_gravity_frame(g), point([x, 0.0, 0.0]), [0, 0, 0], 1.0)
        assert z == pytest.approx(1 + g * x, abs=1e-15)

    def test_linearity_in_each_term(self):
        # closed form vs finite-difference slopes in a.x, the tidal term and p^2
        hubble = 0.2
        ds = desitter_frame(hubble)
        mass = 1.5

        def make(accel_x):
            return FrameData(
                accel=lambda tau: np.array([accel_x, 0.0, 0.0]),
                riemann_titj=ds.riemann_titj,
                riemann_tjik=ds.riemann_tjik,
                riemann_ikjl=ds.riemann_ikjl,
            )

        x = np.array([0.3, 0.0, 0.0])
        h = 1e-6
        da = (
            time_dilation(make(0.1 + h), point(x), [0, 0, 0], mass)
            - time_dilation(make(0.1 - h), point(x), [0, 0, 0], mass)
        ) / (2 * h)
        assert da == pytest.approx(x[0], rel=1e-8)
        p = 0.05
        dp2 = (
            time_dilation(make(0.1), point(x), [p + h, 0, 0], mass)
            - time_dilation(make(0.1), point(x), [p - h, 0, 0], mass)
        ) / (2 * h)
        assert dp2 == pytest.approx(-p / mass**2, rel=1e-6)

    def test_nonpositive_mass_rejected(self):
        with pytest.raises(InputError):
            time_dilation(flat_frame(), point([0, 0, 0]), [0, 0, 0], 0.0)
        with pytest.raises(InputError):
            time_dilation(flat_frame(), point([0, 0, 0]), [0, 0, 0], -1.0)


class TestValidateFrame:
    def test_flat_frame_passes_exactly(self):
        result = validate_frame(flat_frame(), [0.0, 1.0, 2.0])
        assert result.passed
        assert result.max_violation == 0.0

    def test_desitter_frame_passes(self):
        result = validate_frame(desitter_frame(0.5), list(np.linspace(0, 3, 7)))
        assert result.passed

    def test_asymmetric_titj_reported(self):
        bad = np.zeros((3, 3))
        bad[0, 1] = 1e-3
        frame = FrameData(
            accel=lambda tau: np.zeros(3),
            riemann_titj=lambda tau: bad,
            riemann_tjik=lambda tau: np.zeros((3, 3, 3)),
            riemann_ikjl=lambda tau: np.zeros((3, 3, 3, 3)),
        )
        result = validate_frame(frame, [0.0])
        assert not result.passed
        assert result.violations["titj_symmetric"] == pytest.approx(1e-3)

    def test_empty_samples_rejected(self):
        with pytest.raises(InputError):
            validate_frame(flat_frame(), [])
