"""Catalog of concrete Fermi-frame builders and FRW coordinate maps.

All builders return reentrant function bundles; for FRW frames the scale
factor is evaluated at cosmic time t = tau, since on the comoving worldline
cosmic time coincides with proper time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InputError
from .frame import FrameData

_DELTA = np.eye(3)


@dataclass(frozen=True)
class ScaleFactor:
    """FRW scale factor a(t) with its first two cosmic-time derivatives."""

    value: Callable[[float], float]
    d1: Callable[[float], float]
    d2: Callable[[float], float]


@dataclass(frozen=True)
class FrwFermiMap:
    """Map from Fermi coordinates (tau, x) to FRW coordinates (t, X), O(r^4) truncation."""

    cosmic_time: Callable[[float, np.ndarray], float]
    comoving_position: Callable[[float, np.ndarray], np.ndarray]


def static_scale_factor() -> ScaleFactor:
    """Static universe, a(t) = 1."""
    return ScaleFactor(value=lambda t: 1.0, d1=lambda t: 0.0, d2=lambda t: 0.0)


def desitter_scale_factor(hubble: float) -> ScaleFactor:
    """Exponential expansion a(t) = exp(H t) driven by a positive cosmological constant."""
    if hubble <= 0:
        raise InputError(f"hubble must be positive, got {hubble}")
    return ScaleFactor(
        value=lambda t: math.exp(hubble * t),
        d1=lambda t: hubble * math.exp(hubble * t),
        d2=lambda t: hubble * hubble * math.exp(hubble * t),
    )


def hubble_from_lambda(lam: float) -> float:
    """Hubble parameter of the constant-dominated universe, H = sqrt(lambda/3)."""
    if lam <= 0:
        raise InputError(f"cosmological constant must be positive, got {lam}")
    return math.sqrt(lam / 3.0)


def flat_frame() -> FrameData:
    """Inertial frame in flat spacetime: zero acceleration and curvature."""
    return FrameData(
        accel=lambda tau: np.zeros(3),
        riemann_titj=lambda tau: np.zeros((3, 3)),
        riemann_tjik=lambda tau: np.zeros((3, 3, 3)),
        riemann_ikjl=lambda tau: np.zeros((3, 3, 3, 3)),
    )


def uniform_gravity_frame(g: float) -> FrameData:
    """Uniformly accelerated frame equivalent to a homogeneous gravitational field.

    Acceleration (g, 0, 0), all curvature components zero.
    """
    a = np.array([g, 0.0, 0.0])
    return FrameData(
        accel=lambda tau: a,
        riemann_titj=lambda tau: np.zeros((3, 3)),
        riemann_tjik=lambda tau: np.zeros((3, 3, 3)),
        riemann_ikjl=lambda tau: np.zeros((3, 3, 3, 3)),
    )


def _checked(sf: ScaleFactor, t: float) -> float:
    a = sf.value(t)
    if a <= 0:
        raise InputError(f"scale factor must stay positive, got a({t}) = {a}")
    return a


def frw_frame(sf: ScaleFactor) -> FrameData:
    """Comoving frame of a spatially flat FRW universe.

    Curvature in the Fermi frame: R_{txtx} = R_{tyty} = R_{tztz} = -addot/a and
    R_{xyxy} = R_{xzxz} = R_{yzyz} = (adot/a)^2, with the remaining components
    generated by the Riemann symmetries.  The worldline is geodesic (zero
    acceleration).
    """

    def titj(tau: float) -> np.ndarray:
        a = _checked(sf, tau)
        return -(sf.d2(tau) / a) * _DELTA

    def ikjl(tau: float) -> np.ndarray:
        a = _checked(sf, tau)
        k = (sf.d1(tau) / a) ** 2
        # indexed [i, k, j, l]: K (d_ij d_kl - d_il d_kj) realizes all pair symmetries
        return k * (
            np.einsum("ij,kl->ikjl", _DELTA, _DELTA)
            - np.einsum("il,kj->ikjl", _DELTA, _DELTA)
        )

    return FrameData(
        accel=lambda tau: np.zeros(3),
        riemann_titj=titj,
        riemann_tjik=lambda tau: np.zeros((3, 3, 3)),
        riemann_ikjl=ikjl,
    )


def desitter_frame(hubble: float) -> FrameData:
    """Comoving frame of the de Sitter universe with Hubble parameter H."""
    return frw_frame(desitter_scale_factor(hubble))


def frw_fermi_map(sf: ScaleFactor) -> FrwFermiMap:
    """Coordinate map between Fermi and FRW coordinates near the comoving worldline.

    t = tau - (adot/2a) r^2, X^i = (x^i/a)(1 + (adot/a)^2 r^2 / 3), both with
    O(r^4) truncation; scale-factor quantities evaluated at t = tau.
    """

    def cosmic_time(tau: float, x) -> float:
        x = np.asarray(x, dtype=float)
        a = _checked(sf, tau)
        return float(tau - 0.5 * (sf.d1(tau) / a) * (x @ x))

    def comoving_position(tau: float, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        a = _checked(sf, tau)
        h2 = (sf.d1(tau) / a) ** 2
        return (x / a) * (1.0 + (h2 / 3.0) * (x @ x))

    return FrwFermiMap(cosmic_time=cosmic_time, comoving_position=comoving_position)
