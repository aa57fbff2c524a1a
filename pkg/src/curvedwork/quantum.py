"""Finite-dimensional quantum mechanics on a truncated Hilbert space.

Dense complex matrices with checked structure, Gibbs states computed via
eigendecomposition, a midpoint exponential-product propagator for
time-dependent Hamiltonians, and the first-order interaction-picture
amplitude for the curvature-driven oscillator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import InputError, NumericError

HERMITICITY_TOL = 1e-12
UNITARITY_TOL = 1e-9
DEGENERACY_RTOL = 1e-9


@dataclass(frozen=True)
class HermitianOperator:
    """Dense Hermitian matrix; hermiticity enforced at construction."""

    entries: np.ndarray
    tol: float = HERMITICITY_TOL

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError(f"operator must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InputError("non-finite operator entries")
        dev = float(np.max(np.abs(m - m.conj().T)))
        if dev > self.tol:
            raise InputError(f"matrix is not Hermitian: max deviation {dev:.3g}")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class UnitaryOperator:
    """Dense unitary matrix; unitarity enforced at construction."""

    entries: np.ndarray
    tol: float = UNITARITY_TOL

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError(f"operator must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise NumericError("non-finite unitary entries")
        dev = float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))
        if dev > self.tol:
            raise InputError(f"matrix is not unitary: max deviation {dev:.3g}")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def unitarity_defect(self) -> float:
        m = self.entries
        return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def identity_unitary(dim: int) -> UnitaryOperator:
    return UnitaryOperator(np.eye(dim, dtype=complex))


@dataclass(frozen=True)
class EnergyBasis:
    """Ascending eigenvalues with eigenvector columns and degeneracy flags."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    degenerate: np.ndarray = field(default=None)

    def __post_init__(self):
        w = np.asarray(self.eigenvalues, dtype=float)
        v = np.asarray(self.eigenvectors, dtype=complex)
        if np.any(np.diff(w) < 0):
            raise InputError("eigenvalues must be ascending")
        object.__setattr__(self, "eigenvalues", w)
        object.__setattr__(self, "eigenvectors", v)
        if self.degenerate is None:
            scale = max(float(np.max(np.abs(w))), 1.0)
            gaps = np.diff(w)
            deg = np.zeros(w.size, dtype=bool)
            small = gaps < DEGENERACY_RTOL * scale
            deg[:-1] |= small
            deg[1:] |= small
            object.__setattr__(self, "degenerate", deg)


def energy_basis(op: HermitianOperator) -> EnergyBasis:
    """Eigendecomposition of a Hermitian operator, checked for faithful reconstruction."""
    w, v = np.linalg.eigh(op.entries)
    recon = float(np.max(np.abs(v @ np.diag(w) @ v.conj().T - op.entries)))
    scale = max(float(np.max(np.abs(w))), 1.0)
    if recon > 1e-10 * scale:
        raise NumericError(f"eigendecomposition reconstruction error {recon:.3g}")
    return EnergyBasis(eigenvalues=w, eigenvectors=v)


@dataclass(frozen=True)
class ThermalState:
    """Gibbs state e^(-beta H)/Z with its inverse temperature and log partition function."""

    beta: float
    density: np.ndarray
    log_partition: float


def thermal_state(op: HermitianOperator, beta: float) -> ThermalState:
    """Thermal state of a Hamiltonian, overflow-safe via a spectral shift."""
    if beta <= 0:
        raise InputError(f"beta must be positive, got {beta}")
    basis = energy_basis(op)
    w, v = basis.eigenvalues, basis.eigenvectors
    shift = float(w[0])
    boltz = np.exp(-beta * (w - shift))
    z_shifted = float(np.sum(boltz))
    rho = (v * (boltz / z_shifted)) @ v.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return ThermalState(beta=beta, density=rho, log_partition=math.log(z_shifted) - beta * shift)


def two_level_hamiltonian(eps: float) -> HermitianOperator:
    """Two-level system with energies 0 and eps."""
    if eps <= 0:
        raise InputError(f"eps must be positive, got {eps}")
    return HermitianOperator(np.diag([0.0, eps]).astype(complex))


def qho_hamiltonian(mass: float, omega: float, dim: int) -> HermitianOperator:
    """Truncated harmonic oscillator, diag((n + 1/2) omega) in the Fock basis."""
    if mass <= 0 or omega <= 0:
        raise InputError("mass and omega must be positive")
    if dim < 2:
        raise InputError(f"dim must be at least 2, got {dim}")
    n = np.arange(dim)
    return HermitianOperator(np.diag((n + 0.5) * omega).astype(complex))


def x_squared_element(mass: float, omega: float, n: int, m: int) -> float:
    """Single matrix element <n|x^2|m> in the Fock basis (0-based indices)."""
    if mass <= 0 or omega <= 0:
        raise InputError("mass and omega must be positive")
    pref = 1.0 / (2.0 * mass * omega)
    if n == m - 2:
        return pref * math.sqrt(m * (m - 1))
    if n == m:
        return pref * (2 * m + 1)
    if n == m + 2:
        return pref * math.sqrt((m + 1) * (m + 2))
    return 0.0


def x_squared_matrix(mass: float, omega: float, dim: int) -> HermitianOperator:
    """Position-squared operator on the truncated Fock space."""
    if mass <= 0 or omega <= 0:
        raise InputError("mass and omega must be positive")
    n = np.arange(dim)
    m = np.zeros((dim, dim))
    m[n, n] = 2 * n + 1
    off = np.sqrt((n[:-2] + 1) * (n[:-2] + 2))
    m[n[:-2], n[:-2] + 2] = off
    m[n[:-2] + 2, n[:-2]] = off
    return HermitianOperator((m / (2.0 * mass * omega)).astype(complex))


def propagator(hamiltonian_path, tau0: float, tau1: float, steps: int) -> UnitaryOperator:
    """Time-ordered propagator by the midpoint exponential-product rule.

    U = prod_j exp(-i H(tau_j + dt/2) dt) applied right to left; each factor
    is exactly unitary (Hermitian eigendecomposition), global error O(dt^2).
    """
    if tau1 <= tau0:
        raise InputError(f"need tau1 > tau0, got [{tau0}, {tau1}]")
    if steps < 1:
        raise InputError(f"steps must be at least 1, got {steps}")
    dt = (tau1 - tau0) / steps
    u = None
    dim = None
    for j in range(steps):
        h = hamiltonian_path(tau0 + (j + 0.5) * dt)
        if not isinstance(h, HermitianOperator):
            h = HermitianOperator(h)
        if dim is None:
            dim = h.dim
            u = np.eye(dim, dtype=complex)
        elif h.dim != dim:
            raise InputError(f"dimension changed along the path: {h.dim} != {dim}")
        w, v = np.linalg.eigh(h.entries)
        factor = (v * np.exp(-1j * w * dt)) @ v.conj().T
        u = factor @ u
    if not np.all(np.isfinite(u)):
        raise NumericError("non-finite propagator entries")
    return UnitaryOperator(u)


def perturbative_amplitude(mass, omega0, curvature_tt, n: int, m: int, tau: float) -> complex:
    """First-order interaction-picture amplitude for the curvature-driven oscillator.

    c_n(tau) = -(i mass / 2) <n|x^2|m> * integral_0^tau R_txtx(t') e^{i(n-m) omega0 t'} dt',
    with the integral done by adaptive quadrature (relative tolerance 1e-10).
    curvature_tt(tau) supplies R_txtx(tau).
    """
    if tau < 0:
        raise InputError(f"tau must be non-negative, got {tau}")
    elem = x_squared_element(mass, omega0, n, m)
    if elem == 0.0:
        return 0.0 + 0.0j
    if tau == 0.0:
        return 0.0 + 0.0j
    freq = (n - m) * omega0

    def re(t):
        return curvature_tt(t) * math.cos(freq * t)

    def im(t):
        return curvature_tt(t) * math.sin(freq * t)

    parts = []
    for fn in (re, im):
        val, err = integrate.quad(fn, 0.0, tau, epsabs=0.0, epsrel=1e-10, limit=500)
        if not math.isfinite(val) or (val != 0.0 and err > 1e-6 * abs(val) + 1e-300):
            raise NumericError(f"quadrature did not converge (value {val}, error {err})")
        parts.append(val)
    f = parts[0] + 1j * parts[1]
    return -0.5j * mass * elem * f


def transition_probability_formula(mass, omega0, hubble, n: int, m: int, t: float) -> float:
    """Closed-form first-order transition probability in the exponentially expanding universe.

    4 (mass H^2 / 2)^2 |<n|x^2|m>|^2 / |e_n - e_m|^2 * sin^2((n - m) omega0 t / 2).
    Undefined on the diagonal.
    """
    if n == m:
        raise InputError("transition probability is undefined for n = m")
    if mass <= 0 or omega0 <= 0 or hubble <= 0:
        raise InputError("mass, omega0 and hubble must be positive")
    elem = x_squared_element(mass, omega0, n, m)
    gap = abs(n - m) * omega0
    amp = 4.0 * (0.5 * mass * hubble * hubble) ** 2 * elem * elem / (gap * gap)
    return float(amp * math.sin(0.5 * (n - m) * omega0 * t) ** 2)
