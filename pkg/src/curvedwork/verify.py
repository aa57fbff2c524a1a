"""Self-verification suite: each criterion exercises a documented guarantee.

`run_verification` executes every criterion at its stated tolerance and
returns a machine-readable summary.  The fast level trims ensemble sizes and
skips the step-halving convergence studies; full runs everything.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from .frame import FrameData, FramePoint, metric_components, redshift_exact, \
    redshift_weakfield, time_dilation
from .quantum import (
    HermitianOperator,
    propagator,
    qho_hamiltonian,
    thermal_state,
    transition_probability_formula,
    two_level_hamiltonian,
    x_squared_matrix,
)
from .spacetimes import desitter_frame, flat_frame, uniform_gravity_frame
from .tpm import (
    crooks_check,
    delta_F,
    dissipated_work_thermal,
    entropy_production_two_level,
    forward_distribution,
    jarzynski_average,
    reverse_distribution,
)


@dataclass
class CriterionResult:
    name: str
    passed: bool
    runtime: float
    details: dict = field(default_factory=dict)
    findings: list = field(default_factory=list)


def _random_symmetric(rng, dim, scale=0.3):
    m = rng.normal(scale=scale, size=(dim, dim))
    return 0.5 * (m + m.T)


def _random_protocol(rng, dim, beta, steps=40):
    a = _random_symmetric(rng, dim)
    b = _random_symmetric(rng, dim)
    duration = 1.0

    def path(tau):
        return HermitianOperator((a + math.sin(tau) * b).astype(complex))

    h0 = path(0.0)
    ht = path(duration)
    u = propagator(path, 0.0, duration, steps)
    return h0, ht, u


def check_fluctuation_relations(n_protocols=200, seed=7):
    """Shared ensemble for the detailed and integral fluctuation relations."""
    rng = np.random.default_rng(seed)
    dims = [2, 4, 8]
    max_crooks = 0.0
    max_jarzynski = 0.0
    for i in range(n_protocols):
        dim = dims[i % len(dims)]
        beta = float(rng.uniform(0.1, 5.0))
        h0, ht, u = _random_protocol(rng, dim, beta)
        fwd = forward_distribution(h0, ht, u, beta)
        rev = reverse_distribution(h0, ht, u, beta)
        df = delta_F(h0, ht, beta)
        max_crooks = max(max_crooks, crooks_check(fwd, rev, beta, df))
        zratio = math.exp(-beta * df)
        max_jarzynski = max(max_jarzynski, abs(jarzynski_average(fwd, beta) - zratio))
    return max_crooks, max_jarzynski


def criterion_crooks_jarzynski(level="full"):
    n = 200 if level == "full" else 60
    t0 = time.perf_counter()
    max_crooks, max_jarzynski = check_fluctuation_relations(n_protocols=n)
    rt = time.perf_counter() - t0
    a1 = CriterionResult(
        name="A1",
        passed=max_crooks < 1e-8,
        runtime=rt,
        details={"protocols": n, "max_crooks_residual": max_crooks, "tolerance": 1e-8},
    )
    a2 = CriterionResult(
        name="A2",
        passed=max_jarzynski < 1e-10,
        runtime=0.0,
        details={"max_jarzynski_deviation": max_jarzynski, "tolerance": 1e-10},
    )
    return [a1, a2]


def criterion_entropy_two_level(level="full"):
    t0 = time.perf_counter()
    at_unity_ok = all(
        entropy_production_two_level(1.0, c) == 0.0 for c in np.linspace(0.1, 10.0, 21)
    )
    sign_ok = True
    max_mismatch = 0.0
    h_ref = two_level_hamiltonian(1.0)
    for z in np.linspace(0.5, 1.5, 21):
        for c in np.linspace(0.1, 10.0, 21):
            sigma = entropy_production_two_level(float(z), float(c))
            if not math.isclose(z, 1.0) and np.sign(sigma) != np.sign(z - 1.0):
                sign_ok = False
            # oracle: beta * (<W> - delta_F) with thermal endpoint bookkeeping,
            # beta = c on the unit-gap system
            hz = HermitianOperator(float(z) * h_ref.entries)
            _, wdiss = dissipated_work_thermal(h_ref, hz, float(c))
            max_mismatch = max(max_mismatch, abs(sigma - float(c) * wdiss))
    result = CriterionResult(
        name="A3",
        passed=at_unity_ok and sign_ok,
        runtime=time.perf_counter() - t0,
        details={
            "zero_at_unit_zfactor": at_unity_ok,
            "sign_matches_zfactor": sign_ok,
            "max_formula_vs_oracle_mismatch": max_mismatch,
        },
    )
    if max_mismatch > 1e-10:
        result.findings.append(
            "closed-form two-level entropy production disagrees with the thermal-endpoint "
            f"oracle beta*(<W> - dF) by up to {max_mismatch:.3g}; documented finding, "
            "not a failure"
        )
    return [result]


def criterion_effective_frequency(level="full"):
    t0 = time.perf_counter()
    omega0, mass, dim = 1.0, 1.0, 60
    worst = 0.0
    for ratio in (0.1, 0.3, 0.5):
        hubble = ratio * omega0
        heff = HermitianOperator(
            qho_hamiltonian(mass, omega0, dim).entries
            - 0.5 * mass * hubble ** 2 * x_squared_matrix(mass, omega0, dim).entries
        )
        evals = np.linalg.eigvalsh(heff.entries)
        spacings = np.diff(evals)[:30]
        expected = math.sqrt(omega0 ** 2 - hubble ** 2)
        worst = max(worst, float(np.max(np.abs(spacings - expected))))
    return [CriterionResult(
        name="A4",
        passed=worst < 1e-10 * omega0,
        runtime=time.perf_counter() - t0,
        details={"max_spacing_deviation": worst, "tolerance": 1e-10 * omega0},
    )]


def _constant_oscillator_u(mass, omega0, hubble, dim):
    heff = HermitianOperator(
        qho_hamiltonian(mass, omega0, dim).entries
        - 0.5 * mass * hubble ** 2 * x_squared_matrix(mass, omega0, dim).entries
    )
    w, v = np.linalg.eigh(heff.entries)

    def u_at(t):
        return (v * np.exp(-1j * w * t)) @ v.conj().T

    return u_at


def criterion_perturbation_vs_propagator(level="full"):
    t0 = time.perf_counter()
    mass, omega0, dim = 1.0, 1.0, 40
    hubble = 0.01 * omega0
    u_at = _constant_oscillator_u(mass, omega0, hubble, dim)
    times = np.linspace(0.0, 10.0 / omega0, 50)
    formula = np.array([
        transition_probability_formula(mass, omega0, hubble, 2, 0, t) if t > 0 else 0.0
        for t in times
    ])
    exact = np.array([abs(u_at(t)[2, 0]) ** 2 for t in times])
    peak_mask = formula >= 0.5 * float(np.max(formula))
    rel_err = float(np.max(np.abs(exact[peak_mask] - formula[peak_mask])
                           / formula[peak_mask]))
    odd_leak = 0.0
    u_end = u_at(times[-1])
    for n in range(1, dim, 2):
        odd_leak = max(odd_leak, abs(u_end[n, 0]) ** 2)
    return [CriterionResult(
        name="A5",
        passed=rel_err < 0.05 and odd_leak < 1e-12,
        runtime=time.perf_counter() - t0,
        details={"max_peak_relative_error": rel_err, "max_odd_transition": odd_leak},
    )]


def criterion_propagator_quality(level="full"):
    t0 = time.perf_counter()
    defects = {}
    mass, omega0, dim = 1.0, 1.0, 40
    hubble = 0.01
    frame = desitter_frame(hubble)
    h0 = qho_hamiltonian(mass, omega0, dim)
    x2 = x_squared_matrix(mass, omega0, dim)

    def ds_path(tau):
        return HermitianOperator(h0.entries + 0.5 * mass * frame.riemann_titj(tau)[0, 0]
                                 * x2.entries)

    defects["desitter_oscillator"] = propagator(ds_path, 0.0, 10.0, 200).unitarity_defect
    rng = np.random.default_rng(11)
    a = _random_symmetric(rng, 6, scale=0.5)
    b = _random_symmetric(rng, 6, scale=0.5)

    def driven_path(tau):
        return HermitianOperator((a + math.sin(2.0 * tau) * b).astype(complex))

    defects["driven_two_level_family"] = propagator(driven_path, 0.0, 4.0, 200).unitarity_defect
    max_defect = max(defects.values())
    details = {"unitarity_defects": defects, "unitarity_tolerance": 1e-9}
    passed = max_defect < 1e-9
    order = None
    if level == "full":
        # step-halving self-convergence against a fine reference; the catalog
        # de Sitter history is tau-independent (midpoint rule is exact there),
        # so the order is measured on a genuinely time-dependent path
        ref = propagator(driven_path, 0.0, 4.0, 4096).entries
        errs = []
        for steps in (32, 64, 128, 256):
            u = propagator(driven_path, 0.0, 4.0, steps).entries
            errs.append(float(np.max(np.abs(u - ref))))
        orders = [math.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]
        order = float(np.mean(orders))
        details["self_convergence_orders"] = orders
        details["mean_order"] = order
        passed = passed and abs(order - 2.0) <= 0.2
    return [CriterionResult(
        name="A6",
        passed=passed,
        runtime=time.perf_counter() - t0,
        details=details,
    )]


def criterion_geometry(level="full"):
    t0 = time.perf_counter()
    details = {}
    flat = flat_frame()
    origin = FramePoint(tau=0.0, x=np.array([0.2, -0.1, 0.3]))
    m = metric_components(flat, origin)
    flat_ok = (
        m.g_tt == -1.0
        and np.all(m.g_ti == 0.0)
        and np.array_equal(m.g_ij, np.eye(3))
        and redshift_exact(m) == 1.0
    )
    p = np.array([0.01, -0.02, 0.005])
    massv = 2.0
    z_ok = time_dilation(flat, origin, p, massv) == 1.0 - float(p @ p) / (2 * massv ** 2)
    details["flat_minkowski_exact"] = bool(flat_ok)
    details["flat_time_dilation_exact"] = bool(z_ok)

    hubble = 0.3
    ds = desitter_frame(hubble)
    max_dev = 0.0
    for r in (0.1, 0.5, 1.0):
        g_tt = metric_components(ds, FramePoint(tau=0.7, x=np.array([r, 0.0, 0.0]))).g_tt
        max_dev = max(max_dev, abs(g_tt - (-(1.0 - hubble ** 2 * r ** 2))))
    details["desitter_gtt_deviation"] = max_dev

    # convergence order of the weak-field redshift against the exact one on a
    # frame with both acceleration and curvature
    accel = np.array([0.3, 0.1, 0.0])
    curved = FrameData(
        accel=lambda tau: accel,
        riemann_titj=ds.riemann_titj,
        riemann_tjik=ds.riemann_tjik,
        riemann_ikjl=ds.riemann_ikjl,
    )
    direction = np.array([1.0, 0.7, -0.4])
    direction /= np.linalg.norm(direction)
    radii = 0.2 * 0.5 ** np.arange(6)
    diffs = []
    for r in radii:
        pt = FramePoint(tau=0.0, x=r * direction)
        diffs.append(abs(redshift_exact(metric_components(curved, pt))
                         - redshift_weakfield(curved, pt)))
    slope = float(np.polyfit(np.log(radii), np.log(diffs), 1)[0])
    details["redshift_convergence_order"] = slope

    # uniform gravity linear-order agreement with the weak-field metric
    g = 0.05
    ug = uniform_gravity_frame(g)
    xval = 0.5
    g_tt = metric_components(ug, FramePoint(tau=0.0, x=np.array([xval, 0.0, 0.0]))).g_tt
    details["uniform_gravity_gtt_linear_gap"] = abs(g_tt - (-(1 + 2 * g * xval)))

    passed = flat_ok and z_ok and max_dev < 1e-14 and slope >= 2.0 \
        and details["uniform_gravity_gtt_linear_gap"] < (g * xval) ** 2 * 1.5
    return [CriterionResult(
        name="A7",
        passed=bool(passed),
        runtime=time.perf_counter() - t0,
        details=details,
    )]


def criterion_scale_estimate(level="full"):
    t0 = time.perf_counter()
    hubble_planck, omega0_planck = 1e-61, 1e-30
    ratio = hubble_planck / omega0_planck
    ratio_ok = math.isclose(ratio, 1e-31, rel_tol=1e-12)

    mass, omega0, dim = 1.0, 1.0, 40
    sweep = np.logspace(-3, -1, 7)
    peaks = []
    t_peak = math.pi / (2.0 * omega0)
    for hubble in sweep:
        u_at = _constant_oscillator_u(mass, omega0, float(hubble), dim)
        peaks.append(abs(u_at(t_peak)[2, 0]) ** 2)
    slope = float(np.polyfit(np.log(sweep), np.log(peaks), 1)[0])
    return [CriterionResult(
        name="A8",
        passed=ratio_ok and abs(slope - 4.0) <= 0.01,
        runtime=time.perf_counter() - t0,
        details={"planck_ratio": ratio, "prefactor_exponent": slope},
    )]


CRITERIA = [
    criterion_crooks_jarzynski,
    criterion_entropy_two_level,
    criterion_effective_frequency,
    criterion_perturbation_vs_propagator,
    criterion_propagator_quality,
    criterion_geometry,
    criterion_scale_estimate,
]


def _plain(value):
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (np.integer, np.bool_)):
        return value.item()
    return value


def run_verification(level: str = "fast") -> dict:
    """Run the verification suite and return a machine-readable summary."""
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    results = []
    for criterion in CRITERIA:
        results.extend(criterion(level=level))
    return _plain({
        "level": level,
        "passed": all(r.passed for r in results),
        "criteria": [asdict(r) for r in results],
    })
