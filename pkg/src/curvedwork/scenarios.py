"""Scenario orchestration: config parsing, protocol runners, output emission.

Three runners share the same reporting pipeline: the uniform-gravity
two-level scenario, the expanding-universe oscillator scenario, and a
generic runner over user-tabulated frame data.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, ConvergenceError, InputError
from .frame import FrameData, FramePoint, time_dilation, validate_frame
from .quantum import (
    HermitianOperator,
    UnitaryOperator,
    identity_unitary,
    perturbative_amplitude,
    propagator,
    qho_hamiltonian,
    thermal_state,
    transition_probability_formula,
    two_level_hamiltonian,
    x_squared_matrix,
)
from .spacetimes import desitter_frame, uniform_gravity_frame
from .tpm import (
    ProtocolReport,
    WorkDistribution,
    crooks_check,
    delta_F,
    dissipated_work_thermal,
    entropy_production_two_level,
    forward_distribution,
    jarzynski_average,
    mean_work,
    reverse_distribution,
)

SCENARIOS = ("newtonian", "desitter", "custom")
SYSTEM_KINDS = ("two_level", "oscillator", "matrix")
LEAKAGE_LIMIT = 1e-8
DEFAULT_OSCILLATOR_DIM = 40

_TOP_KEYS = {
    "scenario", "beta", "system", "geometry", "position", "momentum",
    "duration", "steps", "merge_tol", "tolerances", "output_path",
    "seed", "samples", "zfactor_grid", "curve_points",
}
_SYSTEM_KEYS = {
    "two_level": {"kind", "eps", "mass"},
    "oscillator": {"kind", "mass", "omega0", "dim"},
    "matrix": {"kind", "entries", "mass"},
}
_GEOMETRY_KEYS = {"g", "hubble", "frame_tables"}


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


@dataclass
class ScenarioConfig:
    scenario: str
    beta: float
    system: dict
    geometry: dict
    position: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    momentum: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    duration: float = 1.0
    steps: int = 200
    merge_tol: float | None = None
    tolerances: dict = field(default_factory=dict)
    output_path: str | None = None
    seed: int | None = None
    samples: int | None = None
    zfactor_grid: list | None = None
    curve_points: int = 50

    def __post_init__(self):
        _require(self.scenario in SCENARIOS, f"unknown scenario {self.scenario!r}")
        _require(self.beta > 0, "beta must be positive")
        _require(self.duration > 0, "duration must be positive")
        _require(self.steps >= 1, "steps must be at least 1")
        _require(self.curve_points >= 2, "curve_points must be at least 2")
        kind = self.system.get("kind")
        _require(kind in SYSTEM_KINDS, f"unknown system kind {kind!r}")
        extra = set(self.system) - _SYSTEM_KEYS[kind]
        _require(not extra, f"unknown system keys {sorted(extra)}")
        if kind == "two_level":
            _require(self.system.get("eps", 0) > 0, "two_level system needs eps > 0")
        elif kind == "oscillator":
            _require(self.system.get("omega0", 0) > 0, "oscillator needs omega0 > 0")
            _require(self.system.get("mass", 0) > 0, "oscillator needs mass > 0")
            _require(int(self.system.get("dim", DEFAULT_OSCILLATOR_DIM)) >= 2,
                     "oscillator dim must be at least 2")
        else:
            _require("entries" in self.system, "matrix system needs entries")
        extra = set(self.geometry) - _GEOMETRY_KEYS
        _require(not extra, f"unknown geometry keys {sorted(extra)}")
        _require(len(self.position) == 3 and len(self.momentum) == 3,
                 "position and momentum must be 3-vectors")
        if self.samples is not None:
            _require(self.samples >= 1, "samples must be at least 1")

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        extra = set(data) - _TOP_KEYS
        _require(not extra, f"unknown config keys {sorted(extra)}")
        _require("scenario" in data and "beta" in data and "system" in data
                 and "geometry" in data, "scenario, beta, system and geometry are required")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)


@dataclass
class RunArtifacts:
    """Everything one scenario run emits: summary report, distributions, curves, metadata."""

    report: ProtocolReport
    forward: WorkDistribution
    reverse: WorkDistribution
    curves: dict
    metadata: dict

    def write(self, outdir) -> None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        payload = {"report": asdict(self.report), "metadata": self.metadata}
        with open(outdir / "report.json", "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        for name, dist in (("forward", self.forward), ("reverse", self.reverse)):
            with open(outdir / f"{name}.csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["work", "probability"])
                for w, p in zip(dist.works, dist.probs):
                    writer.writerow([repr(float(w)), repr(float(p))])
        x_name = self.curves["x_name"]
        series = self.curves["series"]
        with open(outdir / "curves.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([x_name, *series.keys()])
            for i, x in enumerate(self.curves["x"]):
                writer.writerow([repr(float(x))] + [repr(float(series[k][i])) for k in series])


def _base_metadata(config: ScenarioConfig) -> dict:
    return {"config": config.to_dict(), "version": __version__}


def _protocol_outputs(h_init, h_final, u, config):
    fwd = forward_distribution(h_init, h_final, u, config.beta, merge_tol=config.merge_tol)
    rev = reverse_distribution(h_init, h_final, u, config.beta, merge_tol=config.merge_tol)
    df = delta_F(h_init, h_final, config.beta)
    residual = crooks_check(fwd, rev, config.beta, df)
    mw = mean_work(fwd)
    report = ProtocolReport(
        beta=config.beta,
        delta_F=df,
        mean_work=mw,
        jarzynski_lhs=jarzynski_average(fwd, config.beta),
        jarzynski_rhs=math.exp(-config.beta * df),
        crooks_max_residual=residual,
        entropy_production=config.beta * (mw - df),
        dissipated_work=mw - df,
    )
    return fwd, rev, report


def _maybe_sample(config, fwd, metadata):
    if config.samples is not None:
        est, se = sample_work(fwd, config.beta, config.samples,
                              0 if config.seed is None else config.seed)
        metadata["sampling"] = {
            "samples": config.samples,
            "seed": 0 if config.seed is None else config.seed,
            "jarzynski_estimate": est,
            "standard_error": se,
        }


def run_newtonian(config: ScenarioConfig) -> RunArtifacts:
    """Uniform-gravity two-level protocol with semiclassical diagonal evolution.

    The internal Hamiltonian is rescaled by the time-dilation factor at the
    final position and momentum; the propagator is diagonal in the shared
    energy basis, so it is taken as the identity.
    """
    _require(config.scenario == "newtonian", "config.scenario must be 'newtonian'")
    _require(config.system["kind"] == "two_level",
             "the newtonian scenario runs a two_level system")
    _require("g" in config.geometry, "newtonian geometry needs 'g'")
    g = float(config.geometry["g"])
    eps = float(config.system["eps"])
    sysmass = float(config.system.get("mass", 1.0))
    frame = uniform_gravity_frame(g)
    point = FramePoint(tau=config.duration, x=np.asarray(config.position, dtype=float))
    zf = time_dilation(frame, point, np.asarray(config.momentum, dtype=float), sysmass)
    h0 = two_level_hamiltonian(eps)
    ht = HermitianOperator(zf * h0.entries)
    u = identity_unitary(2)

    fwd, rev, report = _protocol_outputs(h0, ht, u, config)

    zgrid = np.asarray(
        config.zfactor_grid if config.zfactor_grid is not None else np.linspace(0.5, 1.5, 41),
        dtype=float,
    )
    sigma_formula = np.array(
        [entropy_production_two_level(z, config.beta * eps) for z in zgrid]
    )
    sigma_oracle = np.empty_like(sigma_formula)
    for i, z in enumerate(zgrid):
        hz = HermitianOperator(z * h0.entries)
        _, wdiss = dissipated_work_thermal(h0, hz, config.beta)
        sigma_oracle[i] = config.beta * wdiss

    metadata = _base_metadata(config)
    gx = g * float(config.position[0])
    p2 = float(np.asarray(config.momentum, dtype=float) @ np.asarray(config.momentum, dtype=float))
    metadata["newtonian"] = {
        "zfactor": zf,
        # the general time-dilation expansion; the doubled weak-field convention
        # (2gx, p^2/2m) that appears in some presentations is echoed for comparison
        "zfactor_general": zf,
        "zfactor_doubled_convention": 1.0 + 2.0 * gx - p2 / (2.0 * sysmass),
        "entropy_closed_form": entropy_production_two_level(zf, config.beta * eps)
        if zf > 0 else None,
        "entropy_thermal_oracle": config.beta
        * dissipated_work_thermal(h0, ht, config.beta)[1],
    }
    _maybe_sample(config, fwd, metadata)
    curves = {
        "x_name": "zfactor",
        "x": zgrid,
        "series": {"entropy_closed_form": sigma_formula, "entropy_thermal_oracle": sigma_oracle},
    }
    return RunArtifacts(report=report, forward=fwd, reverse=rev, curves=curves,
                        metadata=metadata)


def _oscillator_protocol(config, riemann_tt, metadata):
    """Shared center-of-mass oscillator pipeline over a curvature history R_txtx(tau).

    Measurements are projective in the eigenbasis of the unperturbed
    oscillator, whose populations the curvature term drives.
    """
    mass = float(config.system["mass"])
    omega0 = float(config.system["omega0"])
    dim = int(config.system.get("dim", DEFAULT_OSCILLATOR_DIM))
    h0 = qho_hamiltonian(mass, omega0, dim)
    x2 = x_squared_matrix(mass, omega0, dim)

    def path(tau):
        return HermitianOperator(h0.entries + 0.5 * mass * riemann_tt(tau) * x2.entries)

    u = propagator(path, 0.0, config.duration, config.steps)

    # truncation guard: evolved thermal populations must not reach the cutoff
    rho0 = thermal_state(h0, config.beta).density
    rhot = u.entries @ rho0 @ u.entries.conj().T
    leak = float(np.real(rhot[dim - 1, dim - 1] + rhot[dim - 2, dim - 2]))
    if leak > LEAKAGE_LIMIT:
        raise ConvergenceError(
            f"top-two-level population {leak:.3g} exceeds {LEAKAGE_LIMIT}; raise dim"
        )

    fwd, rev, report = _protocol_outputs(h0, h0, u, config)
    metadata["oscillator"] = {
        "dim": dim,
        "truncation_leakage": leak,
        "unitarity_defect": u.unitarity_defect,
    }
    return h0, u, fwd, rev, report


def run_desitter(config: ScenarioConfig) -> RunArtifacts:
    """Oscillator in the exponentially expanding universe.

    The constant tidal curvature adds -(mass H^2/2) x^2 to the oscillator
    Hamiltonian; transition-probability curves compare exact propagation, the
    first-order amplitude, and the closed-form probability.
    """
    _require(config.scenario == "desitter", "config.scenario must be 'desitter'")
    _require(config.system["kind"] == "oscillator",
             "the desitter scenario runs an oscillator system")
    _require("hubble" in config.geometry, "desitter geometry needs 'hubble'")
    hubble = float(config.geometry["hubble"])
    _require(hubble > 0, "hubble must be positive")
    omega0 = float(config.system["omega0"])
    mass = float(config.system["mass"])
    _require(hubble < omega0,
             "hubble must stay below omega0 (the effective oscillator would invert)")
    frame = desitter_frame(hubble)

    metadata = _base_metadata(config)
    h0, u, fwd, rev, report = _oscillator_protocol(
        config, lambda tau: frame.riemann_titj(tau)[0, 0], metadata
    )
    dim = int(config.system.get("dim", DEFAULT_OSCILLATOR_DIM))

    # effective-frequency diagnostic on the lowest half of the spectrum
    heff = HermitianOperator(h0.entries + 0.5 * mass * (-hubble ** 2) * x_squared_matrix(
        mass, omega0, dim).entries)
    evals = np.linalg.eigvalsh(heff.entries)
    omega_eff = math.sqrt(omega0 ** 2 - hubble ** 2)
    spacings = np.diff(evals)[: dim // 2]
    metadata["effective_frequency"] = {
        "expected": omega_eff,
        "max_spacing_deviation": float(np.max(np.abs(spacings - omega_eff))),
    }
    metadata["hubble_ratio"] = hubble / omega0

    wh, vh = np.linalg.eigh(heff.entries)
    times = np.linspace(0.0, config.duration, config.curve_points)
    p_exact = np.empty_like(times)
    p_pert = np.empty_like(times)
    p_formula = np.empty_like(times)
    for i, t in enumerate(times):
        if t == 0.0:
            ut = np.eye(dim, dtype=complex)
        else:
            # the curvature history is tau-independent here, so the ordered
            # product collapses to a single exponential
            ut = (vh * np.exp(-1j * wh * t)) @ vh.conj().T
        p_exact[i] = abs(ut[2, 0]) ** 2
        p_pert[i] = abs(perturbative_amplitude(
            mass, omega0, lambda _tau: -hubble ** 2, 2, 0, t)) ** 2
        p_formula[i] = transition_probability_formula(mass, omega0, hubble, 2, 0, t) \
            if t > 0 else 0.0
    _maybe_sample(config, fwd, metadata)
    curves = {
        "x_name": "t",
        "x": times,
        "series": {
            "p20_exact": p_exact,
            "p20_perturbative": p_pert,
            "p20_formula": p_formula,
        },
    }
    return RunArtifacts(report=report, forward=fwd, reverse=rev, curves=curves,
                        metadata=metadata)


def _frame_from_tables(tables: dict, tolerances: dict) -> FrameData:
    required = {"tau", "accel", "riemann_titj", "riemann_tjik", "riemann_ikjl"}
    if not isinstance(tables, dict) or set(tables) != required:
        raise InputError(f"frame_tables must have exactly the keys {sorted(required)}")
    taus = np.asarray(tables["tau"], dtype=float)
    if taus.size == 0:
        raise InputError("frame tables are empty")
    if taus.ndim != 1 or (taus.size > 1 and np.any(np.diff(taus) <= 0)):
        raise InputError("frame table taus must be strictly increasing")
    arrays = {}
    shapes = {"accel": (3,), "riemann_titj": (3, 3), "riemann_tjik": (3, 3, 3),
              "riemann_ikjl": (3, 3, 3, 3)}
    for key, shape in shapes.items():
        arr = np.asarray(tables[key], dtype=float)
        if arr.shape != (taus.size, *shape):
            raise InputError(f"{key} table must have shape (n, {shape}), got {arr.shape}")
        arrays[key] = arr

    def interp(key):
        arr = arrays[key]

        def f(tau):
            flat = arr.reshape(taus.size, -1)
            out = np.array([np.interp(tau, taus, flat[:, j]) for j in range(flat.shape[1])])
            return out.reshape(arr.shape[1:])

        return f

    frame = FrameData(
        accel=interp("accel"),
        riemann_titj=interp("riemann_titj"),
        riemann_tjik=interp("riemann_tjik"),
        riemann_ikjl=interp("riemann_ikjl"),
    )
    tol = float(tolerances.get("frame_symmetry", 1e-9))
    result = validate_frame(frame, list(taus), tol=tol)
    if not result.passed:
        bad = {k: v for k, v in result.violations.items() if v > tol}
        raise InputError(f"frame tables violate Riemann symmetries: {bad}")
    return frame


def run_custom(config: ScenarioConfig) -> RunArtifacts:
    """Generic pipeline over tabulated frame data.

    Internal-system protocols (two_level, matrix) rescale the internal
    Hamiltonian by the time-dilation factor along a straight-line trajectory
    from rest at the origin to the configured endpoint; the oscillator system
    runs the center-of-mass protocol driven by the tabulated tidal curvature.
    """
    _require(config.scenario == "custom", "config.scenario must be 'custom'")
    _require("frame_tables" in config.geometry, "custom geometry needs 'frame_tables'")
    frame = _frame_from_tables(config.geometry["frame_tables"], config.tolerances)
    metadata = _base_metadata(config)
    times = np.linspace(0.0, config.duration, config.curve_points)
    kind = config.system["kind"]

    if kind == "oscillator":
        riemann_tt = lambda tau: frame.riemann_titj(tau)[0, 0]
        _, u, fwd, rev, report = _oscillator_protocol(config, riemann_tt, metadata)
        curves = {
            "x_name": "t",
            "x": times,
            "series": {"curvature_tt": np.array([riemann_tt(t) for t in times])},
        }
    else:
        if kind == "two_level":
            h_int = two_level_hamiltonian(float(config.system["eps"]))
        else:
            h_int = HermitianOperator(np.asarray(config.system["entries"], dtype=float))
            if float(np.max(np.abs(h_int.entries.imag))) > 1e-12:
                raise InputError("matrix system must be real-symmetric")
        sysmass = float(config.system.get("mass", 1.0))
        x_end = np.asarray(config.position, dtype=float)
        p_end = np.asarray(config.momentum, dtype=float)
        duration = config.duration

        def zfactor(tau):
            s = tau / duration
            return time_dilation(frame, FramePoint(tau=tau, x=s * x_end), s * p_end, sysmass)

        def path(tau):
            return HermitianOperator(zfactor(tau) * h_int.entries)

        u = propagator(path, 0.0, duration, config.steps)
        h_start = HermitianOperator(zfactor(0.0) * h_int.entries)
        h_end = HermitianOperator(zfactor(duration) * h_int.entries)
        fwd, rev, report = _protocol_outputs(h_start, h_end, u, config)
        metadata["custom"] = {
            "zfactor_initial": zfactor(0.0),
            "zfactor_final": zfactor(duration),
            "unitarity_defect": u.unitarity_defect,
        }
        curves = {
            "x_name": "t",
            "x": times,
            "series": {"zfactor": np.array([zfactor(t) for t in times])},
        }
    _maybe_sample(config, fwd, metadata)
    return RunArtifacts(report=report, forward=fwd, reverse=rev, curves=curves,
                        metadata=metadata)


def run_scenario(config: ScenarioConfig) -> RunArtifacts:
    runner = {"newtonian": run_newtonian, "desitter": run_desitter, "custom": run_custom}
    return runner[config.scenario](config)


def sample_work(fwd: WorkDistribution, beta: float, samples: int, seed: int):
    """Seeded empirical estimate of <e^{-beta W}> with its standard error."""
    if samples < 1:
        raise InputError(f"samples must be at least 1, got {samples}")
    rng = np.random.default_rng(seed)
    if fwd.works.size == 1:
        return float(math.exp(-beta * fwd.works[0])), 0.0
    draws = rng.choice(fwd.works, size=samples, p=fwd.probs / np.sum(fwd.probs))
    vals = np.exp(-beta * draws)
    est = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return est, se
