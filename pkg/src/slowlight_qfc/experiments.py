"""Drive sweeps, waveform experiments and the dressed-state scheme."""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .errors import ConfigError, NumericalError, ParameterDomainError
from .medium import DerivedParams, DressedConfig, MediumConfig, ValidityReport, derive, dressed_transform, validity
from .observables import (
    ConversionReport,
    TimeBinReport,
    centroid_delay,
    conservation_profile,
    conversion_report,
    timebin_analyze,
)
from .oracle import OracleSettings, integrate_pde
from .propagator import FieldPair, propagate
from .pulses import PulseProfile, TimeGrid, double_hump, gaussian, time_bin

SWEEP_MIN_OMEGA = 3.0  # in units of Gamma_ref; below this the kernel solution is unreliable
SWEEP_COLUMNS = (
    "omega_over_gamma",
    "qe",
    "n1_out",
    "n2_out",
    "conservation_residual",
    "validity_flags",
    "out_of_validity",
)
SHAPE_COLUMNS = ("t_over_T", "abs2_phi1", "abs2_phi2", "abs2_beta0_reference")
FIELD_COLUMNS = ("t_s", "re_phi1", "im_phi1", "re_phi2", "im_phi2")


@dataclass(frozen=True, eq=False)
class RunResult:
    params: DerivedParams
    validity: ValidityReport
    input: PulseProfile
    output: FieldPair
    report: ConversionReport


def make_input(run: RunConfig, grid: TimeGrid) -> PulseProfile:
    if run.shape == "double_hump":
        return double_hump(run.T, run.hump_separation, grid, length=run.medium.L, center=run.hump_separation / 2)
    return gaussian(run.T, 0.0, grid, length=run.medium.L)


def _vacuum(f: PulseProfile) -> PulseProfile:
    return f.with_samples(np.zeros_like(f.samples))


def _conservation(f1, params, run, output):
    if run.z_planes <= 2:
        # planes {0, L}: z = 0 is the identity, so the exit plane decides
        n_in = float(np.trapezoid(np.abs(f1.samples) ** 2, dx=f1.grid.dt)) / f1.norm_L_over_c
        return abs(output.n1 + output.n2 - n_in)
    return conservation_profile(f1, params, run.z_planes, n_nodes=run.quad_nodes).max_residual


def run_single(
    run: RunConfig,
    omega_over_gamma: float | None = None,
    *,
    oracle: bool = False,
    oracle_settings: OracleSettings = OracleSettings(),
    beta_zero: bool = False,
) -> RunResult:
    """Propagate the configured input pulse through the whole medium."""
    if omega_over_gamma is not None:
        run = dataclasses.replace(run, omega_over_gamma=omega_over_gamma)
    params = derive(run.medium, run.Omega)
    if beta_zero:
        params = params.without_coupling()
    grid = run.grid_for(params)
    f1 = make_input(run, grid)
    f2 = _vacuum(f1)
    if oracle:
        out = integrate_pde(f1, f2, run.medium.L, params, oracle_settings)
    else:
        out = propagate(f1, f2, run.medium.L, params, n_nodes=run.quad_nodes)
    report = conversion_report(f1, out, _conservation(f1, params, run, out))
    return RunResult(params, validity(run.medium, run.Omega, run.T), f1, out, report)


def field_rows(out: FieldPair):
    for t, a, b in zip(out.grid.times, out.phi1, out.phi2):
        yield (float(t), float(a.real), float(a.imag), float(b.real), float(b.imag))


@dataclass(frozen=True)
class SweepSpec:
    omega_min: float = SWEEP_MIN_OMEGA
    omega_max: float = 30.0
    n_points: int = 55
    run: RunConfig = dataclasses.field(default_factory=RunConfig)
    force: bool = False

    def __post_init__(self):
        if self.n_points < 1:
            raise ConfigError(f"n_points must be >= 1, got {self.n_points!r}")
        if self.n_points > 1 and not self.omega_max > self.omega_min:
            raise ConfigError("omega_max must exceed omega_min")
        if self.omega_min <= 0:
            raise ConfigError("omega_min must be positive")
        if self.omega_min < SWEEP_MIN_OMEGA and not self.force:
            raise ConfigError(
                f"omega_min = {self.omega_min:g} Gamma is below the validity guard of "
                f"{SWEEP_MIN_OMEGA:g} Gamma; pass force to sweep anyway"
            )

    @property
    def omegas(self) -> np.ndarray:
        if self.n_points == 1:
            return np.array([float(self.omega_min)])
        return np.linspace(self.omega_min, self.omega_max, self.n_points)


@dataclass(frozen=True)
class SweepRow:
    omega_over_gamma: float
    qe: float
    n1_out: float
    n2_out: float
    conservation_residual: float
    validity_flags: str
    out_of_validity: bool

    def as_tuple(self):
        return tuple(getattr(self, c) for c in SWEEP_COLUMNS)


def _sweep_point(run: RunConfig, omega: float) -> SweepRow:
    try:
        res = run_single(run, omega)
    except (ParameterDomainError, NumericalError) as exc:
        raise type(exc)(f"sweep failed at Omega = {omega:.17g} Gamma: {exc}") from exc
    return SweepRow(
        omega_over_gamma=float(omega),
        qe=res.report.qe,
        n1_out=res.report.n1_out,
        n2_out=res.report.n2_out,
        conservation_residual=res.report.conservation_residual,
        validity_flags=res.validity.flags_string(),
        out_of_validity=bool(omega < SWEEP_MIN_OMEGA),
    )


def sweep_omega(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """Quantum efficiency across the drive range, one row per Omega in increasing order."""
    omegas = [float(o) for o in spec.omegas]
    if workers > 1 and len(omegas) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_point, [spec.run] * len(omegas), omegas))
    return [_sweep_point(spec.run, o) for o in omegas]


@dataclass(frozen=True, eq=False)
class ShapesResult:
    rows: list
    report: ConversionReport
    result: RunResult

    columns = SHAPE_COLUMNS


def _flux(samples, L_over_c):
    return np.abs(samples) ** 2 / L_over_c


def shapes_experiment(
    run: RunConfig, shape: str | None = None, omega_over_gamma: float | None = None, *, beta_zero: bool = False
) -> ShapesResult:
    """Exit-plane photon flux of both modes next to the uncoupled (beta = 0) transport of mode 1.

    Flux columns are ``(c/L)|Phi|^2`` in 1/s.
    """
    if shape is not None:
        run = dataclasses.replace(run, shape=shape)
    res = run_single(run, omega_over_gamma, beta_zero=beta_zero)
    free = propagate(res.input, _vacuum(res.input), run.medium.L, res.params.without_coupling())
    L_over_c = res.input.norm_L_over_c
    t = res.output.grid.times / run.T
    cols = (t, _flux(res.output.phi1, L_over_c), _flux(res.output.phi2, L_over_c), _flux(free.phi1, L_over_c))
    rows = [tuple(float(v) for v in r) for r in zip(*cols)]
    return ShapesResult(rows, res.report, res)


@dataclass(frozen=True, eq=False)
class PartialResult:
    omega_over_gamma: float
    rows: list
    report: ConversionReport
    ordering: str  # which mode's centroid arrives later at the exit

    columns = SHAPE_COLUMNS


def partial_conversion_experiment(run: RunConfig, omegas=(6.0, 18.0)) -> list[PartialResult]:
    out = []
    for omega in omegas:
        shapes = shapes_experiment(run, "gaussian", omega)
        lag = centroid_delay(shapes.result.output.mode(2), shapes.result.output.mode(1))
        ordering = "phi2_behind_phi1" if lag > 0 else "phi1_behind_phi2"
        out.append(PartialResult(float(omega), shapes.rows, shapes.report, ordering))
    return out


@dataclass(frozen=True, eq=False)
class TimebinResult:
    report: TimeBinReport
    rows: list
    conversion: ConversionReport

    columns = ("t_over_T", "abs2_input", "abs2_phi1", "abs2_phi2")


def timebin_experiment(
    run: RunConfig, a: complex, b: complex, tau: float | None = None, omega_over_gamma: float | None = None
) -> TimebinResult:
    """Send a time-bin qubit through the medium and read the bin amplitudes of the converted mode."""
    if omega_over_gamma is not None:
        run = dataclasses.replace(run, omega_over_gamma=omega_over_gamma)
    T = run.T
    tau = 10 * T if tau is None else tau
    params = derive(run.medium, run.Omega)
    grid = run.grid_for(params, extra=tau) if run.t_min is None else run.grid_for(params)
    f1 = time_bin(a, b, T, tau, grid, length=run.medium.L)
    out = propagate(f1, _vacuum(f1), run.medium.L, params, n_nodes=run.quad_nodes)
    report = timebin_analyze(a, b, tau, T, out, params, n_nodes=run.quad_nodes)
    L_over_c = f1.norm_L_over_c
    cols = (grid.times / T, _flux(f1.samples, L_over_c), _flux(out.phi1, L_over_c), _flux(out.phi2, L_over_c))
    rows = [tuple(float(v) for v in r) for r in zip(*cols)]
    conversion = conversion_report(f1, out)
    return TimebinResult(report, rows, conversion)


def dressed_optimal_omega(d: DressedConfig) -> float:
    """Drive (rad/s) giving beta' L = pi/2 on the transformed medium."""
    eff = dressed_transform(d)
    return 2 * math.sqrt(eff.G1 * eff.G2) * eff.L / math.pi


@dataclass(frozen=True, eq=False)
class DressedResult:
    report: ConversionReport
    medium: MediumConfig
    params: DerivedParams
    omega_over_gamma: float
    labels: dict


def dressed_experiment(d: DressedConfig, omega_over_gamma: float | None = None, run: RunConfig | None = None) -> DressedResult:
    """Standard pipeline on the effective medium of the dressed four-level scheme.

    Without ``omega_over_gamma`` the drive is tuned to ``beta' L = pi/2``.
    """
    eff = dressed_transform(d)
    run = dataclasses.replace(run or RunConfig(), medium=eff, dressed=None)
    if omega_over_gamma is None:
        omega_over_gamma = dressed_optimal_omega(d) / eff.Gamma_ref
    res = run_single(run, omega_over_gamma)
    labels = {"lambda1_m": eff.lambda1, "lambda2_m": eff.lambda2, "g2_over_g1": math.sqrt(eff.G2 / eff.G1)}
    return DressedResult(res.report, eff, res.params, float(omega_over_gamma), labels)
