"""Brute-force integration of the coupled transport equations.

    (d/dz + 1/v1 d/dt) E1 = -i beta E2
    (d/dz + 1/v2 d/dt) E2 = -i beta E1

Strang splitting in z: half a step of free transport for each mode, the
exact 2x2 coupling rotation over a full step, another half step of transport.
Transport is a pure time shift, done either spectrally (default) or with the
same cubic interpolation as the analytic path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ParameterDomainError
from .medium import DerivedParams
from .propagator import FieldPair, _check_depth, _common_grid, check_delay_span
from .pulses import PulseProfile, shift_samples

INTERPOLATIONS = ("spectral", "cubic")


@dataclass(frozen=True)
class OracleSettings:
    n_z_steps: int = 512
    interpolation: str = "spectral"
    scheme: str = "strang"

    def __post_init__(self):
        if int(self.n_z_steps) != self.n_z_steps or self.n_z_steps < 16:
            raise ParameterDomainError(f"n_z_steps must be an integer >= 16, got {self.n_z_steps!r}")
        if self.interpolation not in INTERPOLATIONS:
            raise ParameterDomainError(f"interpolation must be one of {INTERPOLATIONS}, got {self.interpolation!r}")
        if self.scheme != "strang":
            raise ParameterDomainError(f"unknown coupling scheme {self.scheme!r}")


def _check_finite(a, b, step, n_steps):
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        finite = np.concatenate([np.abs(a), np.abs(b)])
        finite = finite[np.isfinite(finite)]
        raise NumericalError(
            f"PDE integration produced non-finite values at step {step}/{n_steps}",
            {"step": step, "n_steps": n_steps, "max_abs": float(finite.max()) if finite.size else float("nan")},
        )


def _strang(f1, f2, z, params, n_steps, interpolation):
    dz = z / n_steps
    with np.errstate(invalid="ignore"):
        c, s = np.cos(params.beta * dz), np.sin(params.beta * dz)
    dt = f1.grid.dt
    a = np.array(f1.samples, dtype=complex)
    b = np.array(f2.samples, dtype=complex)
    if interpolation == "spectral":
        omega = 2 * np.pi * np.fft.fftfreq(a.size, dt)
        h1 = np.exp(-0.5j * omega * dz / params.v1)
        h2 = np.exp(-0.5j * omega * dz / params.v2)
        a, b = np.fft.fft(a), np.fft.fft(b)
        for step in range(n_steps):
            if step % 64 == 1:
                _check_finite(a, b, step, n_steps)
            a *= h1
            b *= h2
            a, b = c * a - 1j * s * b, c * b - 1j * s * a
            a *= h1
            b *= h2
        a, b = np.fft.ifft(a), np.fft.ifft(b)
        _check_finite(a, b, n_steps, n_steps)
        return a, b
    half1, half2 = 0.5 * dz / params.v1, 0.5 * dz / params.v2
    for step in range(n_steps):
        a = shift_samples(a, half1, dt)
        b = shift_samples(b, half2, dt)
        a, b = c * a - 1j * s * b, c * b - 1j * s * a
        a = shift_samples(a, half1, dt)
        b = shift_samples(b, half2, dt)
        if step % 64 == 0:
            _check_finite(a, b, step, n_steps)
    _check_finite(a, b, n_steps, n_steps)
    return a, b


def relative_l2(x: FieldPair, y: FieldPair) -> float:
    """``||x - y|| / ||y||`` over both modes together."""
    num = np.sum(np.abs(x.phi1 - y.phi1) ** 2 + np.abs(x.phi2 - y.phi2) ** 2)
    den = np.sum(np.abs(y.phi1) ** 2 + np.abs(y.phi2) ** 2)
    return float(np.sqrt(num / den)) if den > 0 else float(np.sqrt(num))


def integrate_pde(
    f1: PulseProfile,
    f2: PulseProfile,
    z: float,
    params: DerivedParams,
    settings: OracleSettings = OracleSettings(),
) -> FieldPair:
    """Integrate to depth ``z`` with ``n_z_steps`` and a companion run at half the step size.

    The finer result is returned; ``error_estimate`` is the Richardson
    estimate ``||fine - coarse|| / (3 ||fine||)`` of its relative L2 error.
    """
    _check_depth(z, params)
    grid = _common_grid(f1, f2)
    check_delay_span(f1, f2, z, params)
    z = min(max(z, 0.0), params.L)
    n = settings.n_z_steps
    coarse = FieldPair(z, grid, *_strang(f1, f2, z, params, n, settings.interpolation), f1.norm_L_over_c)
    fine = FieldPair(z, grid, *_strang(f1, f2, z, params, 2 * n, settings.interpolation), f1.norm_L_over_c)
    estimate = relative_l2(coarse, fine) / 3
    return FieldPair(z, grid, fine.phi1, fine.phi2, f1.norm_L_over_c, f"oracle-{settings.interpolation}", estimate)


@dataclass(frozen=True)
class ConvergenceRow:
    n_coarse: int
    n_fine: int
    difference: float
    observed_order: float | None


def convergence_study(
    f1: PulseProfile,
    f2: PulseProfile,
    z: float,
    params: DerivedParams,
    step_counts,
    interpolation: str = "spectral",
) -> list[ConvergenceRow]:
    """Successive-refinement L2 differences and the observed order between them."""
    steps = [int(n) for n in step_counts]
    if len(steps) < 3:
        raise ParameterDomainError("convergence_study needs at least three step counts")
    if any(b != 2 * a for a, b in zip(steps, steps[1:])):
        raise ParameterDomainError(f"step counts must double successively, got {steps}")
    if steps[0] < 1:
        raise ParameterDomainError("step counts must be positive")
    _check_depth(z, params)
    grid = _common_grid(f1, f2)
    check_delay_span(f1, f2, z, params)
    runs = [FieldPair(z, grid, *_strang(f1, f2, z, params, n, interpolation), f1.norm_L_over_c) for n in steps]
    rows = []
    prev = None
    for (na, ra), (nb, rb) in zip(zip(steps, runs), zip(steps[1:], runs[1:])):
        diff = relative_l2(ra, rb)
        order = math.log2(prev / diff) if prev and diff > 0 else None
        rows.append(ConvergenceRow(na, nb, diff, order))
        prev = diff
    return rows
