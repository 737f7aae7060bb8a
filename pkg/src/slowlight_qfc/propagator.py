"""Closed-form field solution inside the medium.

For mode ``i`` coupled to mode ``j`` the envelope at depth ``z`` is

    Phi_i(z,t) = f_i(t - z/v_i)
        + int_0^z dx [ f_i(t - (z-x)/v_j - x/v_i) dJ0(psi)/dz
                       - i beta f_j(t - (z-x)/v_i - x/v_j) J0(psi) ],

with ``psi = 2 beta sqrt(x (z - x))``. The x-integral is done by
Gauss-Legendre quadrature. ``dJ0/dz`` is written as ``-2 beta^2 x J1(psi)/psi``,
which is smooth on the closed interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import NumericalError, ParameterDomainError
from .medium import C_LIGHT, DerivedParams
from .pulses import EDGE_DECAY, PulseProfile, TimeGrid, photon_number, shift_samples

DEFAULT_NODES = 256
MAX_NODES = 4096
CONSERVATION_TOL = 1e-3
_SMALL_PSI = 1e-8


def bessel_j0(x):
    return special.j0(x)


def bessel_j1(x):
    return special.j1(x)


def j1_over_x(x):
    """``J1(x)/x`` with its limit 1/2 at the origin."""
    x = np.asarray(x, dtype=float)
    safe = np.where(x < _SMALL_PSI, 1.0, x)
    return np.where(x < _SMALL_PSI, 0.5 - x * x / 16, special.j1(safe) / safe)


@dataclass(frozen=True, eq=False)
class KernelTables:
    z: float
    beta: float
    nodes: np.ndarray
    weights: np.ndarray
    psi: np.ndarray
    j0: np.ndarray
    j1: np.ndarray

    @property
    def dj0_dz(self) -> np.ndarray:
        """``dJ0(psi)/dz = -J1(psi) beta x / sqrt(x(z-x))`` evaluated in its regular form."""
        return -2 * self.beta**2 * self.nodes * j1_over_x(self.psi)


def kernel_tables(z: float, beta: float, n_nodes: int = DEFAULT_NODES) -> KernelTables:
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    x = 0.5 * z * (x + 1)
    w = 0.5 * z * w
    psi = 2 * beta * np.sqrt(np.clip(x * (z - x), 0.0, None))
    return KernelTables(z, beta, x, w, psi, bessel_j0(psi), bessel_j1(psi))


@dataclass(frozen=True, eq=False)
class FieldPair:
    """Envelopes of both modes at depth ``z`` on a shared grid."""

    z: float
    grid: TimeGrid
    phi1: np.ndarray
    phi2: np.ndarray
    norm_L_over_c: float
    method: str = "analytic"
    error_estimate: float | None = None
    n_nodes: int | None = None

    def mode(self, i: int) -> PulseProfile:
        if i not in (1, 2):
            raise ParameterDomainError(f"mode index must be 1 or 2, got {i!r}")
        return PulseProfile(self.grid, self.phi1 if i == 1 else self.phi2, self.norm_L_over_c)

    @property
    def n1(self) -> float:
        return photon_number(self.mode(1))

    @property
    def n2(self) -> float:
        return photon_number(self.mode(2))


def _common_grid(f1: PulseProfile, f2: PulseProfile) -> TimeGrid:
    if f1.grid != f2.grid:
        raise ParameterDomainError("input profiles must share one time grid")
    if f1.norm_L_over_c != f2.norm_L_over_c:
        raise ParameterDomainError("input profiles use different L/c normalizations")
    return f1.grid


def _check_depth(z: float, params: DerivedParams):
    if not (math.isfinite(z) and -1e-12 * params.L <= z <= params.L * (1 + 1e-12)):
        raise ParameterDomainError(f"z = {z!r} m outside the medium [0, {params.L!r}] m")


def significant_support(samples: np.ndarray, grid: TimeGrid) -> tuple[float, float] | None:
    """Time span where ``|f|`` exceeds ``EDGE_DECAY`` of its peak, or None for a zero envelope."""
    mag = np.abs(samples)
    peak = mag.max()
    if peak == 0:
        return None
    idx = np.nonzero(mag > EDGE_DECAY * peak)[0]
    t = grid.times
    return float(t[idx[0]]), float(t[idx[-1]])


def check_delay_span(f1: PulseProfile, f2: PulseProfile, z: float, params: DerivedParams):
    """Raise if the slowest mode would carry the pulse past the end of the grid."""
    grid = f1.grid
    spans = [s for s in (significant_support(f1.samples, grid), significant_support(f2.samples, grid)) if s]
    if not spans:
        return
    lo = min(s[0] for s in spans)
    hi = max(s[1] for s in spans)
    needed = hi + z / min(params.v1, params.v2)
    if needed > grid.t_max:
        raise ParameterDomainError(
            f"grid too narrow for the propagation delay: need t in [{lo:.6g}, {needed:.6g}] s, "
            f"grid ends at {grid.t_max:.6g} s"
        )


def _mode_field(fi, fj, z, vi, vj, beta, tables, dt):
    out = shift_samples(fi, z / vi, dt).astype(complex)
    if z == 0 or beta == 0:
        return out
    has_i = np.any(fi)
    has_j = np.any(fj)
    k_same = tables.dj0_dz * tables.weights
    k_cross = -1j * beta * tables.j0 * tables.weights
    for x, ks, kc in zip(tables.nodes, k_same, k_cross):
        if has_i:
            out += ks * shift_samples(fi, (z - x) / vj + x / vi, dt)
        if has_j:
            out += kc * shift_samples(fj, (z - x) / vi + x / vj, dt)
    return out


def _evaluate(f1, f2, z, params, n_nodes):
    grid = f1.grid
    tables = kernel_tables(z, params.beta, n_nodes)
    dt = grid.dt
    phi1 = _mode_field(f1.samples, f2.samples, z, params.v1, params.v2, params.beta, tables, dt)
    phi2 = _mode_field(f2.samples, f1.samples, z, params.v2, params.v1, params.beta, tables, dt)
    if not (np.all(np.isfinite(phi1)) and np.all(np.isfinite(phi2))):
        raise NumericalError(
            "non-finite field in kernel evaluation",
            {"z": z, "n_nodes": n_nodes, "beta": params.beta},
        )
    return FieldPair(z, grid, phi1, phi2, f1.norm_L_over_c, "analytic", None, n_nodes)


def propagate_general(
    f1: PulseProfile,
    f2: PulseProfile,
    z: float,
    params: DerivedParams,
    *,
    n_nodes: int = DEFAULT_NODES,
    adaptive: bool = True,
    tol: float = CONSERVATION_TOL,
) -> FieldPair:
    """Bessel-kernel solution at depth ``z`` for arbitrary group velocities.

    With ``adaptive`` the node count doubles (up to ``MAX_NODES``) while the
    photon-number residual ``|n1 + n2 - n_in|`` exceeds ``tol``.
    """
    _check_depth(z, params)
    _common_grid(f1, f2)
    check_delay_span(f1, f2, z, params)
    z = min(max(z, 0.0), params.L)
    out = _evaluate(f1, f2, z, params, n_nodes)
    if not adaptive:
        return out
    n_in = photon_number(f1) + photon_number(f2)
    while abs(out.n1 + out.n2 - n_in) > tol * max(n_in, 1e-300) and out.n_nodes < MAX_NODES:
        out = _evaluate(f1, f2, z, params, 2 * out.n_nodes)
    return out


def propagate_equal_v(f1: PulseProfile, f2: PulseProfile, z: float, params: DerivedParams) -> FieldPair:
    """Equal group velocities: a rigid delay combined with a cos/sin mode rotation."""
    if params.v1 != params.v2:
        raise ParameterDomainError(f"group velocities differ (v1={params.v1!r}, v2={params.v2!r})")
    _check_depth(z, params)
    grid = _common_grid(f1, f2)
    check_delay_span(f1, f2, z, params)
    delay = z / params.v1
    g1 = shift_samples(f1.samples, delay, grid.dt)
    g2 = shift_samples(f2.samples, delay, grid.dt)
    c, s = math.cos(params.beta * z), math.sin(params.beta * z)
    return FieldPair(z, grid, c * g1 - 1j * s * g2, c * g2 - 1j * s * g1, f1.norm_L_over_c, "equal_v")


def propagate(f1: PulseProfile, f2: PulseProfile, z: float, params: DerivedParams, **kwargs) -> FieldPair:
    """Dispatch to the closed rotation form when the velocities coincide."""
    if params.equal_velocity:
        return propagate_equal_v(f1, f2, z, params)
    return propagate_general(f1, f2, z, params, **kwargs)


def free_space_shift(f: PulseProfile, z: float) -> PulseProfile:
    """Vacuum propagation over ``z`` metres: a delay of ``z/c``."""
    return f.with_samples(shift_samples(f.samples, z / C_LIGHT, f.grid.dt))
