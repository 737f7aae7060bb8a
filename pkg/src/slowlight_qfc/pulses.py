"""Sampled single-photon envelopes on a uniform time grid.

Envelopes are complex and normalized so that ``(c/L) * integral |f|^2 dt``
is the mean photon number; ``L`` is the medium length carried in
``PulseProfile.norm_L_over_c``.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParameterDomainError
from .medium import C_LIGHT, DerivedParams

EDGE_DECAY = 1e-8
SPAN_IN_WIDTHS = 4.0
DEFAULT_POINTS = 4096


@dataclass(frozen=True)
class TimeGrid:
    t_min: float
    t_max: float
    n_points: int

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ParameterDomainError(f"n_points must be an integer >= 2, got {self.n_points!r}")
        if not (math.isfinite(self.t_min) and math.isfinite(self.t_max) and self.t_max > self.t_min):
            raise ParameterDomainError(f"need t_max > t_min, got [{self.t_min!r}, {self.t_max!r}]")

    @property
    def dt(self) -> float:
        return (self.t_max - self.t_min) / (self.n_points - 1)

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.n_points)

    def covers(self, lo: float, hi: float) -> bool:
        return self.t_min <= lo and hi <= self.t_max

    def refined(self, factor: int = 2) -> "TimeGrid":
        return TimeGrid(self.t_min, self.t_max, (self.n_points - 1) * factor + 1)


@dataclass(frozen=True, eq=False)
class PulseProfile:
    grid: TimeGrid
    samples: np.ndarray
    norm_L_over_c: float

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex)
        if samples.shape != (self.grid.n_points,):
            raise ParameterDomainError(
                f"expected {self.grid.n_points} samples, got array of shape {samples.shape}"
            )
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        if not self.norm_L_over_c > 0:
            raise ParameterDomainError("norm_L_over_c must be positive")

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def with_samples(self, samples) -> "PulseProfile":
        return dataclasses.replace(self, samples=samples)

    def __mul__(self, scalar) -> "PulseProfile":
        return self.with_samples(self.samples * scalar)

    __rmul__ = __mul__

    def __add__(self, other: "PulseProfile") -> "PulseProfile":
        if other.grid != self.grid:
            raise ParameterDomainError("profiles live on different grids")
        return self.with_samples(self.samples + other.samples)


def shift_samples(samples: np.ndarray, delay: float, dt: float) -> np.ndarray:
    """Return ``f(t - delay)`` sampled on the same uniform grid.

    Four-point Lagrange interpolation; points that fall outside the grid read
    as zero.
    """
    samples = np.asarray(samples)
    s = delay / dt
    m = math.floor(s)
    u = 1.0 - (s - m)
    weights = (
        -u * (u - 1) * (u - 2) / 6,
        (u + 1) * (u - 1) * (u - 2) / 2,
        -(u + 1) * u * (u - 2) / 2,
        (u + 1) * u * (u - 1) / 6,
    )
    n = samples.shape[-1]
    out = np.zeros(samples.shape, dtype=np.result_type(samples, float))
    for k, w in zip((-1, 0, 1, 2), weights):
        if w == 0.0:
            continue
        off = k - m - 1
        lo, hi = max(0, -off), min(n, n - off)
        if lo < hi:
            out[..., lo:hi] += w * samples[..., lo + off:hi + off]
    return out


def _check_span(grid: TimeGrid, lo: float, hi: float, what: str):
    if not grid.covers(lo, hi):
        raise ParameterDomainError(
            f"grid [{grid.t_min:.6g}, {grid.t_max:.6g}] s does not contain {what}; "
            f"required span [{lo:.6g}, {hi:.6g}] s"
        )


def _require_positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise ParameterDomainError(f"{name} must be positive, got {value!r}")


def _normalized(grid, samples, length):
    L_over_c = length / C_LIGHT
    n = _number(samples, grid.dt, L_over_c)
    return PulseProfile(grid, samples / math.sqrt(n), L_over_c)


def gaussian_amplitude(T: float, length: float) -> float:
    """Peak amplitude C of the unit-photon envelope ``C exp(-2 t^2/T^2)``."""
    return math.sqrt(2 * length / (C_LIGHT * T * math.sqrt(math.pi)))


def gaussian(T: float, t0: float, grid: TimeGrid, *, length: float) -> PulseProfile:
    """Unit-photon Gaussian ``C exp(-2 (t - t0)^2 / T^2)``."""
    _require_positive("T", T)
    _require_positive("length", length)
    _check_span(grid, t0 - SPAN_IN_WIDTHS * T, t0 + SPAN_IN_WIDTHS * T, "the Gaussian pulse")
    t = grid.times
    C = gaussian_amplitude(T, length)
    return PulseProfile(grid, C * np.exp(-2 * (t - t0) ** 2 / T**2), length / C_LIGHT)


def double_hump(
    T: float, separation: float, grid: TimeGrid, *, length: float, center: float | None = None
) -> PulseProfile:
    """Two equal Gaussians of width ``T`` at ``center -/+ separation/2``, renormalized.

    ``center`` defaults to the middle of the grid.
    """
    _require_positive("T", T)
    _require_positive("length", length)
    if separation < 0:
        raise ParameterDomainError(f"separation must be >= 0, got {separation!r}")
    if center is None:
        center = 0.5 * (grid.t_min + grid.t_max)
    half = separation / 2
    _check_span(
        grid, center - half - SPAN_IN_WIDTHS * T, center + half + SPAN_IN_WIDTHS * T, "both humps"
    )
    t = grid.times
    samples = np.exp(-2 * (t - center + half) ** 2 / T**2) + np.exp(-2 * (t - center - half) ** 2 / T**2)
    return _normalized(grid, samples.astype(complex), length)


def time_bin(
    a: complex, b: complex, T: float, tau: float, grid: TimeGrid, *, length: float, t0: float = 0.0
) -> PulseProfile:
    """Time-bin qubit ``a f_0(t) + b f_tau(t)`` built from unit Gaussians at ``t0`` and ``t0 + tau``."""
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > 1e-12:
        raise ParameterDomainError(f"|a|^2 + |b|^2 must be 1, got {abs(a) ** 2 + abs(b) ** 2!r}")
    if tau < 5 * T:
        raise ParameterDomainError(f"bins overlap: tau = {tau:.4g} s < 5T = {5 * T:.4g} s")
    early = gaussian(T, t0, grid, length=length)
    late = gaussian(T, t0 + tau, grid, length=length)
    return early.with_samples(a * early.samples + b * late.samples)


def _number(samples, dt, L_over_c):
    return float(np.trapezoid(np.abs(samples) ** 2, dx=dt)) / L_over_c


def photon_number(p: PulseProfile, window: tuple[float, float] | None = None) -> float:
    """``(c/L) * integral |f|^2 dt`` by the trapezoid rule, optionally over ``window`` only."""
    if window is None:
        return _number(p.samples, p.grid.dt, p.norm_L_over_c)
    t = p.times
    mask = (t >= window[0]) & (t <= window[1])
    if mask.sum() < 2:
        return 0.0
    return float(np.trapezoid(np.abs(p.samples[mask]) ** 2, t[mask])) / p.norm_L_over_c


def default_grid(
    params: DerivedParams, T: float, *, extra: float = 0.0, n_points: int = DEFAULT_POINTS
) -> TimeGrid:
    """``[-6T, extra + L/min(v) + 8T]``: room for the input, the slowest output and broadening."""
    _require_positive("T", T)
    slowest = params.L / min(params.v1, params.v2)
    return TimeGrid(-6 * T, extra + slowest + 8 * T, n_points)


def write_profile_csv(p: PulseProfile, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t_s", "re_f", "im_f"])
        for t, f in zip(p.times, p.samples):
            writer.writerow([f"{t:.17g}", f"{f.real:.17g}", f"{f.imag:.17g}"])


def read_profile_csv(path, *, length: float) -> PulseProfile:
    """Load a profile written by ``write_profile_csv``; the time column must be uniform."""
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["t_s", "re_f", "im_f"]:
            raise ParameterDomainError(f"expected header t_s,re_f,im_f, got {header!r}")
        rows = [[float(x) for x in row] for row in reader if row]
    data = np.array(rows, dtype=float)
    if data.ndim != 2 or data.shape[0] < 2:
        raise ParameterDomainError("profile CSV needs at least two rows")
    t = data[:, 0]
    grid = TimeGrid(float(t[0]), float(t[-1]), len(t))
    if not np.allclose(t, grid.times, rtol=0, atol=1e-9 * grid.dt):
        raise ParameterDomainError("profile CSV time column is not uniformly spaced")
    return PulseProfile(grid, data[:, 1] + 1j * data[:, 2], length / C_LIGHT)
