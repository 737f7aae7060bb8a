"""Physical description of the atomic medium and its derived propagation constants.

The two quantum fields couple to the atoms only through the collective
combinations ``G_i = g_i**2 * N / c`` (units rad**2 s**-1 m**-1), so the
configuration stores those directly instead of single-atom couplings, atom
number and quantization volume. Everything is SI.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

from .errors import ConfigError, ParameterDomainError

C_LIGHT = 2.99792458e8  # m/s

# Rb-87 numbers used by the presets.
GAMMA_RB = 2 * math.pi * 3e6  # rad/s, Gamma_2 = 2 Gamma_1
OMEGA_REF_OVER_GAMMA = 8.0  # drive at which the preset group velocities hold
V1_REF = 1.25e4  # m/s
V2_OVER_V1_REF = 0.5
PASS_KAPPA = 0.1
WARN_FACTOR = 10.0


@dataclass(frozen=True)
class PhysicalConstants:
    c: float = C_LIGHT


@dataclass(frozen=True)
class MediumConfig:
    """Atomic medium and driving geometry.

    ``G1``/``G2`` are the collective couplings ``g_i^2 N / c``; ``Gamma_ref`` is
    the rate used as the unit for the drive Rabi frequency.
    """

    G1: float
    G2: float
    L: float
    Gamma1: float
    Gamma2: float
    lambda1: float
    lambda2: float
    atom_density: float
    Gamma_ref: float

    def __post_init__(self):
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ParameterDomainError(f"MediumConfig.{f.name} must be a positive finite number, got {value!r}")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class DerivedParams:
    Omega: float
    L: float
    v1: float
    v2: float
    beta: float
    kappa1L: float
    kappa2L: float
    alpha: float
    eit_bandwidth: float
    tau1: float
    tau2: float
    betaL: float

    @property
    def equal_velocity(self) -> bool:
        return self.v1 == self.v2

    def without_coupling(self) -> "DerivedParams":
        """Same transport, parametric coupling switched off."""
        return dataclasses.replace(self, beta=0.0, betaL=0.0)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


class Flag(str, enum.Enum):
    PASS = "pass"
    WARN = "warn"
    FAIL = "fail"


@dataclass(frozen=True)
class ValidityReport:
    kappa1L: float
    kappa2L: float
    eit_product: float
    dispersion_ratio1: float
    dispersion_ratio2: float
    broadened_width1: float
    broadened_width2: float
    flags: dict

    @property
    def worst(self) -> Flag:
        order = [Flag.PASS, Flag.WARN, Flag.FAIL]
        return max(self.flags.values(), key=order.index)

    def flags_string(self) -> str:
        return ";".join(f"{k}={v.value}" for k, v in self.flags.items())

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["flags"] = {k: v.value for k, v in self.flags.items()}
        return d


def _require_positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise ParameterDomainError(f"{name} must be positive and finite, got {value!r}")


def derive(config: MediumConfig, Omega: float) -> DerivedParams:
    """Group velocities, coupling and diagnostics at drive Rabi frequency ``Omega`` (rad/s)."""
    _require_positive("Omega", Omega)
    O2 = Omega * Omega
    v1 = O2 / config.G1
    v2 = O2 / config.G2
    beta = math.sqrt(config.G1 * config.G2) / Omega
    sigma = 3 * config.lambda1**2 / (4 * math.pi)
    alpha = config.atom_density * sigma * config.L
    tau1, tau2 = config.L / v1, config.L / v2
    return DerivedParams(
        Omega=Omega,
        L=config.L,
        v1=v1,
        v2=v2,
        beta=beta,
        kappa1L=config.Gamma2 * tau1,
        kappa2L=config.Gamma1 * tau2,
        alpha=alpha,
        eit_bandwidth=O2 / (config.Gamma_ref * math.sqrt(alpha)),
        tau1=tau1,
        tau2=tau2,
        betaL=beta * config.L,
    )


def _upper_flag(value, threshold):
    # value must stay below threshold
    if value <= threshold:
        return Flag.PASS
    if value <= WARN_FACTOR * threshold:
        return Flag.WARN
    return Flag.FAIL


def _lower_flag(value, threshold):
    if value >= threshold:
        return Flag.PASS
    if value >= threshold / WARN_FACTOR:
        return Flag.WARN
    return Flag.FAIL


def validity(config: MediumConfig, Omega: float, T: float, length: float | None = None) -> ValidityReport:
    """Evaluate the absorption, EIT-window and dispersion conditions.

    Never raises on a violated condition; the outcome is carried in ``flags``.
    ``length`` overrides the propagation distance (``config.L`` by default) and
    may be zero.
    """
    _require_positive("T", T)
    p = derive(config, Omega)
    if length is None:
        length = config.L
    if not (math.isfinite(length) and length >= 0):
        raise ParameterDomainError(f"length must be non-negative, got {length!r}")
    tau1, tau2 = length / p.v1, length / p.v2
    kappa1L = config.Gamma2 * tau1
    kappa2L = config.Gamma1 * tau2
    ratio1 = 16 * tau1 / (T * T * Omega)
    ratio2 = 16 * tau2 / (T * T * Omega)
    eit_product = p.eit_bandwidth * T
    flags = {
        "kappa1L": _upper_flag(kappa1L, PASS_KAPPA),
        "kappa2L": _upper_flag(kappa2L, PASS_KAPPA),
        "eit_product": _lower_flag(eit_product, 1.0),
        "dispersion_ratio1": _upper_flag(ratio1, 1.0),
        "dispersion_ratio2": _upper_flag(ratio2, 1.0),
    }
    return ValidityReport(
        kappa1L=kappa1L,
        kappa2L=kappa2L,
        eit_product=eit_product,
        dispersion_ratio1=ratio1,
        dispersion_ratio2=ratio2,
        broadened_width1=T * math.sqrt(1 + ratio1),
        broadened_width2=T * math.sqrt(1 + ratio2),
        flags=flags,
    )


def rb87_preset() -> MediumConfig:
    """Rb-87 D1/D2 V-scheme, 100 um trap, couplings fixed at the 8 Gamma reference drive."""
    omega_ref = OMEGA_REF_OVER_GAMMA * GAMMA_RB
    v2 = V2_OVER_V1_REF * V1_REF
    return MediumConfig(
        G1=omega_ref**2 / V1_REF,
        G2=omega_ref**2 / v2,
        L=100e-6,
        Gamma1=GAMMA_RB / 2,
        Gamma2=GAMMA_RB,
        lambda1=795e-9,
        lambda2=780e-9,
        atom_density=1e19,
        Gamma_ref=GAMMA_RB,
    )


@dataclass(frozen=True)
class DressedConfig:
    """Four-level scheme with a second drive ``Omega0`` dressing levels 0 and 3."""

    base: MediumConfig
    Omega0: float
    Gamma3: float
    Delta: float

    MIN_SUPPRESSION_RATIO = 10.0

    def __post_init__(self):
        for name in ("Omega0", "Gamma3"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"DressedConfig.{name} must be positive, got {value!r}")
        if self.Omega0 / self.Gamma3 < self.MIN_SUPPRESSION_RATIO:
            raise ConfigError(
                f"Omega0/Gamma3 >= {self.MIN_SUPPRESSION_RATIO:g} violated "
                f"(got {self.Omega0 / self.Gamma3:.4g}); lower dressed state is not suppressed"
            )
        if abs(abs(self.Delta) - self.Omega0) > 1e-9 * self.Omega0:
            raise ConfigError(f"|Delta| = Omega0 violated (Delta={self.Delta!r}, Omega0={self.Omega0!r})")


def dressed_transform(d: DressedConfig) -> MediumConfig:
    """Effective V-scheme medium seen from the dressed ground state.

    Each g_i drops by sqrt(2) and only half the atoms participate, so both
    collective couplings are quartered.
    """
    return dataclasses.replace(d.base, G1=d.base.G1 / 4, G2=d.base.G2 / 4)


def rb87_dressed_preset() -> DressedConfig:
    """Rb-87 5S1/2, 5P3/2, 4D3/2, 5P1/2 ladder: 780 nm <-> 1.47 um conversion."""
    g_ratio = 0.96
    G1 = rb87_preset().G2  # 780 nm line coupling from the V-scheme preset
    base = MediumConfig(
        G1=G1,
        G2=G1 * g_ratio**2,
        L=100e-6,
        Gamma1=GAMMA_RB,
        Gamma2=2 * math.pi * 0.95e6,
        lambda1=780e-9,
        lambda2=1.47e-6,
        atom_density=1e19,
        Gamma_ref=GAMMA_RB,
    )
    Gamma3 = 2 * math.pi * 2.9e6
    Omega0 = 20 * Gamma3
    return DressedConfig(base=base, Omega0=Omega0, Gamma3=Gamma3, Delta=Omega0)
