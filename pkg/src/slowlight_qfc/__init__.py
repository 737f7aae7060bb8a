"""Parametric single-photon frequency conversion in a slow-light atomic medium."""

__version__ = "0.1.0"

from .errors import ConfigError, NumericalError, ParameterDomainError, QFCError
from .medium import (
    DerivedParams,
    DressedConfig,
    MediumConfig,
    ValidityReport,
    derive,
    dressed_transform,
    rb87_dressed_preset,
    rb87_preset,
    validity,
)
from .observables import (
    ConversionReport,
    TimeBinReport,
    centroid_delay,
    conservation_profile,
    conversion_report,
    quantum_efficiency,
    qubit_amplitudes,
    shape_fidelity,
    timebin_analyze,
)
from .oracle import OracleSettings, convergence_study, integrate_pde
from .propagator import FieldPair, free_space_shift, propagate, propagate_equal_v, propagate_general
from .pulses import PulseProfile, TimeGrid, double_hump, gaussian, photon_number, time_bin
from .config import RunConfig, load_config
from .experiments import (
    SweepSpec,
    dressed_experiment,
    partial_conversion_experiment,
    run_single,
    shapes_experiment,
    sweep_omega,
    timebin_experiment,
)
