import numpy as np
import pytest

from slowlight_qfc.medium import derive, rb87_preset
from slowlight_qfc.pulses import default_grid, gaussian

T_PULSE = 20e-9

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def preset():
    return rb87_preset()


@pytest.fixture(scope="session")
def params8(preset):
    return derive(preset, 8 * preset.Gamma_ref)


@pytest.fixture(scope="session")
def pulse8(preset, params8):
    grid = default_grid(params8, T_PULSE)
    return gaussian(T_PULSE, 0.0, grid, length=preset.L)


def vacuum_like(f):
    return f.with_samples(np.zeros_like(f.samples))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
