import dataclasses
import math

import mpmath
import numpy as np
import pytest
from scipy.optimize import brentq

from conftest import T_PULSE, vacuum_like
from slowlight_qfc.errors import ParameterDomainError
from slowlight_qfc.medium import MediumConfig, derive
from slowlight_qfc.observables import centroid_delay
from slowlight_qfc.propagator import (
    bessel_j0,
    bessel_j1,
    free_space_shift,
    j1_over_x,
    kernel_tables,
    propagate,
    propagate_equal_v,
    propagate_general,
)
from slowlight_qfc.pulses import default_grid, gaussian, photon_number, shift_samples


def equal_medium(preset, betaL):
    """Equal-velocity medium whose drive at 8 Gamma gives the requested beta L."""
    omega = 8 * preset.Gamma_ref
    G = betaL * omega / preset.L
    return dataclasses.replace(preset, G1=G, G2=G), omega


def test_bessel_against_mpmath():
    x = np.concatenate([np.linspace(0, 50, 1001), [1e-9, 1e-4, 2.404825557695773, 49.999]])
    ref0 = np.array([float(mpmath.besselj(0, v)) for v in x])
    ref1 = np.array([float(mpmath.besselj(1, v)) for v in x])
    assert np.max(np.abs(bessel_j0(x) - ref0)) <= 1e-10
    assert np.max(np.abs(bessel_j1(x) - ref1)) <= 1e-10


def test_bessel_origin_values():
    assert bessel_j0(0.0) == 1.0
    assert bessel_j1(0.0) == 0.0
    assert j1_over_x(0.0) == 0.5


def test_first_zero_of_j0():
    root = brentq(bessel_j0, 2.0, 3.0, xtol=1e-15)
    assert root == pytest.approx(2.404825557695773, abs=1e-10)
    assert abs(bessel_j0(2.404825557695773)) < 1e-10


def test_j0_derivative_is_minus_j1():
    h = 1e-5
    fd = (bessel_j0(1.3 + h) - bessel_j0(1.3 - h)) / (2 * h)
    assert fd == pytest.approx(-bessel_j1(1.3), abs=1e-6)


def test_kernel_tables_regular_form():
    tab = kernel_tables(1e-4, 1.7e4, 64)
    assert np.all(tab.psi >= 0)
    assert np.all((tab.nodes > 0) & (tab.nodes < 1e-4))
    raw = -tab.j1 * tab.beta * tab.nodes / np.sqrt(tab.nodes * (tab.z - tab.nodes))
    np.testing.assert_allclose(tab.dj0_dz, raw, rtol=1e-10)
    assert tab.weights.sum() == pytest.approx(1e-4, rel=1e-14)


def test_uncoupled_is_pure_transport(preset, params8, pulse8):
    p0 = params8.without_coupling()
    out = propagate_general(pulse8, vacuum_like(pulse8), preset.L, p0)
    np.testing.assert_array_equal(out.phi1, shift_samples(pulse8.samples, preset.L / p0.v1, pulse8.grid.dt))
    assert not np.any(out.phi2)


def test_zero_depth_is_identity(params8, pulse8):
    out = propagate_general(pulse8, vacuum_like(pulse8), 0.0, params8)
    np.testing.assert_array_equal(out.phi1, pulse8.samples)
    assert not np.any(out.phi2)


def test_preset_conversion_at_8_gamma(preset, params8, pulse8):
    out = propagate_general(pulse8, vacuum_like(pulse8), preset.L, params8)
    assert photon_number(out.mode(2)) == pytest.approx(0.90, abs=0.05)


def test_depth_outside_medium_rejected(preset, params8, pulse8):
    with pytest.raises(ParameterDomainError, match="outside the medium"):
        propagate_general(pulse8, vacuum_like(pulse8), 1.5 * preset.L, params8)
    with pytest.raises(ParameterDomainError):
        propagate_general(pulse8, vacuum_like(pulse8), -1e-6, params8)


def test_grid_too_narrow_for_delay(preset, params8):
    slow = derive(preset, 3 * preset.Gamma_ref)
    grid = dataclasses.replace(default_grid(params8, T_PULSE), t_max=4 * T_PULSE)
    f = gaussian(T_PULSE, 0.0, grid, length=preset.L)
    with pytest.raises(ParameterDomainError, match="need t in"):
        propagate_general(f, vacuum_like(f), preset.L, slow)


def test_equal_velocity_quarter_turn(preset):
    cfg, omega = equal_medium(preset, math.pi / 2)
    p = derive(cfg, omega)
    grid = default_grid(p, T_PULSE)
    f = gaussian(T_PULSE, 0.0, grid, length=preset.L)
    out = propagate_equal_v(f, vacuum_like(f), preset.L, p)
    delayed = shift_samples(f.samples, preset.L / p.v1, grid.dt)
    assert np.max(np.abs(out.phi1)) < 1e-15
    np.testing.assert_allclose(out.phi2, -1j * delayed, atol=1e-18)


def test_equal_velocity_half_turn(preset):
    cfg, omega = equal_medium(preset, math.pi)
    p = derive(cfg, omega)
    f = gaussian(T_PULSE, 0.0, default_grid(p, T_PULSE), length=preset.L)
    out = propagate_equal_v(f, vacuum_like(f), preset.L, p)
    delayed = shift_samples(f.samples, preset.L / p.v1, f.grid.dt)
    np.testing.assert_allclose(out.phi1, -delayed, atol=1e-17)
    assert np.max(np.abs(out.phi2)) < 1e-17


def test_equal_v_rejects_unequal(params8, pulse8, preset):
    with pytest.raises(ParameterDomainError):
        propagate_equal_v(pulse8, vacuum_like(pulse8), preset.L, params8)


def test_general_matches_rotation_for_equal_velocities(preset):
    cfg, omega = equal_medium(preset, 1.2)
    p = derive(cfg, omega)
    grid = default_grid(p, T_PULSE)
    f1 = gaussian(T_PULSE, 0.0, grid, length=preset.L)
    f2 = gaussian(T_PULSE, 1.5 * T_PULSE, grid, length=preset.L) * (0.3 + 0.4j)
    for z in (0.3 * preset.L, preset.L):
        a = propagate_general(f1, f2, z, p)
        b = propagate_equal_v(f1, f2, z, p)
        scale = np.abs(f1.samples).max()
        assert np.max(np.abs(a.phi1 - b.phi1)) / scale < 1e-9
        assert np.max(np.abs(a.phi2 - b.phi2)) / scale < 1e-9


def test_dispatch_uses_rotation_for_equal_velocities(preset):
    cfg, omega = equal_medium(preset, 1.0)
    p = derive(cfg, omega)
    f = gaussian(T_PULSE, 0.0, default_grid(p, T_PULSE), length=preset.L)
    assert propagate(f, vacuum_like(f), preset.L, p).method == "equal_v"


def test_near_equal_velocity_limit(preset):
    cfg, omega = equal_medium(preset, math.pi / 2)
    p = derive(cfg, omega)
    f = gaussian(T_PULSE, 0.0, default_grid(p, T_PULSE), length=preset.L)
    closed = propagate_equal_v(f, vacuum_like(f), preset.L, p)
    near = dataclasses.replace(p, v2=p.v1 * (1 + 1e-8))
    out = propagate_general(f, vacuum_like(f), preset.L, near)
    dev = max(np.abs(out.phi1 - closed.phi1).max(), np.abs(out.phi2 - closed.phi2).max())
    assert dev <= 1e-6


def test_linearity(preset, params8):
    grid = default_grid(params8, T_PULSE)
    f = gaussian(T_PULSE, 0.0, grid, length=preset.L)
    g = gaussian(T_PULSE, 2 * T_PULSE, grid, length=preset.L)
    a, b = 0.6 - 0.2j, -0.3 + 0.9j
    z = 0.7 * preset.L
    kw = dict(adaptive=False)
    combo = propagate_general(a * f, b * g, z, params8, **kw)
    pf = propagate_general(f, vacuum_like(f), z, params8, **kw)
    pg = propagate_general(vacuum_like(g), g, z, params8, **kw)
    scale = np.abs(combo.phi1).max() + np.abs(combo.phi2).max()
    assert np.abs(combo.phi1 - (a * pf.phi1 + b * pg.phi1)).max() / scale < 1e-12
    assert np.abs(combo.phi2 - (a * pf.phi2 + b * pg.phi2)).max() / scale < 1e-12


def test_label_swap_symmetry(preset, params8, pulse8):
    g = gaussian(T_PULSE, T_PULSE, pulse8.grid, length=preset.L) * 0.5j
    swapped = dataclasses.replace(params8, v1=params8.v2, v2=params8.v1)
    a = propagate_general(pulse8, g, preset.L, params8)
    b = propagate_general(g, pulse8, preset.L, swapped)
    np.testing.assert_array_equal(a.phi1, b.phi2)
    np.testing.assert_array_equal(a.phi2, b.phi1)


@pytest.mark.parametrize("z_frac", [0.25, 0.5, 0.8, 1.0])
def test_conservation_inside_medium(preset, params8, pulse8, z_frac):
    out = propagate_general(pulse8, vacuum_like(pulse8), z_frac * preset.L, params8)
    assert abs(out.n1 + out.n2 - 1) <= 1e-3


def test_conservation_tightens_with_refinement(preset, params8):
    residuals = []
    for n_points, nodes in ((512, 16), (1024, 32), (2048, 64)):
        grid = default_grid(params8, T_PULSE, n_points=n_points)
        f = gaussian(T_PULSE, 0.0, grid, length=preset.L)
        out = propagate_general(f, vacuum_like(f), preset.L, params8, n_nodes=nodes, adaptive=False)
        residuals.append(abs(out.n1 + out.n2 - photon_number(f)))
    assert residuals[0] > residuals[-1]


def test_adaptive_quadrature_doubles_nodes(preset, params8, pulse8):
    out = propagate_general(pulse8, vacuum_like(pulse8), preset.L, params8, n_nodes=2, tol=1e-6)
    assert out.n_nodes > 2
    assert abs(out.n1 + out.n2 - 1) <= 1e-6


def test_delay_ordering_flips(preset):
    lags = {}
    for og in (6.0, 18.0):
        p = derive(preset, og * preset.Gamma_ref)
        f = gaussian(T_PULSE, 0.0, default_grid(p, T_PULSE), length=preset.L)
        out = propagate_general(f, vacuum_like(f), preset.L, p)
        lags[og] = centroid_delay(out.mode(2), out.mode(1))
    assert lags[18.0] > 0 > lags[6.0]


def test_free_space_shift(pulse8):
    assert np.array_equal(free_space_shift(pulse8, 0.0).samples, pulse8.samples)
    moved = free_space_shift(pulse8, 1.0)
    assert photon_number(moved) == pytest.approx(1.0, abs=1e-9)
    back = free_space_shift(moved, -1.0)
    assert np.abs(back.samples - pulse8.samples).max() < 1e-9
