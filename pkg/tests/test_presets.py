import math

import numpy as np
import pytest
from scipy import integrate

from euler_alignment import eulerian as E
from euler_alignment import kernels as K
from euler_alignment import presets as P
from euler_alignment.errors import ConfigurationError


def test_sine_velocity_closed_form():
    pre = P.sine_velocity(K.PowerLaw(0.5), -2.0)
    assert pre.inf_G0 == pytest.approx(2.0 * math.sqrt(2.0) - 4.0 * math.pi)
    assert not pre.subcritical
    pre = P.sine_velocity(K.PowerLaw(0.5), 0.1)
    assert pre.C0 == pytest.approx(2.0 * math.sqrt(2.0) - 0.2 * math.pi)


@pytest.mark.parametrize("kern", [K.PowerLaw(0.25), K.PowerLaw(0.75), K.Tabulated((0.01, 0.1, 0.5), (5.0, 1.0, 0.2))],
                         ids=str)
def test_density_wave_c0_against_grid(kern):
    pre = P.density_wave(kern, 0.3)
    N = 1024
    init = E.init_from_primitive(pre.rho0, pre.u0, kern, N)
    assert init.C0 == pytest.approx(pre.C0, rel=2e-3)
    assert init.inf_G == pytest.approx(pre.inf_G0, rel=2e-3)


def test_fourier_coefficient_constant_kernel_vanishes():
    assert abs(P.fourier_cosine(K.constant_kernel(1.0))) < 1e-12


def test_vacuum_bump_consistency():
    kern = K.constant_kernel(0.1)
    pre = P.vacuum_bump(kern, ratio=1.1, width=0.5)
    x = np.linspace(-0.5, 0.5, 2001)
    # u0 is periodic and its derivative is du0
    assert abs(pre.u0(np.array([0.5]))[0]) < 1e-12 and abs(pre.u0(np.array([-0.5]))[0]) < 1e-12
    h = 1e-6
    fd = (pre.u0(x[1:-1] + h) - pre.u0(x[1:-1] - h)) / (2 * h)
    assert np.max(np.abs(fd - pre.du0(x[1:-1]))) < 1e-5
    mass, _ = integrate.quad(pre.rho0, -0.5, 0.5, points=[-0.25, 0.25])
    assert mass == pytest.approx(1.0, rel=1e-10)
    assert pre.C0 > kern.l1_norm()
    assert pre.inf_G0 < 0.0
    with pytest.raises(ConfigurationError):
        P.vacuum_bump(K.PowerLaw(0.5))


def test_unknown_preset():
    with pytest.raises(ConfigurationError):
        P.make_preset("shock_tube", K.PowerLaw(0.5))
    with pytest.raises(ConfigurationError):
        P.density_wave(K.PowerLaw(0.5), 1.5)
