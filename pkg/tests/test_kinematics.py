import math

import pytest
from hypothesis import given, strategies as st

from atomlaser.errors import IncompleteDescriptor, NotApplicable
from atomlaser.kinematics import (BeamDescriptor, accelerate_beam, derive_beam_scales,
                                  is_monochromatic, zeta_from_drop)

pos = st.floats(1e-3, 1e3)


def massive(k=10.0, dk=0.1, m=1.0, hbar=1.0):
    return derive_beam_scales(BeamDescriptor("massive", k, dk, mass=m, hbar=hbar))


def test_worked_numbers_are_exact():
    b = massive()
    assert b.tau_disp == 50.0
    assert b.l_disp == 500.0
    assert accelerate_beam(b, 2.0).l_disp == 4000.0


def test_photon_beam():
    b = derive_beam_scales(BeamDescriptor("photon", 10.0, 0.1, c=3.0))
    assert b.omega_bar == 30.0 and b.delta_omega == pytest.approx(0.3)
    assert b.l_disp is None and b.tau_disp is None
    assert b.wavelength == pytest.approx(2 * math.pi / 10)
    with pytest.raises(NotApplicable):
        accelerate_beam(b, 2.0)


def test_descriptor_errors():
    with pytest.raises(IncompleteDescriptor):
        derive_beam_scales(BeamDescriptor("massive", 1.0, 0.1))
    with pytest.raises(ValueError):
        derive_beam_scales(BeamDescriptor("neutrino", 1.0, 0.1))
    with pytest.raises(ValueError):
        accelerate_beam(massive(), 0.0)


def test_perfectly_monochromatic_never_disperses():
    b = massive(dk=0.0)
    assert b.l_disp == math.inf and b.l_coh == math.inf
    assert is_monochromatic(b)


@given(k=pos, dk=pos, m=pos, hbar=pos)
def test_gaussian_width_doubles_at_tau_disp(k, dk, m, hbar):
    b = massive(k, dk, m, hbar)
    s0 = 1 / (2 * dk)
    # free Gaussian: sigma(t)^2 = s0^2 (1 + (hbar t / (2 m s0^2))^2)
    var_ratio = 1 + (hbar * b.tau_disp / (2 * m * s0 ** 2)) ** 2
    assert var_ratio == pytest.approx(2.0, rel=1e-12)
    assert b.l_disp == pytest.approx(b.tau_disp * hbar * k / m, rel=1e-12)


@given(k=pos, dk=pos, z1=st.floats(0.1, 10), z2=st.floats(0.1, 10))
def test_acceleration_composes_and_keeps_delta_omega(k, dk, z1, z2):
    b = massive(k, dk)
    twice = accelerate_beam(accelerate_beam(b, z1), z2)
    once = accelerate_beam(b, z1 * z2)
    assert twice.k_bar == pytest.approx(once.k_bar, rel=1e-12)
    assert twice.delta_k == pytest.approx(once.delta_k, rel=1e-12)
    assert twice.delta_omega == pytest.approx(b.delta_omega, rel=1e-12)
    assert once.l_disp == pytest.approx(b.l_disp * (z1 * z2) ** 3, rel=1e-12)
    assert once.omega_bar == pytest.approx(b.omega_bar * (z1 * z2) ** 2, rel=1e-12)


def test_ordering_and_monochromaticity():
    b = massive()
    assert b.monochromaticity == pytest.approx(0.01)
    o = b.ordering()
    assert o["l_disp/l_coh"] == pytest.approx(50.0)
    assert o["l_coh/wavelength"] == pytest.approx(10 / (0.2 * math.pi))
    assert not is_monochromatic(massive(dk=20.0))


def test_zeta_from_drop():
    z = zeta_from_drop(mass=2.0, g_grav=9.8, drop=0.5, omega_bar=3.0)
    assert z == pytest.approx(math.sqrt((3.0 + 9.8) / 3.0))
