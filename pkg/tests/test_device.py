import math

import pytest

from cantomo.device import (
    DeviceParams,
    RamanParams,
    coupling_g_ac,
    load_device_file,
    magnetic_gradient,
    match_couplings,
    raman_coupling,
    reference_device,
    reference_raman,
    resonance_report,
    zero_point_amplitude,
)
from cantomo.errors import UnmatchableError, ValidityWarning

# CODATA 2022 values, written out independently of the module's constants
MU_B = 9.2740100657e-24
MU_0 = 1.25663706127e-6
HBAR = 1.054571817e-34


def test_gradient_quartic_scaling():
    g1 = magnetic_gradient(1e-15, 1e-6)
    g2 = magnetic_gradient(1e-15, 2e-6)
    assert g1 / g2 == pytest.approx(16.0, rel=1e-12)


def test_gradient_zero_moment():
    assert magnetic_gradient(0.0, 1e-6) == 0.0


def test_gradient_regression_value():
    # hand evaluation of 3 mu0 mu_c / (4 pi r^4)
    expected = 3.0 * MU_0 * 1e-15 / (4.0 * math.pi * (1e-6) ** 4)
    assert magnetic_gradient(1e-15, 1e-6) == pytest.approx(expected, rel=1e-9)


def test_gradient_invalid_geometry():
    with pytest.raises(ValueError):
        magnetic_gradient(1e-15, 0.0)
    with pytest.raises(ValueError):
        magnetic_gradient(1e-15, -1e-6)


def _device(**overrides):
    base = dict(m_c=1e-18, omega_c=2 * math.pi * 228e6, omega_0=2 * math.pi * 228e6,
                mu_c=1e-14, r=1e-7, g_F=2.0 / 3.0, m_Fx=0.5)
    base.update(overrides)
    return DeviceParams(**base)


def test_g_ac_vanishes_without_projection():
    assert coupling_g_ac(_device(m_Fx=0.0)) == 0.0


def test_g_ac_mass_scaling():
    g1 = coupling_g_ac(_device())
    g4 = coupling_g_ac(_device(m_c=4e-18))
    assert g1 / g4 == pytest.approx(2.0, rel=1e-12)


def test_g_ac_full_si_evaluation():
    # independent hand evaluation of the full coupling formula at the
    # 6Li hyperfine frequency (omega = 2 pi x 228 MHz)
    p = _device()
    grad = 3.0 * MU_0 * p.mu_c / (4.0 * math.pi * p.r**4)
    x_zp = math.sqrt(HBAR / (2.0 * p.omega_c * p.m_c))
    expected = MU_B * p.g_F * p.m_Fx * grad * x_zp / HBAR
    assert coupling_g_ac(p) == pytest.approx(expected, rel=1e-8)
    # magnitude sits in the kHz band for the reference geometry
    assert 1e4 < coupling_g_ac(p) < 1e7


def test_g_ac_linearity():
    base = coupling_g_ac(_device())
    assert coupling_g_ac(_device(g_F=4.0 / 3.0)) == pytest.approx(2 * base, rel=1e-12)
    assert coupling_g_ac(_device(m_Fx=1.5)) == pytest.approx(3 * base, rel=1e-12)
    assert coupling_g_ac(_device(mu_c=5e-14)) == pytest.approx(5 * base, rel=1e-12)


def test_raman_coupling_values():
    assert raman_coupling(RamanParams(0.0, 1e6, 1e9)) == 0.0
    r1 = raman_coupling(RamanParams(1e6, 1e6, 1e9))
    r2 = raman_coupling(RamanParams(1e6, 1e6, 2e9))
    assert r1 / r2 == pytest.approx(2.0, rel=1e-12)
    # Omega_L = Omega_k = 2 pi x 1 MHz, delta = 2 pi x 1 GHz -> -2 pi x 1 kHz
    val = raman_coupling(RamanParams(2 * math.pi * 1e6, 2 * math.pi * 1e6, 2 * math.pi * 1e9))
    assert val == pytest.approx(-2 * math.pi * 1e3, rel=1e-12)


def test_raman_params_validation():
    with pytest.raises(ValueError):
        RamanParams(1e6, 1e6, 0.0)


def test_match_fixed_point():
    p = _device()
    g = coupling_g_ac(p)
    rp = RamanParams(2 * math.pi * 65e6, 2 * math.pi * 1e6, -2 * math.pi * 2.4e9)
    solved = match_couplings(p, rp, "delta_L")
    rp2 = RamanParams(rp.omega_L_rabi, rp.omega_k_rabi, solved)
    assert raman_coupling(rp2) == pytest.approx(g, rel=1e-12)
    # already-matched input returns the same value
    again = match_couplings(p, rp2, "delta_L")
    assert again == pytest.approx(solved, rel=1e-12)


def test_match_omega_l():
    p = _device()
    rp = RamanParams(1.0, 2 * math.pi * 1e6, -2 * math.pi * 2.4e9)
    solved = match_couplings(p, rp, "omega_L_rabi")
    assert solved > 0
    rp2 = RamanParams(solved, rp.omega_k_rabi, rp.delta_L)
    assert raman_coupling(rp2) == pytest.approx(coupling_g_ac(p), rel=1e-12)


def test_match_r_back_substitution():
    p = _device()
    rp = RamanParams(2 * math.pi * 65e6, 2 * math.pi * 1e6, -2 * math.pi * 2.4e9)
    r_solved = match_couplings(p, rp, "r")
    p2 = _device(r=r_solved)
    assert abs(coupling_g_ac(p2)) == pytest.approx(abs(raman_coupling(rp)), rel=1e-12)


def test_match_unmatchable_sign():
    p = _device()  # g_ac > 0
    rp = RamanParams(2 * math.pi * 65e6, 2 * math.pi * 1e6, +2 * math.pi * 2.4e9)
    with pytest.raises(UnmatchableError):
        match_couplings(p, rp, "omega_L_rabi")  # would need negative drive
    with pytest.raises(UnmatchableError):
        match_couplings(p, rp, "r")             # raman rate negative, g_ac positive
    with pytest.raises(UnmatchableError):
        match_couplings(_device(m_Fx=0.0), rp, "delta_L")


def test_match_unknown_parameter():
    with pytest.raises(ValueError):
        match_couplings(_device(), reference_raman(), "omega_k_rabi")


def test_resonance_exact():
    rep = resonance_report(_device())
    assert rep.detuning == 0.0
    assert not rep.off_resonant


def test_resonance_detuned_example():
    p = _device(omega_0=2 * math.pi * 228.1e6)
    rep = resonance_report(p)
    assert rep.detuning == pytest.approx(-2 * math.pi * 1e5, rel=1e-12)
    # |detuning| / omega_c = 4.4e-4 stays under the 1e-3 reporting threshold
    assert not rep.off_resonant


def test_resonance_boundary_is_flagged():
    omega_c = 2 * math.pi * 228e6
    p = _device(omega_0=omega_c * (1.0 - 1e-3))
    rep = resonance_report(p)
    assert abs(rep.detuning) == pytest.approx(1e-3 * omega_c, rel=1e-12)
    assert rep.off_resonant  # strict: the boundary counts as off-resonant


def test_outputs_finite_over_extreme_ranges():
    p = _device(m_c=1e-30, mu_c=1e-30, r=1e-10)
    assert math.isfinite(coupling_g_ac(p))
    p = _device(m_c=1e10, mu_c=1e10, r=1e10)
    assert math.isfinite(coupling_g_ac(p))


def test_detuning_warning():
    rp = RamanParams(1e6, 1e6, 1e9)
    with pytest.warns(ValidityWarning):
        rp.warn_if_detuning_small(2 * math.pi * 228e6)
    rp_far = RamanParams(1e6, 1e6, 1e11)
    assert not rp_far.warn_if_detuning_small(2 * math.pi * 228e6)


def test_reference_preset_is_nearly_matched():
    d, r = reference_device(), reference_raman()
    g_ac = coupling_g_ac(d)
    g_raman = raman_coupling(r)
    assert abs(g_ac - g_raman) / abs(g_ac) < 0.02
    assert zero_point_amplitude(d) == pytest.approx(
        math.sqrt(HBAR / (2 * d.omega_c * d.m_c)), rel=1e-8)


def test_device_file_round_trip(tmp_path):
    d, r = reference_device(), reference_raman()
    path = tmp_path / "preset.toml"
    path.write_text(
        "[device]\n"
        + "\n".join(f"{k} = {getattr(d, k)!r}" for k in
                    ("m_c", "omega_c", "omega_0", "mu_c", "r", "g_F", "m_Fx"))
        + "\n[raman]\n"
        + "\n".join(f"{k} = {getattr(r, k)!r}" for k in
                    ("omega_L_rabi", "omega_k_rabi", "delta_L"))
        + "\n"
    )
    d2, r2 = load_device_file(path)
    assert d2 == d
    assert r2 == r


def test_device_file_unknown_key(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("[device]\nm_c = 1e-18\nbogus = 3\n[raman]\n"
                    "omega_L_rabi = 1.0\nomega_k_rabi = 1.0\ndelta_L = 1.0\n")
    with pytest.raises(ValueError, match="bogus"):
        load_device_file(path)
