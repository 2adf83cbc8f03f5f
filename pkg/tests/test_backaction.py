import numpy as np
import pytest

from cantomo.backaction import (
    MeasurementStep,
    conditional_update,
    disturbance_report,
    run_sequence,
)
from cantomo.dynamics import classical_field_ground_branch
from cantomo.errors import ImprobableOutcomeError
from cantomo.fockspace import coherent_state, fock_state, thermal_state
from cantomo.tomography import WignerGridSpec, wigner_direct


def test_no_coupling_leaves_state_alone():
    vac = fock_state(16, 0)
    out, prob = conditional_update(vac, "ground", 0.0, 1.0, (100.0, 0.0))
    assert prob == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(out.data, vac.data, atol=1e-12)


def test_zero_time_leaves_state_alone():
    st = coherent_state(24, 0.7)
    out, prob = conditional_update(st, "ground", 830.0, 0.0, (100.0, 0.0))
    assert prob == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(out.data, st.data, atol=1e-12)


def test_excited_outcome_impossible_at_zero_time():
    with pytest.raises(ImprobableOutcomeError):
        conditional_update(fock_state(16, 0), "excited", 830.0, 0.0, (100.0, 0.0))


def test_outcome_probabilities_sum_to_one():
    rng = np.random.default_rng(31)
    for _ in range(4):
        alpha = rng.uniform(-0.8, 0.8) + 1j * rng.uniform(-0.8, 0.8)
        st = coherent_state(40, alpha)
        g_tau = rng.uniform(0.1, 2.0)
        intensity = rng.uniform(50.0, 400.0)
        phi = rng.uniform(0, 2 * np.pi)
        _, p_g = conditional_update(st, "ground", 1.0, g_tau, (intensity, phi))
        _, p_e = conditional_update(st, "excited", 1.0, g_tau, (intensity, phi))
        assert p_g + p_e == pytest.approx(1.0, abs=1e-10)


def test_large_i_map_against_classical_oracle():
    # the displacement-pair map is the I -> infinity limit of the exact
    # classical-drive branch cos(g tau sqrt(B+B)); compare at huge I
    dim, g, tau = 40, 1.0, 1.2
    psi = fock_state(dim, 0)
    intensity = 1e8
    exact = classical_field_ground_branch(psi.data, g, tau, intensity, 0.0)
    exact = exact / np.linalg.norm(exact)
    mapped, _ = conditional_update(psi, "ground", g, tau, (intensity, 0.0))
    assert abs(np.vdot(mapped.data, exact)) ** 2 > 1.0 - 1e-6


def test_excited_branch_against_classical_oracle():
    # the sin branch, checked against the (e, g) block of the full
    # classical-drive propagator built independently with scipy expm
    from scipy.linalg import expm

    from cantomo.dynamics import _classical_drive_operator, sigma_minus, sigma_plus

    dim, g, tau = 40, 1.0, 1.1
    intensity = 1e8
    psi = fock_state(dim, 0)
    b = _classical_drive_operator(dim, intensity, 0.0)
    h = g * (np.kron(sigma_plus(), b) + np.kron(sigma_minus(), b.conj().T))
    u = expm(-1j * h * tau)
    exact = u.reshape(2, dim, 2, dim)[1, :, 0, :] @ psi.data   # <e| U |g>
    exact = exact / np.linalg.norm(exact)
    mapped, _ = conditional_update(psi, "excited", g, tau, (intensity, 0.0))
    assert abs(np.vdot(mapped.data, exact)) ** 2 > 1.0 - 1e-6


def test_run_sequence_sampled_mixed_outcomes():
    g = 830.0
    tau = 1.1 / g
    schedule = [(tau, 400.0, 0.0)] * 6
    log = run_sequence(fock_state(40, 0), 6, schedule, "sample-outcomes", g, seed=1)
    outcomes = {s.outcome for s in log.steps}
    assert outcomes == {"ground", "excited"}
    assert all(p == pytest.approx(1.0, abs=1e-9) for p in log.purities)
    prod = np.prod([s.probability for s in log.steps])
    assert log.joint_probability == pytest.approx(prod, rel=1e-12)


def test_ground_state_components_at_half_mu():
    # ground outcome -> superposition of coherent components at +-mu/2
    dim, g, tau = 48, 1.0, 2.0
    mu = 1j * g * tau
    out, _ = conditional_update(fock_state(dim, 0), "ground", g, tau, (400.0, 0.0))
    plus = coherent_state(dim, mu / 2.0).data
    minus = coherent_state(dim, -mu / 2.0).data
    # the state lies in span{|mu/2>, |-mu/2>}
    gram = np.array([[1.0, np.vdot(plus, minus)], [np.vdot(minus, plus), 1.0]])
    coeffs = np.array([np.vdot(plus, out.data), np.vdot(minus, out.data)])
    weight = np.real(coeffs.conj() @ np.linalg.solve(gram, coeffs))
    assert weight == pytest.approx(1.0, abs=1e-10)


def test_exact_mode_reduced_state():
    dim = 20
    st = fock_state(dim, 0)
    out, prob = conditional_update(st, "ground", 1.0, 0.6, (49.0, 0.3), mode="exact")
    assert not out.is_pure
    assert 0.0 < prob < 1.0
    assert out.purity() <= 1.0 + 1e-12
    out_e, prob_e = conditional_update(st, "excited", 1.0, 0.6, (49.0, 0.3), mode="exact")
    assert prob + prob_e == pytest.approx(1.0, abs=1e-10)


def test_exact_mode_matches_dense_small():
    from cantomo.dynamics import CouplingSet, two_mode_hamiltonian
    from cantomo.fockspace import atom_state, evolve, tensor

    dk, dp = 12, 8
    g, tau, intensity, phi = 0.9, 0.7, 2.0, 0.4
    psi_c = coherent_state(dp, 0.5)
    out, prob = conditional_update(psi_c, "ground", g, tau, (intensity, phi),
                                   mode="exact", dim_photon=dk)
    init = tensor(tensor(atom_state(False), coherent_state(dk, np.sqrt(intensity) * np.exp(1j * phi))), psi_c)
    h2 = two_mode_hamiltonian(CouplingSet.matched(g), dk, dp)
    final = evolve(h2, init, tau).data.reshape(2, dk, dp)
    amp_g = final[0]
    p_dense = float(np.sum(np.abs(amp_g) ** 2))
    rho_dense = np.einsum("kn,km->nm", amp_g, amp_g.conj()) / p_dense
    assert prob == pytest.approx(p_dense, abs=1e-12)
    np.testing.assert_allclose(out.data, rho_dense, atol=1e-12)


def test_rejects_mixed_or_multimode_input():
    with pytest.raises(ValueError):
        conditional_update(thermal_state(8, 0.5), "ground", 1.0, 1.0, (100.0, 0.0))


def test_run_sequence_zero_steps():
    log = run_sequence(fock_state(16, 0), 0, [], "condition-on-ground", 830.0)
    assert len(log.snapshots) == 1
    assert log.steps == []
    assert log.joint_probability == 1.0


def test_run_sequence_schedule_length_checked():
    with pytest.raises(ValueError):
        run_sequence(fock_state(16, 0), 2, [(0.001, 100.0, 0.0)], "condition-on-ground", 830.0)


def test_run_sequence_purity_and_joint_probability():
    g = 830.0
    tau = 1.5 / g
    log = run_sequence(fock_state(48, 0), 3, [(tau, 400.0, 0.0)] * 3,
                       "condition-on-ground", g)
    assert all(p == pytest.approx(1.0, abs=1e-9) for p in log.purities)
    prod = np.prod([s.probability for s in log.steps])
    assert log.joint_probability == pytest.approx(prod, rel=1e-12)
    assert all(s.outcome == "ground" for s in log.steps)


def test_run_sequence_sampling_reproducible():
    g = 830.0
    tau = 1.0 / g
    schedule = [(tau, 400.0, 0.0)] * 4
    log1 = run_sequence(fock_state(32, 0), 4, schedule, "sample-outcomes", g, seed=99)
    log2 = run_sequence(fock_state(32, 0), 4, schedule, "sample-outcomes", g, seed=99)
    assert [s.outcome for s in log1.steps] == [s.outcome for s in log2.steps]
    for a, b in zip(log1.snapshots, log2.snapshots):
        np.testing.assert_array_equal(a.data, b.data)
    with pytest.raises(ValueError):
        run_sequence(fock_state(32, 0), 4, schedule, "sample-outcomes", g)


def test_sequence_support_spreads_along_p():
    # ground-conditioned steps with imaginary mu push the components apart
    g = 830.0
    tau = 1.5 / g
    dim = 48
    log = run_sequence(fock_state(dim, 0), 3, [(tau, 400.0, 0.0)] * 3,
                       "condition-on-ground", g)
    spec = WignerGridSpec(n_mu=48, mu_max=4.5, n_mu_y=96, mu_y_max=10.0,
                          n_x=48, x_max=4.5, n_p=96, p_max=8.0)
    moments = []
    for snap in log.snapshots:
        w = wigner_direct(snap, spec)
        moments.append(w.second_moment_along_p())
        assert w.integral() == pytest.approx(1.0, abs=2e-3)
    assert all(b > a for a, b in zip(moments, moments[1:]))


def test_disturbance_report():
    g = 830.0
    tau = 1.2 / g
    log = run_sequence(fock_state(32, 0), 2, [(tau, 400.0, 0.0)] * 2,
                       "condition-on-ground", g)
    rep = disturbance_report(log)
    assert rep.rows[0].fidelity_initial == pytest.approx(1.0, abs=1e-12)
    assert rep.rows[0].outcome is None
    # fidelity against the initial state equals the direct overlap
    for i, row in enumerate(rep.rows):
        direct = abs(np.vdot(log.snapshots[0].data, log.snapshots[i].data)) ** 2
        assert row.fidelity_initial == pytest.approx(direct, abs=1e-12)
        assert row.purity == pytest.approx(1.0, abs=1e-9)
    text = rep.as_text()
    assert "step" in text and len(text.splitlines()) == len(rep.rows) + 1


def test_measurement_step_validation():
    with pytest.raises(ValueError):
        MeasurementStep("sideways", 0.1, 100.0, 0.0, 0.5)
    with pytest.raises(ValueError):
        MeasurementStep("ground", 0.1, 100.0, 0.0, 0.0)
