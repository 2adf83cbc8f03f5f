import numpy as np
import pytest

from cantomo.errors import TruncationError
from cantomo.fockspace import (
    HilbertSpec,
    QuantumState,
    annihilation,
    atom_state,
    cat_state,
    coherent_state,
    creation,
    displacement,
    evolve,
    fock_state,
    identity,
    make_state,
    number_operator,
    partial_trace,
    tensor,
    thermal_state,
)


def test_annihilation_dim2():
    c = annihilation(2).matrix
    np.testing.assert_allclose(c, [[0, 1], [0, 0]], atol=0)


def test_annihilation_entry_sqrt3():
    c = annihilation(4).matrix
    assert c[2, 3] == pytest.approx(np.sqrt(3.0), abs=1e-15)


def test_number_operator_eigenstate():
    n_op = creation(8) @ annihilation(8)
    st = fock_state(8, 5)
    assert st.expectation(n_op) == pytest.approx(5.0, abs=1e-12)
    np.testing.assert_allclose(n_op.matrix, number_operator(8).matrix, atol=1e-14)


def test_annihilation_rejects_small_dim():
    with pytest.raises(ValueError):
        annihilation(1)


def test_fock_ground_state():
    st = make_state(16, "fock(0)")
    assert st.data[0] == 1.0
    assert np.all(st.data[1:] == 0)


def test_fock_index_out_of_range():
    with pytest.raises(ValueError):
        fock_state(8, 8)


def test_coherent_mean_phonon():
    # analytic <c+c> = |alpha|^2, cross-checked by direct expectation value
    st = make_state(32, "coherent(1.0)")
    n_op = number_operator(32)
    direct = st.expectation(n_op).real
    assert direct == pytest.approx(1.0, abs=1e-10)


def test_thermal_zero_temperature_is_vacuum():
    th = thermal_state(16, 0.0)
    vac = fock_state(16, 0)
    np.testing.assert_allclose(th.data, vac.density_matrix(), atol=1e-15)


def test_thermal_mean_occupation():
    # renormalized Bose-Einstein weights: <n> below nbar only by the cut tail
    th = thermal_state(64, 0.5)
    n_mean = th.expectation(number_operator(64)).real
    assert n_mean == pytest.approx(0.5, abs=1e-9)


def test_cat_norm_and_parity():
    cat = cat_state(64, 1.5)
    assert np.linalg.norm(cat.data) == pytest.approx(1.0, abs=1e-14)
    # even cat: odd Fock amplitudes vanish
    assert np.max(np.abs(cat.data[1::2])) < 1e-15


def test_truncation_guard():
    with pytest.raises(TruncationError):
        coherent_state(8, 2.0)   # 4 + 12 > 8
    with pytest.raises(TruncationError):
        displacement(8, 2.0)
    with pytest.raises(TruncationError):
        cat_state(8, 2.0)


def test_make_state_parser_errors():
    with pytest.raises(ValueError):
        make_state(8, "squeezed(1.0)")
    with pytest.raises(ValueError):
        make_state(8, "fock(1, 2)")


def test_displacement_zero_is_identity():
    d = displacement(16, 0.0)
    np.testing.assert_allclose(d.matrix, np.eye(16), atol=1e-14)


def test_displacement_inverse():
    mu = 1.0 + 0.5j
    d1 = displacement(64, mu)
    d2 = displacement(64, -mu)
    np.testing.assert_allclose((d1 @ d2).matrix, np.eye(64), atol=1e-10)


def test_displacement_creates_coherent():
    # analytic coherent-state expansion vs displaced vacuum
    disp = displacement(64, 1.5).matrix @ fock_state(64, 0).data
    coh = coherent_state(64, 1.5).data
    assert abs(np.vdot(coh, disp)) >= 1.0 - 1e-10


def test_displacement_composition_law():
    # D(m1) D(m2) = exp(i Im(m1 m2*)) D(m1 + m2)
    rng = np.random.default_rng(11)
    for _ in range(6):
        m1, m2 = (rng.uniform(-1.4, 1.4, 2) + 1j * rng.uniform(-1.4, 1.4, 2))
        lhs = (displacement(64, m1) @ displacement(64, m2)).matrix
        rhs = np.exp(1j * np.imag(m1 * np.conj(m2))) * displacement(64, m1 + m2).matrix
        # compare on the low part of the space, away from the cutoff edge
        assert np.max(np.abs(lhs[:32, :32] - rhs[:32, :32])) < 1e-8


def test_tensor_identities():
    i6 = tensor(identity(2), identity(3))
    np.testing.assert_allclose(i6.matrix, np.eye(6), atol=0)


def test_tensor_index_ordering():
    # leftmost factor slowest: |1> x |0> lands at flat index 1 * 2 + 0 = 2
    st = tensor(fock_state(2, 1), fock_state(2, 0))
    expected = np.zeros(4)
    expected[2] = 1.0
    np.testing.assert_allclose(st.data, expected, atol=0)


def test_tensor_trace_multiplicative():
    rng = np.random.default_rng(5)
    for _ in range(4):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        a = a + a.conj().T
        b = b + b.conj().T
        spec = HilbertSpec((3,))
        from cantomo.fockspace import ModeOperator

        prod = tensor(ModeOperator(spec, a), ModeOperator(spec, b))
        assert np.trace(prod.matrix) == pytest.approx(np.trace(a) * np.trace(b), rel=1e-12)


def test_tensor_atom_must_come_first():
    with pytest.raises(ValueError):
        tensor(fock_state(2, 0), atom_state())


def test_evolve_zero_time():
    st = coherent_state(32, 1.0)
    h = number_operator(32)
    out = evolve(h, st, 0.0)
    np.testing.assert_allclose(out.data, st.data, atol=1e-14)


def test_evolve_rotates_coherent_state():
    # H = w c+c sends |alpha> to |alpha e^{-iwt}> up to a global phase
    omega, t = 1.0, np.pi / 3.0
    st = coherent_state(64, 1.0)
    out = evolve(omega * number_operator(64), st, t)
    target = coherent_state(64, np.exp(-1j * omega * t))
    assert abs(np.vdot(target.data, out.data)) >= 1.0 - 1e-8


def test_evolve_preserves_purity_of_mixed_state():
    th = thermal_state(24, 0.8)
    before = th.purity()
    out = evolve(number_operator(24), th, 2.7)
    assert out.purity() == pytest.approx(before, abs=1e-10)
    assert np.trace(out.data).real == pytest.approx(1.0, abs=1e-10)


def test_evolve_rejects_non_hermitian():
    from cantomo.fockspace import ModeOperator

    bad = ModeOperator(HilbertSpec((4,)), annihilation(4).matrix)
    with pytest.raises(ValueError):
        evolve(bad, fock_state(4, 0), 1.0)


def test_evolve_rejects_nonfinite_time():
    with pytest.raises(ValueError):
        evolve(number_operator(4), fock_state(4, 0), np.inf)


def test_partial_trace_product_state():
    rho_a = thermal_state(2, 0.4)
    rho_c = coherent_state(6, 0.8)
    joint = tensor(rho_a, rho_c)
    red = partial_trace(joint, 1)
    np.testing.assert_allclose(red.data, rho_c.density_matrix(), atol=1e-12)


def test_partial_trace_bell_state():
    bell = QuantumState(HilbertSpec((2, 2)), np.array([1, 0, 0, 1]) / np.sqrt(2))
    red = partial_trace(bell, 0)
    np.testing.assert_allclose(red.data, np.eye(2) / 2, atol=1e-12)


def test_partial_trace_three_factors():
    rng = np.random.default_rng(3)
    states = []
    for d in (2, 3, 4):
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        states.append(QuantumState(HilbertSpec((d,)), v / np.linalg.norm(v)))
    joint = tensor(tensor(states[0], states[1]), states[2])
    for keep in (0, 1, 2):
        red = partial_trace(joint, keep)
        assert np.trace(red.data).real == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(red.data, states[keep].density_matrix(), atol=1e-12)
    both = partial_trace(joint, (0, 2))
    np.testing.assert_allclose(
        both.data,
        np.kron(states[0].density_matrix(), states[2].density_matrix()),
        atol=1e-12,
    )


def test_partial_trace_invalid_selector():
    joint = tensor(fock_state(2, 0), fock_state(3, 0))
    with pytest.raises(IndexError):
        partial_trace(joint, 2)
    with pytest.raises(IndexError):
        partial_trace(joint, (1, 0))


def test_commutator_truncation_structure():
    # [c, c+] = 1 except the corner entry, which is -(dim - 1)
    for dim in (8, 32):
        c = annihilation(dim)
        comm = (c @ c.dag()).matrix - (c.dag() @ c).matrix
        expected = np.eye(dim)
        expected[-1, -1] = -(dim - 1)
        np.testing.assert_allclose(comm, expected, atol=1e-12)


def test_state_validation():
    spec = HilbertSpec((4,))
    with pytest.raises(ValueError):
        QuantumState(spec, np.array([1.0, 1.0, 0, 0]))          # not normalized
    with pytest.raises(ValueError):
        QuantumState(spec, np.eye(4))                            # trace 4
    bad = np.eye(4) / 4
    bad[0, 1] = 0.2                                              # not Hermitian
    with pytest.raises(ValueError):
        QuantumState(spec, bad)
    neg = np.diag([0.6, 0.5, -0.1, 0.0])                         # negative weight
    with pytest.raises(ValueError):
        QuantumState(spec, neg)


def test_mode_dims_validation():
    with pytest.raises(ValueError):
        HilbertSpec((1,))
