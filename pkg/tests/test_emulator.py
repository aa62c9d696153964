import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from dsfsim import emulator
from dsfsim.emulator import (IMAG, REAL, apply_trotter, build_trotter,
                             dump_statevector, hadamard_test,
                             hadamard_test_via_ancilla, load_statevector,
                             program_unitary, sample_outcome)
from dsfsim.pauli import PauliSum, pauli_sum_dense


def random_pauli_sum(n_qubits, n_terms, seed, with_identity=True):
    rng = np.random.default_rng(seed)
    terms = {}
    while len(terms) < n_terms:
        word = "".join(rng.choice(list("IXYZ"), size=n_qubits))
        if set(word) == {"I"}:
            continue
        terms[word] = float(rng.normal(0, 0.4))
    out = [(c, w) for w, c in terms.items()]
    if with_identity:
        out.append((float(rng.normal()), "I" * n_qubits))
    return PauliSum.from_words(out, n_qubits)


def random_state(n_qubits, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    return v / np.linalg.norm(v)


def test_single_term_exact_for_any_k():
    psum = PauliSum.from_words([(0.8, "XZ")], 2)
    exact = scipy.linalg.expm(-1j * 0.8 * 1.3 * pauli_sum_dense(
        PauliSum.from_words([(1.0, "XZ")], 2)))
    for k in (1, 3, 8):
        u = program_unitary(build_trotter(psum, 1.3, k))
        assert np.max(np.abs(u - exact)) < 1e-12


def test_commuting_terms_independent_of_k():
    psum = PauliSum.from_words([(0.5, "ZI"), (-0.7, "IZ")], 2)
    u1 = program_unitary(build_trotter(psum, 0.9, 1))
    u8 = program_unitary(build_trotter(psum, 0.9, 8))
    exact = scipy.linalg.expm(-1j * 0.9 * pauli_sum_dense(psum))
    assert np.max(np.abs(u1 - u8)) < 1e-12
    assert np.max(np.abs(u1 - exact)) < 1e-12


def test_second_order_convergence_slope():
    psum = random_pauli_sum(4, 12, seed=5)
    exact = scipy.linalg.expm(-1j * pauli_sum_dense(psum) * 0.8)
    errs = [np.linalg.norm(program_unitary(build_trotter(psum, 0.8, k)) - exact, 2)
            for k in (1, 2, 4, 8)]
    slope = np.polyfit(np.log([1, 2, 4, 8]), np.log(errs), 1)[0]
    assert slope == pytest.approx(-2.0, abs=0.1)


def test_apply_reps_zero_is_identity():
    psum = random_pauli_sum(3, 6, seed=6)
    prog = build_trotter(psum, 0.5, 2)
    state = random_state(3, 7)
    assert np.array_equal(apply_trotter(state, prog, 0), state)


def test_diagonal_eigenstate_phase():
    psum = PauliSum.from_words([(0.4, "ZI"), (0.3, "IZ"), (0.2, "II")], 2)
    prog = build_trotter(psum, 1.1, 3)
    state = np.zeros(4, dtype=complex)
    state[0b01] = 1.0  # Z eigenvalues: qubit0 -> -1, qubit1 -> +1
    energy = -0.4 + 0.3 + 0.2
    for n in (1, 4):
        evolved = apply_trotter(state, prog, n)
        expected = np.exp(-1j * energy * n * 1.1) * state
        assert np.max(np.abs(evolved - expected)) < 1e-12


def test_apply_matches_dense_exponential_within_budget():
    psum = random_pauli_sum(8, 30, seed=8)
    tau, k, reps = 0.6, 8, 5
    prog = build_trotter(psum, tau, k)
    exact_step = scipy.linalg.expm(-1j * pauli_sum_dense(psum) * tau)
    step_err = np.linalg.norm(program_unitary(prog) - exact_step, 2)
    state = random_state(8, 9)
    evolved = apply_trotter(state, prog, reps)
    reference = np.linalg.matrix_power(exact_step, reps) @ state
    assert np.linalg.norm(evolved - reference) <= reps * step_err + 1e-12


def test_norm_preserved():
    psum = random_pauli_sum(5, 20, seed=10)
    prog = build_trotter(psum, 0.9, 3)
    state = apply_trotter(random_state(5, 11), prog, 7)
    assert abs(np.linalg.norm(state) - 1.0) < 1e-10


def test_program_term_ordering_deterministic():
    psum = PauliSum.from_words([(0.1, "XY"), (0.2, "ZI"), (0.3, "IZ"),
                                (0.4, "YX"), (0.5, "ZZ")], 2)
    prog = build_trotter(psum, 1.0, 1)
    from dsfsim.pauli import masks_to_word
    words = [masks_to_word(x, z, 2) for x, z, _ in prog.terms]
    assert words == ["IZ", "ZI", "ZZ", "XY", "YX"]  # diagonal block first


def test_dense_step_equals_statevector_path():
    psum = random_pauli_sum(6, 25, seed=12)
    prog = build_trotter(psum, 0.7, 2)
    state = random_state(6, 13)
    via_matrix = program_unitary(prog) @ state
    via_sweeps = apply_trotter(state, prog, 1)
    assert np.max(np.abs(via_matrix - via_sweeps)) < 1e-12


def test_hadamard_identity_overlap():
    psum = random_pauli_sum(3, 5, seed=14)
    prog = build_trotter(psum, 0.4, 1)
    a = random_state(3, 15)
    assert hadamard_test(a, a, prog, 0, REAL).value == pytest.approx(1.0, abs=1e-12)
    assert hadamard_test(a, a, prog, 0, IMAG).value == pytest.approx(0.0, abs=1e-12)


def test_hadamard_orthogonal_states():
    psum = random_pauli_sum(3, 5, seed=16)
    prog = build_trotter(psum, 0.4, 1)
    a = np.zeros(8, dtype=complex); a[0] = 1.0
    b = np.zeros(8, dtype=complex); b[3] = 1.0
    assert hadamard_test(a, b, prog, 0, REAL).value == 0.0
    assert hadamard_test(a, b, prog, 0, IMAG).value == 0.0


def test_hadamard_matches_eigendecomposition(two_orb):
    import math
    from dsfsim import spectrum as sp
    from dsfsim.oracle import exact_greens
    tau = math.pi / 2.2
    prog = build_trotter(two_orb.shifted, tau, 64)
    step_err = np.linalg.norm(
        program_unitary(prog)
        - scipy.linalg.expm(-1j * pauli_sum_dense(two_orb.shifted) * tau), 2)
    a = two_orb.states.vectors["x"]
    b = two_orb.states.vectors["y"]
    norms = two_orb.states.norm_product("xy")
    for n in (1, 3):
        got = (hadamard_test(a, b, prog, n, REAL).value
               + 1j * hadamard_test(a, b, prog, n, IMAG).value) * norms
        want = exact_greens(two_orb.eig, two_orb.trans, "xy", tau, n)
        assert abs(got - want) <= norms * (n * step_err + 1e-12)


def test_hadamard_rejects_unnormalized():
    psum = random_pauli_sum(2, 3, seed=17)
    prog = build_trotter(psum, 0.4, 1)
    bad = np.ones(4, dtype=complex)
    good = random_state(2, 18)
    with pytest.raises(ValueError, match="normalized"):
        hadamard_test(bad, good, prog, 1, REAL)


def test_ancilla_circuit_equivalence():
    """The explicit (n+1)-qubit register reproduces the two-branch statistics."""
    psum = random_pauli_sum(4, 10, seed=19)
    prog = build_trotter(psum, 0.8, 2)
    a, b = random_state(4, 20), random_state(4, 21)
    for which in (REAL, IMAG):
        for reps in (0, 1, 3):
            two_branch = hadamard_test(a, b, prog, reps, which).value
            ancilla = hadamard_test_via_ancilla(a, b, prog, reps, which)
            assert two_branch == pytest.approx(ancilla, abs=1e-12)


def test_global_phase_affects_hadamard():
    """Identity terms must reach the measurement record as phases."""
    base = PauliSum.from_words([(0.5, "ZI")], 2)
    shifted = base.shifted_identity(0.9)
    a = random_state(2, 22)
    v0 = hadamard_test(a, a, build_trotter(base, 1.0, 1), 1, REAL).value
    v1 = hadamard_test(a, a, build_trotter(shifted, 1.0, 1), 1, REAL).value
    assert abs(v0 - v1) > 0.1  # phase 0.9 rad must show up


def test_sample_degenerate():
    assert sample_outcome(1.0, 5, seed=0) == 1.0
    assert sample_outcome(-1.0, 5, seed=0) == -1.0


def test_sample_binomial_concentration():
    est = sample_outcome(0.0, 10**6, seed=123)
    assert abs(est) < 4e-3  # 4 sigma of 1/sqrt(N)


@given(st.integers(min_value=0, max_value=2**32 - 1),
       st.floats(min_value=-1.0, max_value=1.0),
       st.integers(min_value=1, max_value=10**4))
@settings(max_examples=30)
def test_sample_deterministic(seed, value, shots):
    assert sample_outcome(value, shots, seed) == sample_outcome(value, shots, seed)


def test_sample_rejects_zero_shots():
    with pytest.raises(ValueError, match="shots"):
        sample_outcome(0.5, 0, seed=1)


def test_trotter_negative_tau_is_inverse():
    psum = random_pauli_sum(4, 12, seed=23)
    fwd = program_unitary(build_trotter(psum, 0.6, 3))
    bwd = program_unitary(build_trotter(psum, -0.6, 3))
    assert np.max(np.abs(bwd - fwd.conj().T)) < 1e-12


def test_build_rejects_bad_arguments():
    psum = random_pauli_sum(2, 3, seed=24)
    with pytest.raises(ValueError):
        build_trotter(psum, 0.5, 0)
    with pytest.raises(ValueError):
        build_trotter(psum, 0.0, 2)


def test_statevector_dump_round_trip(tmp_path):
    state = random_state(4, 25)
    path = tmp_path / "state.bin"
    dump_statevector(state, path)
    assert np.array_equal(load_statevector(path), state)
