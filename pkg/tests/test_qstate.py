import numpy as np
import pytest

from qcsync import qstate as qs
from qcsync.protocols import singlet_state

from conftest import random_unitary

S2 = 1 / np.sqrt(2)


def test_free_evolution_zero_time_is_identity():
    assert qs.free_evolution(3.7, 0.0).allclose(np.eye(2))


def test_free_evolution_group_property():
    u = qs.free_evolution(1.3, 0.4)
    assert (u @ u).allclose(qs.free_evolution(1.3, 0.8))


def test_free_evolution_quarter_period_phase():
    out = qs.apply(qs.free_evolution(2 * np.pi, 0.25), "A", qs.ket("1", ("A",)))
    np.testing.assert_allclose(out.amps, [0, 1j], atol=1e-15)


def test_propagator_is_reverse_free_evolution():
    assert qs.propagator(0.9, 1.7).allclose(qs.free_evolution(0.9, -1.7))


def test_hadamard_maps_zero_to_plus():
    out = qs.apply(qs.hadamard_clock(), "A", qs.ket("0", ("A",)))
    np.testing.assert_allclose(out.amps, [S2, S2], atol=1e-15)


def test_hadamard_is_involution():
    h = qs.hadamard_clock()
    assert (h @ h).allclose(np.eye(2))


def test_hadamard_maps_minus_to_one():
    out = qs.apply(qs.hadamard_clock(), "A", qs.minus("A"))
    np.testing.assert_allclose(out.amps, [0, 1], atol=1e-15)


def test_apply_identity_leaves_state():
    s = singlet_state(0.3)
    np.testing.assert_array_equal(qs.apply(qs.IDENTITY, "B", s).amps, s.amps)


def test_apply_single_qubit_extension():
    out = qs.apply(qs.hadamard_clock(), "A", qs.ket("00", ("A", "B")))
    np.testing.assert_allclose(out.amps, [S2, 0, S2, 0], atol=1e-15)


def test_apply_matches_kron(rng):
    u = random_unitary(rng)
    s = qs.StateVector.normalized(("A", "B", "C"), rng.normal(size=8) + 1j * rng.normal(size=8))
    out = qs.apply(qs.SingleQubitOp(u), "B", s)
    full = np.kron(np.kron(np.eye(2), u), np.eye(2))
    np.testing.assert_allclose(out.amps, full @ s.amps, atol=1e-14)


def test_commuting_ops_on_distinct_qubits(rng):
    s = qs.StateVector.normalized(("A", "B"), rng.normal(size=4) + 1j * rng.normal(size=4))
    u, v = qs.SingleQubitOp(random_unitary(rng)), qs.SingleQubitOp(random_unitary(rng))
    one = qs.apply(v, "B", qs.apply(u, "A", s))
    two = qs.apply(u, "A", qs.apply(v, "B", s))
    assert np.linalg.norm(one.amps - two.amps) <= 1e-12


def test_apply_unknown_label():
    with pytest.raises(KeyError):
        qs.apply(qs.IDENTITY, "Z", qs.ket("0", ("A",)))


def test_norm_preserved(rng):
    s = singlet_state(1.1)
    for _ in range(20):
        s = qs.apply(qs.SingleQubitOp(random_unitary(rng)), rng.choice(["A", "B"]), s)
        assert abs(s.norm() - 1) < 1e-12


def test_unnormalized_state_rejected():
    with pytest.raises(ValueError):
        qs.StateVector(("A",), [1, 1])


def test_non_unitary_rejected():
    with pytest.raises(ValueError):
        qs.SingleQubitOp([[1, 1], [0, 1]])


def test_measure_computational_zero():
    k, post, p = qs.measure(qs.ket("0", ("A",)), qs.computational_basis("A"), np.random.default_rng(1))
    assert (k, p) == (0, 1.0)


def test_measure_pure_singlet_gives_opposite_clock_states():
    s = singlet_state(0.0)
    for k in (0, 1):
        post, p = qs.project(s, qs.clock_basis("B"), k)
        assert p == pytest.approx(0.5, abs=1e-15)
        alice = qs.reduced_pure_state(post, "A")
        opposite = qs.minus("A") if k == 0 else qs.plus("A")
        assert qs.equal_up_to_global_phase(alice, opposite)


def _anticorrelation_bruteforce(delta):
    """Enumerate all four clock-basis outcome pairs with explicit kron vectors."""
    psi = np.array([0, S2, -np.exp(1j * delta) * S2, 0])
    plus, minus = np.array([S2, S2]), np.array([S2, -S2])
    vecs = {"+": plus, "-": minus}
    probs = {a + b: abs(np.vdot(np.kron(vecs[a], vecs[b]), psi)) ** 2 for a in "+-" for b in "+-"}
    return probs["+-"] + probs["-+"], probs


@pytest.mark.parametrize("delta", [0.0, np.pi / 4, np.pi / 2, 3 * np.pi / 4, np.pi, -2.0])
def test_anticorrelation_probability(delta):
    p_anti, probs = _anticorrelation_bruteforce(delta)
    assert sum(probs.values()) == pytest.approx(1.0, abs=1e-14)
    assert p_anti == pytest.approx(np.cos(delta / 2) ** 2, abs=1e-14)
    s = singlet_state(delta)
    pb = qs.outcome_probabilities(s, qs.clock_basis("B"))
    total = 0.0
    for kb in (0, 1):
        post, _ = qs.project(s, qs.clock_basis("B"), kb)
        pa = qs.outcome_probabilities(post, qs.clock_basis("A"))
        total += pb[kb] * pa[1 - kb]
    assert total == pytest.approx(p_anti, abs=1e-14)


def test_measure_subregister_marginal():
    s = qs.StateVector.normalized(("A", "B", "C"), np.arange(1, 9))
    probs = qs.outcome_probabilities(s, qs.computational_basis("B"))
    amps = np.arange(1, 9).reshape(2, 2, 2) ** 2
    expected = amps.sum(axis=(0, 2)) / amps.sum()
    np.testing.assert_allclose(probs, expected, atol=1e-15)


def test_measure_statistics_match_born():
    s = qs.StateVector.normalized(("A",), [1, 2j])
    rng = np.random.default_rng(5)
    draws = rng.bit_generator.random_raw(100_000)
    outcomes = qs.sample_outcome(qs.outcome_probabilities(s, qs.computational_basis("A")), draws)
    assert abs(np.mean(outcomes == 1) - 0.8) < 5e-3


def test_measure_basis_dimension_mismatch():
    with pytest.raises(ValueError):
        qs.MeasurementBasis(("A", "B"), (np.array([1, 0, 0, 0]),))


def test_scalar_and_vector_sampling_agree(rng):
    probs = np.array([0.1, 0.2, 0.3, 0.4])
    draws = rng.bit_generator.random_raw(1000)
    vec = qs.sample_outcome(probs, draws)
    assert all(int(qs.sample_outcome(probs, int(d))) == v for d, v in zip(draws, vec))


def test_global_phase_equal():
    s = singlet_state(0.4)
    t = qs.StateVector(s.labels, np.exp(1.234j) * s.amps)
    assert qs.equal_up_to_global_phase(s, t)


def test_orthogonal_not_equal():
    assert not qs.equal_up_to_global_phase(qs.ket("0", ("A",)), qs.ket("1", ("A",)))


def test_singlet_clock_form_equivalence():
    clock_form = (qs.minus("A").tensor(qs.plus("B")).amps - qs.plus("A").tensor(qs.minus("B")).amps) * S2
    assert qs.equal_up_to_global_phase(singlet_state(0.0), qs.StateVector(("A", "B"), clock_form))


def test_canonicalize_makes_first_amplitude_positive():
    s = qs.StateVector(("A",), [1j * S2, S2])
    np.testing.assert_allclose(qs.canonicalize(s), [S2, -1j * S2], atol=1e-15)


def test_reduced_pure_state_rejects_entangled():
    with pytest.raises(ValueError):
        qs.reduced_pure_state(singlet_state(0.0), "A")


def test_permuted_roundtrip(rng):
    s = qs.StateVector.normalized(("A", "B", "C"), rng.normal(size=8) + 0j)
    back = s.permuted(("C", "A", "B")).permuted(("A", "B", "C"))
    np.testing.assert_allclose(back.amps, s.amps)


class TestDarkState:
    def test_impure_singlet_dark(self, rng):
        for _ in range(100):
            t, delta, omega = rng.uniform(-10, 10, 3)
            s = singlet_state(delta)
            u = qs.free_evolution(omega, t)
            evolved = qs.apply(u, "B", qs.apply(u, "A", s))
            assert qs.global_phase_distance(evolved, s) <= 1e-12

    def test_pure_singlet_invariant_under_u_tensor_u(self, rng):
        s = singlet_state(0.0)
        for _ in range(100):
            u = qs.SingleQubitOp(random_unitary(rng))
            assert qs.global_phase_distance(qs.apply(u, "B", qs.apply(u, "A", s)), s) <= 1e-12

    @pytest.mark.parametrize("delta", [0.3, np.pi / 2, np.pi, -2.5])
    def test_impure_singlet_not_hadamard_invariant(self, delta):
        s = singlet_state(delta)
        h = qs.hadamard_clock()
        assert not qs.equal_up_to_global_phase(qs.apply(h, "B", qs.apply(h, "A", s)), s, 1e-6)
