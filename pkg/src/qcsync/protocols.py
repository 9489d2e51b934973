"""Two-party clock synchronization protocols driven by shared (impure) singlets.

Timeline model: Alice and Bob are comoving and all physics runs in their common
rest frame. Bob's clock reads the frame time ``t``; Alice's reads ``t - tau``,
so that ``t_B = t_A + tau``. Hidden quantities (``tau`` inside the clocks,
``delta`` inside a :class:`SingletHandle`) are only touched by the simulation of
nature; the party functions ``bob_*``/``alice_*`` see local clock readings and
classical messages only.

Physical free evolution over a duration ``dt`` is the Schrodinger propagator
``exp(-i H0 dt)`` (see :func:`qcsync.qstate.propagator`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from . import qstate as qs
from ._phase import TWO_PI
from .qstate import MeasurementBasis, SingleQubitOp, StateVector
from .spacetime import REST, FourVelocity

SQRT2 = np.sqrt(2.0)


class Bell(IntEnum):
    PSI_PLUS = 0
    PSI_MINUS = 1
    PHI_PLUS = 2
    PHI_MINUS = 3

    @property
    def label(self) -> str:
        return BELL_LABELS[self]

    @classmethod
    def parse(cls, text: str) -> "Bell":
        try:
            return cls(BELL_LABELS.index(text))
        except ValueError:
            raise ValueError(f"unknown Bell outcome {text!r}") from None


BELL_LABELS = ("Psi+", "Psi-", "Phi+", "Phi-")
CLOCK_LABELS = ("+", "-")
MESSAGE_ALPHABET = frozenset(BELL_LABELS + CLOCK_LABELS)


class ProtocolError(RuntimeError):
    pass


class NonComovingError(ProtocolError):
    pass


class CausalityError(ProtocolError):
    pass


@dataclass(frozen=True)
class PartyClock:
    """A party's local clock: ``local = frame_time - offset``."""

    name: str
    offset: float = field(default=0.0, repr=False)
    velocity: FourVelocity = REST

    def __post_init__(self):
        if not np.isfinite(self.offset):
            raise ValueError("clock offset must be finite")

    def to_global(self, local_time: float) -> float:
        return local_time + self.offset

    def to_local(self, frame_time: float) -> float:
        return frame_time - self.offset


@dataclass(frozen=True)
class PartyClocks:
    alice: PartyClock
    bob: PartyClock

    @classmethod
    def with_offset(cls, tau: float, velocity: FourVelocity = REST) -> "PartyClocks":
        """Bob is the reference clock; Alice lags so that t_B = t_A + tau."""
        return cls(PartyClock("Alice", tau, velocity), PartyClock("Bob", 0.0, velocity))

    @property
    def comoving(self) -> bool:
        return self.alice.velocity.isclose(self.bob.velocity)

    def require_comoving(self):
        if not self.comoving:
            raise NonComovingError("protocol requires comoving parties (u_A == u_B)")


@dataclass(frozen=True, eq=False)
class SingletHandle:
    """Distributed pair on (A, B) together with its hidden phase error."""

    state: StateVector
    hidden_delta: float = field(repr=False)
    created_at: float | None = field(default=None, repr=False)


@dataclass(frozen=True)
class ClassicalMessage:
    sender: str
    recipient: str
    payload: str
    send_time: float

    def __post_init__(self):
        if self.payload not in MESSAGE_ALPHABET:
            raise ValueError(f"payload {self.payload!r} not in the message alphabet")


@dataclass(frozen=True)
class TeleportSpec:
    """Agreed teleportation parameters; Bob measures when his clock reads 0."""

    alpha: complex
    beta: complex
    omega: float
    t_A: float
    latency: float = 0.0

    MEASUREMENT_TIME = 0.0

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > qs.NORM_TOL:
            raise ValueError(f"|alpha|^2 + |beta|^2 must be 1, got {norm!r}")
        if self.latency < 0:
            raise ValueError("latency must be non-negative")


@dataclass(frozen=True)
class QCSRecord:
    bob_outcome: int
    alice_bit: int
    t_B: float
    t_A: float
    message: ClassicalMessage

    @property
    def anticorrelated(self) -> bool:
        return self.alice_bit != self.bob_outcome


@dataclass(frozen=True)
class TeleportRecord:
    bell_outcome: Bell
    t_B: float
    t_A: float
    message: ClassicalMessage


# -- states ---------------------------------------------------------------


def singlet_state(delta: float, labels=("A", "B")) -> StateVector:
    """(|0>|1> - exp(i delta)|1>|0>)/sqrt(2)."""
    return StateVector(labels, [0.0, 1 / SQRT2, -np.exp(1j * delta) / SQRT2, 0.0])


def make_singlet(delta: float, created_at: float | None = None) -> SingletHandle:
    """Impure singlet; ``created_at=None`` means it was distributed before any use."""
    if not np.isfinite(delta):
        raise ValueError("delta must be finite")
    return SingletHandle(singlet_state(delta), float(delta), created_at)


def clock_basis_coefficients(delta: float) -> tuple[complex, complex]:
    """Weights of (|-+> - |+->) and (|++> - |-->) in the impure singlet."""
    e = np.exp(1j * delta)
    return (1 + e) / (2 * SQRT2), (1 - e) / (2 * SQRT2)


def assemble_clock_basis(c_anti: complex, c_corr: complex, labels=("A", "B")) -> StateVector:
    a, b = labels
    pp = qs.plus(a).tensor(qs.plus(b)).amps
    mm = qs.minus(a).tensor(qs.minus(b)).amps
    mp = qs.minus(a).tensor(qs.plus(b)).amps
    pm = qs.plus(a).tensor(qs.minus(b)).amps
    return StateVector(labels, c_anti * (mp - pm) + c_corr * (pp - mm))


def make_phase_immune_state() -> StateVector:
    """(|0>_A|1>_A'|1>_B|0>_B' - |1>_A|0>_A'|0>_B|1>_B')/sqrt(2)."""
    amps = np.zeros(16, dtype=complex)
    amps[0b0110] = 1 / SQRT2
    amps[0b1001] = -1 / SQRT2
    return StateVector(("A", "A'", "B", "B'"), amps)


def cabrillo_entangle(rng) -> tuple[StateVector, float]:
    """Detection-heralded pair (|01> + exp(i phi)|10>)/sqrt(2) with phi ~ U[0, 2pi)."""
    phi = TWO_PI * qs.u64_to_unit(qs.next_u64(rng))
    state = StateVector(("A", "B"), [0.0, 1 / SQRT2, np.exp(1j * phi) / SQRT2, 0.0])
    return state, phi


def cabrillo_singlet(rng) -> SingletHandle:
    """Heralded pair expressed as an impure singlet with delta = phi + pi."""
    state, phi = cabrillo_entangle(rng)
    return SingletHandle(state, phi + np.pi)


# -- measurement bases and operators ---------------------------------------


def bell_basis_at_reference(labels=("B", "B'")) -> MeasurementBasis:
    s = 1 / SQRT2
    vectors = (
        np.array([0, s, s, 0]),
        np.array([0, s, -s, 0]),
        np.array([s, 0, 0, s]),
        np.array([s, 0, 0, -s]),
    )
    return MeasurementBasis(tuple(labels), vectors, BELL_LABELS)


_PAULI_PART = {
    Bell.PSI_PLUS: np.array([[1, 0], [0, -1]]),
    Bell.PSI_MINUS: np.array([[-1, 0], [0, -1]]),
    Bell.PHI_PLUS: np.array([[0, -1], [1, 0]]),
    Bell.PHI_MINUS: np.array([[0, -1], [-1, 0]]),
}


def correction_operator(outcome, omega: float, t_A: float) -> SingleQubitOp:
    """Alice's outcome-conditioned rotation at her clock time ``t_A``.

    The outcome-specific sign/flip matrix acts after undoing the free
    evolution Alice's qubit accumulated over her own clock interval, i.e.
    ``M = F_outcome @ propagator(omega, t_A)^dagger``. For Psi outcomes this is
    ``+-|0><0| - exp(i omega t_A)|1><1|``; for Phi outcomes
    ``-exp(i omega t_A)|0><1| +- |1><0|``.
    """
    try:
        outcome = Bell(outcome)
    except ValueError:
        raise ValueError(f"invalid Bell outcome index {outcome!r}") from None
    return SingleQubitOp(_PAULI_PART[outcome]) @ qs.propagator(omega, t_A).dagger()


def teleport_closed_form(alpha: complex, beta: complex, omega: float, tau: float,
                         delta: float) -> StateVector:
    """alpha|0> + exp(i(-omega tau + delta)) beta|1> on qubit A."""
    return StateVector(("A",), [alpha, np.exp(1j * (-omega * tau + delta)) * beta])


# -- party logic (local data only) ----------------------------------------


def bob_message(payload: str, t_B: float) -> ClassicalMessage:
    return ClassicalMessage("Bob", "Alice", payload, t_B)


def alice_correction(message: ClassicalMessage, omega: float, t_A: float) -> SingleQubitOp:
    return correction_operator(Bell.parse(message.payload), omega, t_A)


def alice_basic_readout_time(t_B: float, delay: float) -> float:
    """Alice reads her clock state ``delay`` after Bob's reported time, on her own clock."""
    return t_B + delay


# -- simulation of nature -------------------------------------------------


def _propagate(s: StateVector, omega: float, dt: float, labels=None) -> StateVector:
    u = qs.propagator(omega, dt)
    for lab in labels or s.labels:
        s = qs.apply(u, lab, s)
    return s


def _singlet_at(singlet: SingletHandle, omega: float, frame_time: float,
                labels=("A", "B")) -> StateVector:
    if singlet.created_at is None:
        # dark state: evolution before first use only adds a global phase
        return singlet.state
    if frame_time < singlet.created_at:
        raise CausalityError("singlet used before it was created")
    return _propagate(singlet.state, omega, frame_time - singlet.created_at, labels)


def teleport_premeasurement(spec: TeleportSpec, singlet: SingletHandle,
                            clocks: PartyClocks) -> StateVector:
    """Register (A, B, B') right after Bob prepares the ancilla at his clock 0."""
    clocks.require_comoving()
    g0 = clocks.bob.to_global(spec.MEASUREMENT_TIME)
    pair = _singlet_at(singlet, spec.omega, g0)
    return pair.tensor(qs.qubit(spec.alpha, spec.beta, "B'"))


def _teleport_finish(spec, clocks, collapsed: StateVector, outcome: Bell):
    g0 = clocks.bob.to_global(spec.MEASUREMENT_TIME)
    message = bob_message(outcome.label, spec.MEASUREMENT_TIME)
    g_corr = clocks.alice.to_global(spec.t_A)
    if g_corr < g0 + spec.latency:
        raise CausalityError(
            f"Alice corrects at her clock {spec.t_A!r} before Bob's outcome can arrive")
    state = _propagate(collapsed, spec.omega, g_corr - g0)
    state = qs.apply(alice_correction(message, spec.omega, spec.t_A), "A", state)
    output = qs.reduced_pure_state(state, "A")
    return output, TeleportRecord(outcome, spec.MEASUREMENT_TIME, spec.t_A, message)


def run_teleportation_qcs(spec: TeleportSpec, singlet: SingletHandle, clocks: PartyClocks,
                          rng=None, forced_outcome=None) -> tuple[StateVector, TeleportRecord]:
    """Teleport alpha|0> + beta|1> from Bob's ancilla B' to Alice's qubit A.

    Brute-force evolution of the (A, B, B') register along the frame timeline.
    ``forced_outcome`` selects a Bell branch instead of sampling from ``rng``.
    """
    pre = teleport_premeasurement(spec, singlet, clocks)
    basis = bell_basis_at_reference()
    if forced_outcome is not None:
        outcome = Bell(forced_outcome)
        collapsed, _ = qs.project(pre, basis, outcome)
    else:
        if rng is None:
            raise ValueError("rng required unless forced_outcome is given")
        k, collapsed, _ = qs.measure(pre, basis, rng)
        outcome = Bell(k)
    return _teleport_finish(spec, clocks, collapsed, outcome)


def teleport_branches(spec: TeleportSpec, singlet: SingletHandle, clocks: PartyClocks):
    """Outcome probabilities and Alice's corrected output for each Bell branch."""
    pre = teleport_premeasurement(spec, singlet, clocks)
    basis = bell_basis_at_reference()
    probs = qs.outcome_probabilities(pre, basis)
    outputs = []
    for outcome in Bell:
        if probs[outcome] > 0:
            collapsed, _ = qs.project(pre, basis, outcome)
            outputs.append(_teleport_finish(spec, clocks, collapsed, outcome)[0])
        else:
            outputs.append(None)
    return probs, outputs


def ramsey_readout_probabilities(state: StateVector, label: str = "A") -> np.ndarray:
    """Population statistics after a final Hadamard pulse on ``label``."""
    return qs.outcome_probabilities(qs.apply(qs.hadamard_clock(), label, state),
                                    qs.computational_basis(label))


def ramsey_readout(state: StateVector, rng, label: str = "A") -> int:
    probs = ramsey_readout_probabilities(state, label)
    return int(qs.sample_outcome(probs, qs.next_u64(rng)))


def ramsey_state(omega: float, T: float, label: str = "A") -> StateVector:
    """Hadamard, free evolution for T, Hadamard, starting from |0>."""
    h = qs.hadamard_clock()
    s = qs.ket("0", (label,))
    s = qs.apply(h, label, s)
    s = qs.apply(qs.propagator(omega, T), label, s)
    return qs.apply(h, label, s)


def ramsey_excited_probability_sim(omega: float, T: float) -> float:
    return float(qs.outcome_probabilities(ramsey_state(omega, T), qs.computational_basis("A"))[1])


def _basic_qcs_joint(singlet, clocks, omega, t_B, t_A) -> StateVector:
    clocks.require_comoving()
    g_B = clocks.bob.to_global(t_B)
    g_A = clocks.alice.to_global(t_A)
    start = min(g_A, g_B)
    # local operations on A and B commute, so each half is evolved to its own event
    pair = _singlet_at(singlet, omega, start)
    pair = _propagate(pair, omega, g_A - start, ("A",))
    pair = _propagate(pair, omega, g_B - start, ("B",))
    return qs.apply(qs.hadamard_clock(), "A", pair)


def basic_qcs_branches(singlet, clocks, omega, t_B, t_A):
    """P(Bob's clock outcome) and P(Alice's bit | Bob's outcome)."""
    joint = _basic_qcs_joint(singlet, clocks, omega, t_B, t_A)
    bob_basis = qs.clock_basis("B")
    alice_basis = qs.computational_basis("A")
    probs = qs.outcome_probabilities(joint, bob_basis)
    conditional = []
    for k in range(2):
        if probs[k] > 0:
            collapsed, _ = qs.project(joint, bob_basis, k)
            conditional.append(qs.outcome_probabilities(collapsed, alice_basis))
        else:
            conditional.append(None)
    return probs, conditional


def run_basic_qcs(singlet: SingletHandle, clocks: PartyClocks, omega: float, t_B: float,
                  delay: float, rng) -> QCSRecord:
    """Shared-singlet synchronization round.

    Bob measures his half in the clock basis at his time ``t_B`` and reports
    the outcome and timestamp. Alice runs a Ramsey readout (Hadamard pulse,
    population measurement) on her half at her clock time ``t_B + delay``.
    Bob's draw is taken first, then Alice's, whatever the frame ordering.
    """
    t_A = alice_basic_readout_time(t_B, delay)
    joint = _basic_qcs_joint(singlet, clocks, omega, t_B, t_A)
    k, collapsed, _ = qs.measure(joint, qs.clock_basis("B"), rng)
    message = bob_message(CLOCK_LABELS[k], t_B)
    bit, _, _ = qs.measure(collapsed, qs.computational_basis("A"), rng)
    return QCSRecord(k, bit, t_B, t_A, message)
