"""Exact state-vector core for small labelled qubit registers.

Basis ordering follows the register: for labels ``("A", "B")`` the amplitude
index is ``2*q_A + q_B``, i.e. the first label is the most significant bit.
All values are immutable; every operation returns a new object.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
CANONICAL_THRESHOLD = 1e-9
MAX_QUBITS = 6

_TWO_TO_53 = float(2**53)


@dataclass(frozen=True)
class QubitId:
    label: str
    index: int


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state over an ordered tuple of qubit labels."""

    labels: tuple[str, ...]
    amps: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate qubit labels in {labels}")
        if len(labels) > MAX_QUBITS:
            raise ValueError(f"at most {MAX_QUBITS} qubits supported, got {len(labels)}")
        amps = _frozen(self.amps).reshape(-1)
        if amps.size != 2 ** len(labels):
            raise ValueError(f"expected {2 ** len(labels)} amplitudes, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: sum |amp|^2 = {norm!r}")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def normalized(cls, labels: Sequence[str], amps) -> "StateVector":
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(tuple(labels), amps / norm)

    @property
    def register(self) -> tuple[QubitId, ...]:
        return tuple(QubitId(label, i) for i, label in enumerate(self.labels))

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown qubit label {label!r}; register is {self.labels}") from None

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(self.labels + other.labels, np.kron(self.amps, other.amps))

    def relabel(self, labels: Sequence[str]) -> "StateVector":
        return StateVector(tuple(labels), self.amps)

    def permuted(self, labels: Sequence[str]) -> "StateVector":
        """Same physical state with the register reordered to ``labels``."""
        labels = tuple(labels)
        if sorted(labels) != sorted(self.labels):
            raise ValueError(f"{labels} is not a permutation of {self.labels}")
        n = self.n_qubits
        axes = [self.index_of(lab) for lab in labels]
        psi = self.amps.reshape((2,) * n).transpose(axes)
        return StateVector(labels, psi.reshape(-1))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def __repr__(self):
        terms = []
        n = self.n_qubits
        for i, a in enumerate(self.amps):
            if abs(a) > CANONICAL_THRESHOLD:
                terms.append(f"({a.real:+.4f}{a.imag:+.4f}j)|{i:0{n}b}>")
        return f"StateVector{self.labels}: " + " ".join(terms)


def ket(bits: str, labels: Sequence[str]) -> StateVector:
    """Computational basis state, e.g. ``ket("01", ("A", "B"))`` is |0>_A|1>_B."""
    if len(bits) != len(labels) or set(bits) - {"0", "1"}:
        raise ValueError(f"bit string {bits!r} does not match register {tuple(labels)}")
    amps = np.zeros(2 ** len(bits), dtype=complex)
    amps[int(bits, 2)] = 1.0
    return StateVector(tuple(labels), amps)


def qubit(alpha: complex, beta: complex, label: str) -> StateVector:
    return StateVector((label,), [alpha, beta])


@dataclass(frozen=True, eq=False)
class SingleQubitOp:
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.shape != (2, 2):
            raise ValueError(f"single-qubit operator must be 2x2, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator entries must be finite")
        if not np.allclose(m.conj().T @ m, np.eye(2), rtol=0, atol=NORM_TOL):
            raise ValueError("operator is not unitary")
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other: "SingleQubitOp") -> "SingleQubitOp":
        return SingleQubitOp(self.matrix @ other.matrix)

    def dagger(self) -> "SingleQubitOp":
        return SingleQubitOp(self.matrix.conj().T)

    def allclose(self, other, atol: float = NORM_TOL) -> bool:
        other = other.matrix if isinstance(other, SingleQubitOp) else np.asarray(other)
        return bool(np.allclose(self.matrix, other, rtol=0, atol=atol))


IDENTITY = SingleQubitOp(np.eye(2))


def free_evolution(omega: float, t: float) -> SingleQubitOp:
    """U_t = exp(i t H0) with H0 = diag(0, omega): |1> picks up exp(i omega t)."""
    if not (np.isfinite(omega) and np.isfinite(t)):
        raise ValueError("omega and t must be finite")
    return SingleQubitOp(np.diag([1.0, np.exp(1j * omega * t)]))


def propagator(omega: float, duration: float) -> SingleQubitOp:
    """Schrodinger propagator exp(-i H0 duration) used for physical time evolution.

    This is ``free_evolution(omega, -duration)``; it matches the plane-wave
    phase exp(i k.x) of a qubit at rest and gives the Ramsey state
    cos(wT/2)|0> + i sin(wT/2)|1> up to a global phase.
    """
    return free_evolution(omega, -duration)


def hadamard_clock() -> SingleQubitOp:
    """|0> -> |+>, |1> -> |->."""
    return SingleQubitOp(np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0))


def plus(label: str) -> StateVector:
    return qubit(1 / np.sqrt(2), 1 / np.sqrt(2), label)


def minus(label: str) -> StateVector:
    return qubit(1 / np.sqrt(2), -1 / np.sqrt(2), label)


def apply(op: SingleQubitOp, label: str, s: StateVector) -> StateVector:
    """Apply a single-qubit operator to the named qubit of ``s``."""
    k = s.index_of(label)
    n = s.n_qubits
    psi = s.amps.reshape((2,) * n)
    psi = np.tensordot(op.matrix, psi, axes=([1], [k]))
    psi = np.moveaxis(psi, 0, k)
    return StateVector(s.labels, psi.reshape(-1))


def apply_many(ops: Iterable[tuple[SingleQubitOp, str]], s: StateVector) -> StateVector:
    for op, label in ops:
        s = apply(op, label, s)
    return s


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Orthonormal basis of the subspace spanned by ``labels``."""

    labels: tuple[str, ...]
    vectors: tuple[np.ndarray, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        labels = tuple(self.labels)
        dim = 2 ** len(labels)
        vecs = tuple(_frozen(v).reshape(-1) for v in self.vectors)
        if len(vecs) != dim:
            raise ValueError(f"basis over {labels} needs {dim} vectors, got {len(vecs)}")
        if any(v.size != dim for v in vecs):
            raise ValueError(f"basis vectors must have dimension {dim}")
        gram = np.array([[np.vdot(a, b) for b in vecs] for a in vecs])
        if not np.allclose(gram, np.eye(dim), rtol=0, atol=NORM_TOL):
            raise ValueError("basis vectors are not orthonormal")
        names = tuple(self.names) or tuple(str(i) for i in range(dim))
        if len(names) != dim:
            raise ValueError("one name per basis vector required")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "names", names)

    @classmethod
    def from_states(cls, states: Sequence[StateVector], names: Sequence[str] = ()) -> "MeasurementBasis":
        labels = states[0].labels
        if any(s.labels != labels for s in states):
            raise ValueError("basis states must share one register")
        return cls(labels, tuple(s.amps for s in states), tuple(names))

    def state(self, k: int) -> StateVector:
        return StateVector(self.labels, self.vectors[k])

    def __len__(self):
        return len(self.vectors)


def computational_basis(label: str) -> MeasurementBasis:
    return MeasurementBasis((label,), (np.array([1, 0]), np.array([0, 1])), ("0", "1"))


def clock_basis(label: str) -> MeasurementBasis:
    """The {|+>, |->} basis; outcome 0 is |+>, outcome 1 is |->."""
    return MeasurementBasis.from_states([plus(label), minus(label)], ("+", "-"))


def _split(s: StateVector, labels: tuple[str, ...]) -> tuple[np.ndarray, list[int], list[int]]:
    """Reshape ``s`` into a (2^k, 2^(n-k)) matrix with ``labels`` as rows."""
    measured = [s.index_of(lab) for lab in labels]
    rest = [i for i in range(s.n_qubits) if i not in measured]
    psi = s.amps.reshape((2,) * s.n_qubits).transpose(measured + rest)
    return psi.reshape(2 ** len(measured), -1), measured, rest


def outcome_probabilities(s: StateVector, basis: MeasurementBasis) -> np.ndarray:
    """Born probabilities of each basis outcome, marginalized over the rest."""
    for lab in basis.labels:
        s.index_of(lab)
    mat, _, _ = _split(s, basis.labels)
    coeffs = np.array([v.conj() @ mat for v in basis.vectors])
    return np.sum(np.abs(coeffs) ** 2, axis=1)


def project(s: StateVector, basis: MeasurementBasis, k: int) -> tuple[StateVector, float]:
    """Collapse onto outcome ``k``; returns (renormalized state, probability)."""
    if not 0 <= k < len(basis):
        raise ValueError(f"outcome index {k} out of range for a {len(basis)}-outcome basis")
    mat, measured, rest = _split(s, basis.labels)
    rest_amps = basis.vectors[k].conj() @ mat
    prob = float(np.vdot(rest_amps, rest_amps).real)
    if prob <= 0.0:
        raise ValueError(f"outcome {basis.names[k]!r} has zero probability")
    joint = np.outer(basis.vectors[k], rest_amps / np.sqrt(prob))
    order = measured + rest
    psi = joint.reshape((2,) * s.n_qubits).transpose(np.argsort(order))
    return StateVector(s.labels, psi.reshape(-1)), prob


def next_u64(rng) -> int:
    """One raw 64-bit draw from a numpy Generator or BitGenerator."""
    bitgen = rng.bit_generator if isinstance(rng, np.random.Generator) else rng
    return int(bitgen.random_raw())


def u64_to_unit(draw):
    """Map 64-bit draws to [0, 1) using the top 53 bits."""
    if np.ndim(draw) == 0:
        return (int(draw) >> 11) / _TWO_TO_53
    return (np.asarray(draw, dtype=np.uint64) >> np.uint64(11)).astype(np.float64) / _TWO_TO_53


def sample_outcome(probs: np.ndarray, draw) -> int | np.ndarray:
    """Inverse-CDF sampling; works on one draw or an array of draws."""
    cdf = np.cumsum(probs)
    idx = np.searchsorted(cdf, u64_to_unit(draw), side="right")
    return np.minimum(idx, len(probs) - 1)


def measure(s: StateVector, basis: MeasurementBasis, rng) -> tuple[int, StateVector, float]:
    """Projective measurement driven by the next 64-bit draw of ``rng``."""
    probs = outcome_probabilities(s, basis)
    k = int(sample_outcome(probs, next_u64(rng)))
    collapsed, p = project(s, basis, k)
    return k, collapsed, p


def reduced_pure_state(s: StateVector, label: str, tol: float = 1e-9) -> StateVector:
    """State of one qubit when ``s`` is a product across that qubit."""
    mat, _, _ = _split(s, (label,))
    u, sv, _ = np.linalg.svd(mat)
    if sv.size > 1 and sv[1] > tol:
        raise ValueError(f"qubit {label!r} is entangled with the rest of the register")
    return StateVector.normalized((label,), u[:, 0])


def canonicalize(s: StateVector, threshold: float = CANONICAL_THRESHOLD) -> np.ndarray:
    """Amplitudes rephased so the first one above ``threshold`` is real-positive."""
    amps = np.array(s.amps)
    big = np.nonzero(np.abs(amps) > threshold)[0]
    if big.size:
        a = amps[big[0]]
        amps = amps * (abs(a) / a)
    return amps


def global_phase_distance(a: StateVector, b: StateVector) -> float:
    """min over phi of ||a - exp(i phi) b||."""
    if a.labels != b.labels:
        raise ValueError(f"registers differ: {a.labels} vs {b.labels}")
    overlap = np.vdot(b.amps, a.amps)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(a.amps - phase * b.amps))


def equal_up_to_global_phase(a: StateVector, b: StateVector, tol: float = NORM_TOL) -> bool:
    return global_phase_distance(a, b) <= tol
