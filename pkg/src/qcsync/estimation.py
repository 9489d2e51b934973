"""Phase and offset estimation from population statistics.

Every readout channel used here has the form

    P(outcome 0) = 1/2 + Re(c * exp(i phi))

for a known complex coefficient ``c`` fixed by how the channel was prepared,
where ``phi = -omega*tau + delta`` is the only phase the protocols expose.
Two channels with non-parallel coefficients pin down (cos phi, sin phi).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._phase import TWO_PI, wrap_phase
from .protocols import Bell


class DegenerateQubitError(ValueError):
    """Raised when omega = 0: clock offsets leave no trace in any phase."""


@dataclass(frozen=True)
class FringeSample:
    coefficient: complex
    n0: float
    n1: float
    label: str = ""

    def __post_init__(self):
        if self.n0 < 0 or self.n1 < 0:
            raise ValueError("counts must be non-negative")
        if abs(self.coefficient) > 0.5 + 1e-12:
            raise ValueError("|coefficient| above 1/2 gives probabilities outside [0, 1]")

    @property
    def M(self) -> float:
        return self.n0 + self.n1

    @property
    def p0(self) -> float:
        return self.n0 / self.M

    @classmethod
    def from_preparation(cls, alpha: complex, beta: complex, n0: float, n1: float,
                         conjugate: bool = False, label: str = "") -> "FringeSample":
        """Hadamard readout of alpha|0> + exp(+-i phi) beta|1>.

        ``conjugate`` marks teleportation branches that deliver exp(-i phi).
        """
        c = np.conj(alpha) * beta
        return cls(complex(np.conj(c) if conjugate else c), n0, n1, label)

    @classmethod
    def from_delay(cls, omega: float, T: float, n_anti: float, n_corr: float,
                   label: str = "") -> "FringeSample":
        """Anticorrelation counts of the shared-singlet round at readout delay T."""
        return cls(complex(0.5 * np.exp(-1j * omega * T)), n_anti, n_corr, label)


@dataclass(frozen=True)
class PhaseEstimate:
    phi_hat: float
    stderr: float
    quadratures: tuple[str, ...] = ()


@dataclass(frozen=True)
class OffsetClass:
    """tau is only known up to whole periods: tau in {tau_hat + k * period}."""

    tau_hat: float
    period: float

    def __post_init__(self):
        if not self.period > 0:
            raise ValueError("period must be positive")

    def distance(self, tau: float) -> float:
        """Distance from ``tau`` to the nearest member of the class."""
        return abs(wrap_phase(TWO_PI * (tau - self.tau_hat) / self.period)) * self.period / TWO_PI

    def contains(self, tau: float, tol: float) -> bool:
        return self.distance(tau) <= tol


def ramsey_excited_probability(omega: float, T: float) -> float:
    return float(np.sin(omega * T / 2.0) ** 2)


def estimate_phase(samples: Sequence[FringeSample]) -> PhaseEstimate:
    """Weighted least-squares fit of (cos phi, sin phi) across readout channels."""
    samples = list(samples)
    if len(samples) < 2:
        raise ValueError("need at least two readout channels")
    for s in samples:
        if s.M <= 0:
            raise ValueError(f"sample {s.label or s.coefficient!r} has no counts")
    c = np.array([s.coefficient for s in samples])
    X = np.column_stack([c.real, -c.imag])
    n = np.array([s.M for s in samples], dtype=float)
    y = np.array([s.p0 for s in samples]) - 0.5
    A = X.T @ (n[:, None] * X)
    if np.linalg.cond(A) > 1e8:
        raise ValueError("readout channels are collinear; phase is not identifiable")
    A_inv = np.linalg.inv(A)
    cos_hat, sin_hat = A_inv @ (X.T @ (n * y))
    phi_hat = wrap_phase(np.arctan2(sin_hat, cos_hat))

    # plug-in binomial variance with a half-count floor keeps stderr > 0
    p_var = (np.array([s.n0 for s in samples]) + 0.5) / (n + 1.0)
    var_y = p_var * (1.0 - p_var) / n
    cov = A_inv @ (X.T @ ((n**2 * var_y)[:, None] * X)) @ A_inv
    r2 = cos_hat**2 + sin_hat**2
    grad = np.array([-sin_hat, cos_hat]) / max(r2, 1e-300)
    stderr = float(np.sqrt(grad @ cov @ grad))
    labels = tuple(s.label for s in samples)
    return PhaseEstimate(phi_hat, stderr, labels)


def offset_class_from_phase(est: PhaseEstimate, omega: float,
                            assumed_delta: float = 0.0) -> OffsetClass:
    """Solve phi = -omega*tau + delta for tau given an assumed delta."""
    if omega == 0:
        raise DegenerateQubitError("omega = 0: the clock offset is unobservable; "
                                   "use delta_from_phase to read out the phase error")
    if not omega > 0:
        raise ValueError("omega must be positive")
    period = TWO_PI / omega
    return OffsetClass(wrap_phase(assumed_delta - est.phi_hat) / omega, period)


def delta_from_phase(est: PhaseEstimate, omega: float, assumed_tau: float = 0.0) -> float:
    """Phase error implied by the observable when the offset is taken as known."""
    return wrap_phase(est.phi_hat + omega * assumed_tau)


def _counts(bits: np.ndarray) -> tuple[int, int]:
    n1 = int(np.count_nonzero(bits))
    return bits.size - n1, n1


def teleport_fringe_samples(alpha: complex, beta: complex, bell_q1, bits_q1,
                            bell_q2, bits_q2) -> list[FringeSample]:
    """Group teleportation readouts by quadrature and branch type.

    Quadrature 1 teleports (alpha, beta), quadrature 2 teleports (alpha, i*beta).
    Phi-branches deliver the conjugate phase, which Alice accounts for from
    Bob's announced outcome.
    """
    samples = []
    for name, (a, b), bell, bits in (("q1", (alpha, beta), bell_q1, bits_q1),
                                     ("q2", (alpha, 1j * beta), bell_q2, bits_q2)):
        bell = np.asarray(bell)
        bits = np.asarray(bits)
        phi_branch = bell >= Bell.PHI_PLUS
        for conj, mask in ((False, ~phi_branch), (True, phi_branch)):
            if np.any(mask):
                n0, n1 = _counts(bits[mask])
                tag = f"{name}/{'Phi' if conj else 'Psi'}"
                samples.append(FringeSample.from_preparation(a, b, n0, n1, conj, tag))
    return samples


def qcs_fringe_samples(omega: float, delays, anticorrelated) -> list[FringeSample]:
    """Group shared-singlet rounds by Alice's readout delay."""
    delays = np.asarray(delays, dtype=float)
    anti = np.asarray(anticorrelated, dtype=bool)
    samples = []
    for T in np.unique(delays):
        sel = anti[delays == T]
        n_anti = int(np.count_nonzero(sel))
        samples.append(FringeSample.from_delay(omega, T, n_anti, sel.size - n_anti, f"T={T!r}"))
    return samples


def identifiability_audit(scenario, gauge_shift: float, seed: int | None = None) -> bool:
    """Run ``scenario`` and its gauge image (tau + s, delta + omega*s) with equal seeds.

    Returns True iff the two measurement-record streams are byte-identical.
    """
    from .harness import gauge_shifted, record_bytes, run  # harness depends on this module

    if seed is not None:
        scenario = scenario.with_seed(seed)
    base = record_bytes(run(scenario))
    shifted = record_bytes(run(gauge_shifted(scenario, gauge_shift)))
    return base == shifted
