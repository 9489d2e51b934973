"""Flat Minkowski geometry with signature (-, +, +, +) and hbar = c = 1.

Four-vectors are ordered (t, x, y, z). ``a . b = -a_t b_t + a_x b_x + a_y b_y + a_z b_z``,
so a four-velocity at rest gives ``u . x = -t``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._phase import wrap_phase

GEOM_TOL = 1e-9
ETA = np.diag([-1.0, 1.0, 1.0, 1.0])
ETA.setflags(write=False)


@dataclass(frozen=True)
class FourVector:
    t: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite([self.t, self.x, self.y, self.z])):
            raise ValueError("four-vector components must be finite")

    @classmethod
    def of(cls, arr) -> "FourVector":
        t, x, y, z = (float(c) for c in np.asarray(arr, dtype=float).reshape(4))
        return cls(t, x, y, z)

    @property
    def array(self) -> np.ndarray:
        return np.array([self.t, self.x, self.y, self.z])

    @property
    def spatial(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __add__(self, other: "FourVector") -> "FourVector":
        return FourVector.of(self.array + other.array)

    def __sub__(self, other: "FourVector") -> "FourVector":
        return FourVector.of(self.array - other.array)

    def __neg__(self) -> "FourVector":
        return FourVector.of(-self.array)

    def __mul__(self, k: float) -> "FourVector":
        return FourVector.of(k * self.array)

    __rmul__ = __mul__


ORIGIN = FourVector(0.0)


def minkowski_dot(a: FourVector, b: FourVector) -> float:
    return -a.t * b.t + a.x * b.x + a.y * b.y + a.z * b.z


def interval(a: FourVector, b: FourVector) -> float:
    """Squared interval (a-b).(a-b); negative for timelike separation."""
    d = a - b
    return minkowski_dot(d, d)


@dataclass(frozen=True)
class FourVelocity:
    u: FourVector

    def __post_init__(self):
        norm = minkowski_dot(self.u, self.u)
        if abs(norm + 1.0) > GEOM_TOL:
            raise ValueError(f"four-velocity must satisfy u.u = -1, got {norm!r}")
        if self.u.t <= 0:
            raise ValueError("four-velocity must be future directed")

    @classmethod
    def from_velocity(cls, v: Sequence[float] = (0.0, 0.0, 0.0)) -> "FourVelocity":
        v = np.asarray(v, dtype=float).reshape(3)
        speed2 = float(v @ v)
        if speed2 >= 1.0:
            raise ValueError(f"speed must be below 1, got {np.sqrt(speed2)!r}")
        gamma = 1.0 / np.sqrt(1.0 - speed2)
        return cls(FourVector(gamma, *(gamma * v)))

    @classmethod
    def rest(cls) -> "FourVelocity":
        return cls(FourVector(1.0))

    @property
    def three_velocity(self) -> np.ndarray:
        return self.u.spatial / self.u.t

    def isclose(self, other: "FourVelocity", tol: float = GEOM_TOL) -> bool:
        return bool(np.allclose(self.u.array, other.u.array, rtol=0, atol=tol))


REST = FourVelocity.rest()


@dataclass(frozen=True)
class WaveVectorPair:
    k0: FourVector
    k1: FourVector
    m0: float
    omega: float


def wave_vectors(u: FourVelocity, m0: float, omega: float) -> WaveVectorPair:
    """Ground and excited wave four-vectors k0 = m0 u, k1 = (m0 + omega) u."""
    if not m0 > 0:
        raise ValueError(f"rest mass must be positive, got {m0!r}")
    if omega < 0:
        raise ValueError(f"energy gap must be non-negative, got {omega!r}")
    return WaveVectorPair(m0 * u.u, (m0 + omega) * u.u, m0, omega)


def plane_wave_phase(k: FourVector, x: FourVector) -> float:
    return minkowski_dot(k, x)


def phi_delta(uA: FourVelocity, uB: FourVelocity, x1: FourVector, x2: FourVector,
              omega: float, delta: float, wrap: bool = False) -> float:
    """Two-point phase omega*(uA.x1 - uB.x2) + delta of the distributed singlet.

    ``x1`` lies on Alice's worldline and ``x2`` on Bob's. The raw value is
    returned unless ``wrap`` asks for the principal branch (-pi, pi].
    """
    phi = omega * (minkowski_dot(uA.u, x1) - minkowski_dot(uB.u, x2)) + delta
    return wrap_phase(phi) if wrap else phi


def is_timelike_separated(x1: FourVector, x2: FourVector) -> bool:
    return interval(x1, x2) < 0


def synchronization_pairs(u: FourVelocity, x1: FourVector, x2: FourVector) -> float:
    """u.(x1 - x2); zero when the events are simultaneous in the comoving frame."""
    return minkowski_dot(u.u, x1 - x2)


def boost_matrix(v: Sequence[float]) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(3)
    speed2 = float(v @ v)
    if speed2 >= 1.0:
        raise ValueError(f"boost speed must be below 1, got {np.sqrt(speed2)!r}")
    lam = np.eye(4)
    if speed2 == 0.0:
        return lam
    gamma = 1.0 / np.sqrt(1.0 - speed2)
    lam[0, 0] = gamma
    lam[0, 1:] = lam[1:, 0] = gamma * v
    lam[1:, 1:] += (gamma - 1.0) * np.outer(v, v) / speed2
    return lam


def rotation_matrix(axis: Sequence[float], angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float).reshape(3)
    axis = axis / np.linalg.norm(axis)
    kx = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    rot = np.eye(3) + np.sin(angle) * kx + (1 - np.cos(angle)) * kx @ kx
    lam = np.eye(4)
    lam[1:, 1:] = rot
    return lam


@dataclass(frozen=True, eq=False)
class LorentzMap:
    """x -> matrix @ x + translation (translation only acts on events)."""

    matrix: np.ndarray
    translation: FourVector = ORIGIN

    def __post_init__(self):
        lam = np.array(self.matrix, dtype=float)
        if lam.shape != (4, 4):
            raise ValueError("Lorentz matrix must be 4x4")
        if not np.allclose(lam.T @ ETA @ lam, ETA, rtol=0, atol=GEOM_TOL):
            raise ValueError("matrix does not preserve the Minkowski metric")
        lam.setflags(write=False)
        object.__setattr__(self, "matrix", lam)

    @classmethod
    def boost_rotation(cls, v: Sequence[float], axis: Sequence[float] = (0, 0, 1),
                       angle: float = 0.0, translation: FourVector = ORIGIN) -> "LorentzMap":
        return cls(boost_matrix(v) @ rotation_matrix(axis, angle), translation)

    @classmethod
    def translation_by(cls, a: FourVector) -> "LorentzMap":
        return cls(np.eye(4), a)

    @classmethod
    def random(cls, rng: np.random.Generator, max_speed: float = 0.99,
               translate: bool = False, scale: float = 10.0) -> "LorentzMap":
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        speed = max_speed * rng.uniform() ** (1 / 3)
        axis = rng.normal(size=3)
        angle = rng.uniform(-np.pi, np.pi)
        a = FourVector.of(rng.uniform(-scale, scale, 4)) if translate else ORIGIN
        return cls.boost_rotation(speed * direction, axis, angle, a)

    def vector(self, k: FourVector) -> FourVector:
        return FourVector.of(self.matrix @ k.array)

    def velocity(self, u: FourVelocity) -> FourVelocity:
        return FourVelocity(self.vector(u.u))

    def event(self, x: FourVector) -> FourVector:
        return FourVector.of(self.matrix @ x.array) + self.translation

    def then(self, other: "LorentzMap") -> "LorentzMap":
        """Apply ``self`` first, then ``other``."""
        return LorentzMap(other.matrix @ self.matrix, other.event(self.translation))


@dataclass(frozen=True)
class Worldline:
    """Piecewise-inertial worldline through ``events``.

    ``velocities[i]`` is the four-velocity of the segment from ``events[i]``
    to ``events[i+1]``; it is derived from the events when not given.
    Null segments carry no four-velocity and are stored as ``None``.
    """

    events: tuple[FourVector, ...]
    velocities: tuple[FourVelocity | None, ...] = ()

    def __post_init__(self):
        events = tuple(self.events)
        if len(events) < 1:
            raise ValueError("a worldline needs at least one event")
        derived = []
        for a, b in zip(events, events[1:]):
            d = b - a
            norm = minkowski_dot(d, d)
            if norm > GEOM_TOL * max(1.0, d.t * d.t):
                raise ValueError(f"spacelike segment from {a} to {b}")
            if d.t < 0:
                raise ValueError(f"segment from {a} to {b} runs backwards in time")
            derived.append(FourVelocity(d * (1.0 / np.sqrt(-norm))) if norm < 0 else None)
        given = tuple(self.velocities)
        if given:
            if len(given) != len(derived):
                raise ValueError("need one velocity per segment")
            for i, (g, d) in enumerate(zip(given, derived)):
                if (g is None) != (d is None) or (g is not None and not g.isclose(d)):
                    raise ValueError(f"segment {i} direction does not match its stated velocity")
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "velocities", tuple(derived))

    @classmethod
    def inertial(cls, start: FourVector, velocity: FourVelocity, proper_duration: float) -> "Worldline":
        return cls((start, start + proper_duration * velocity.u), (velocity,))

    def then(self, velocity: FourVelocity, proper_duration: float) -> "Worldline":
        end = self.events[-1] + proper_duration * velocity.u
        return Worldline(self.events + (end,), self.velocities + (velocity,))

    def transformed(self, lmap: LorentzMap) -> "Worldline":
        return Worldline(tuple(lmap.event(x) for x in self.events))


def proper_time(w: Worldline) -> float:
    total = 0.0
    for a, b in zip(w.events, w.events[1:]):
        d = b - a
        norm = minkowski_dot(d, d)
        if norm > GEOM_TOL * max(1.0, d.t * d.t):
            raise ValueError(f"spacelike segment from {a} to {b}")
        total += np.sqrt(max(-norm, 0.0))
    return float(total)
