"""Two-outcome POVMs of the six measurement strategies.

Every effect has the form ``(I + r . sigma) / 2``; the tables below store the
Bloch vector ``r`` of the outcome-0 effect for each role and input. Outcome 1
is always the complement ``I - E_0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .qcore import ATOL, I2, bloch_operator


class StrategyTag(str, enum.Enum):
    MS1 = "ms1"
    MS2 = "ms2"
    MS3 = "ms3"
    MS4 = "ms4"
    MS5 = "ms5"
    MS6 = "ms6"

    @property
    def nqubits(self) -> int:
        return 2 if self in (StrategyTag.MS1, StrategyTag.MS2) else 3

    @property
    def sequential_role(self) -> "Role":
        return Role.BOB if self.nqubits == 2 else Role.CHARLIE

    @property
    def theta_is_angle(self) -> bool:
        """False for MS3/MS4, where theta is Bob's sharpness rather than an angle."""
        return self not in (StrategyTag.MS3, StrategyTag.MS4)

    @property
    def theta_bounds(self) -> tuple[float, float, bool]:
        """(low, high, low_inclusive); the upper bound is always inclusive."""
        if self in (StrategyTag.MS1, StrategyTag.MS2):
            return 0.0, math.pi / 4, False
        if self in (StrategyTag.MS3, StrategyTag.MS4):
            return 0.0, 1.0, False
        return 0.0, math.pi / 2, True

    def check_theta(self, theta: float) -> None:
        lo, hi, lo_incl = self.theta_bounds
        ok = (theta >= lo if lo_incl else theta > lo) and theta <= hi + 1e-15
        if not ok:
            raise ValueError(f"theta={theta!r} outside the domain of {self.value}")


class Role(str, enum.Enum):
    ALICE = "alice"
    BOB = "bob"
    CHARLIE = "charlie"


# Axis along which the sequential observer measures sharply (input 0) and weakly (input 1).
SEQUENTIAL_AXES = {
    StrategyTag.MS1: ("z", "x"),
    StrategyTag.MS2: ("x", "z"),
    StrategyTag.MS3: ("x", "y"),
    StrategyTag.MS4: ("z", "y"),
    StrategyTag.MS5: ("z", "x"),
    StrategyTag.MS6: ("x", "z"),
}


def _fixed_vectors(tag: StrategyTag, role: Role, theta: float):
    c, s = math.cos(theta), math.sin(theta)
    if tag is StrategyTag.MS1 and role is Role.ALICE:
        return (s, 0.0, c), (-s, 0.0, c)
    if tag is StrategyTag.MS2 and role is Role.ALICE:
        return (c, 0.0, s), (c, 0.0, -s)
    if tag is StrategyTag.MS3:
        if role is Role.ALICE:
            return (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)
        if role is Role.BOB:
            return (0.0, -theta, 0.0), (theta, 0.0, 0.0)
    if tag is StrategyTag.MS4:
        if role is Role.ALICE:
            return (0.0, 0.0, 1.0), (0.0, -1.0, 0.0)
        if role is Role.BOB:
            return (0.0, theta, 0.0), (0.0, 0.0, theta)
    if tag is StrategyTag.MS5 and role in (Role.ALICE, Role.BOB):
        return (s, 0.0, c), (s, 0.0, -c)
    if tag is StrategyTag.MS6 and role in (Role.ALICE, Role.BOB):
        return (c, 0.0, s), (-c, 0.0, s)
    raise ValueError(f"role {role.value} has no fixed measurement in {tag.value}")


def _sequential_vectors(tag: StrategyTag, gamma: float):
    sharp, weak = SEQUENTIAL_AXES[tag]
    sign = -1.0 if tag is StrategyTag.MS4 else 1.0
    v0 = [0.0, 0.0, 0.0]
    v1 = [0.0, 0.0, 0.0]
    v0["xyz".index(sharp)] = 1.0
    v1["xyz".index(weak)] = sign * gamma
    return tuple(v0), tuple(v1)


@dataclass(frozen=True)
class Strategy:
    """A measurement strategy with its orientation/sharpness ``theta`` and the
    sharpness ``gammas[k-1]`` of the k-th sequential observer."""

    tag: StrategyTag
    theta: float
    gammas: tuple[float, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "tag", StrategyTag(self.tag))
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        self.tag.check_theta(self.theta)
        for g in self.gammas:
            if not 0.0 <= g <= 1.0:
                raise ValueError(f"sharpness {g!r} outside [0, 1]")

    @property
    def applies_local_unitary(self) -> bool:
        return self.tag in (StrategyTag.MS4, StrategyTag.MS6)

    @property
    def nqubits(self) -> int:
        return self.tag.nqubits

    def gamma(self, observer_k: int) -> float:
        if observer_k < 1:
            raise ValueError(f"sequential observers are numbered from 1, got {observer_k}")
        if observer_k > len(self.gammas):
            raise ValueError(f"no sharpness given for observer {observer_k}")
        return self.gammas[observer_k - 1]


def bloch_vector(strategy: Strategy, role: Role | str, observer_k: int | None, input: int):
    role = Role(role)
    if input not in (0, 1):
        raise ValueError(f"input must be 0 or 1, got {input!r}")
    if role is strategy.tag.sequential_role:
        if observer_k is None:
            raise ValueError("the sequential role needs an observer index")
        pair = _sequential_vectors(strategy.tag, strategy.gamma(observer_k))
    else:
        if role is Role.CHARLIE or (role is Role.BOB and strategy.nqubits == 2):
            raise ValueError(f"role {role.value} does not take part in {strategy.tag.value}")
        pair = _fixed_vectors(strategy.tag, role, strategy.theta)
    return pair[input]


def effect_for(strategy: Strategy, role: Role | str, observer_k: int | None, input: int, outcome: int) -> np.ndarray:
    """POVM element for ``outcome`` given ``input``; outcome 1 is ``I - E_0``."""
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome!r}")
    e0 = (I2 + bloch_operator(bloch_vector(strategy, role, observer_k, input))) / 2
    return e0 if outcome == 0 else I2 - e0


def observable_for(strategy: Strategy, role: Role | str, observer_k: int | None, input: int) -> np.ndarray:
    """Dichotomic observable ``E_0 - E_1 = 2 E_0 - I``."""
    return 2 * effect_for(strategy, role, observer_k, input, 0) - I2


def is_valid_effect(m: np.ndarray, atol: float = ATOL) -> bool:
    m = np.asarray(m)
    if not np.allclose(m, m.conj().T, rtol=0, atol=atol):
        return False
    w = np.linalg.eigvalsh((m + m.conj().T) / 2)
    return bool(w.min() >= -atol and w.max() <= 1 + atol)


def sqrt_effect_coefficients(gamma: float) -> tuple[float, float]:
    """(alpha, beta) with sqrt((I + gamma s)/2) = alpha I + beta s for a unit Pauli s."""
    a = math.sqrt(1 + gamma)
    b = math.sqrt(1 - gamma)
    return (a + b) / (2 * math.sqrt(2)), (a - b) / (2 * math.sqrt(2))


def sqrt_effects_for_sequential(strategy: Strategy, observer_k: int) -> dict[tuple[int, int], np.ndarray]:
    """Square roots of the four effects of the k-th sequential observer, keyed by
    ``(outcome, input)``.

    Uses ``sqrt((I +- g s)/2) = alpha I +- beta s`` for a unit Pauli ``s``.
    """
    role = strategy.tag.sequential_role
    roots = {}
    for y in (0, 1):
        vec = np.asarray(bloch_vector(strategy, role, observer_k, y), dtype=float)
        g = float(np.linalg.norm(vec))
        alpha, beta = sqrt_effect_coefficients(g)
        unit = bloch_operator(vec / g) if g > 0 else np.zeros((2, 2), dtype=np.complex128)
        roots[(0, y)] = alpha * I2 + beta * unit
        roots[(1, y)] = alpha * I2 - beta * unit
    return roots
