"""Closed-form CHSH/Mermin values and the sharpness sequences built from them.

Every witness here is affine in the current observer's sharpness::

    I_k = A * s**(k-1) * H_k  +  B * (w/2)**(k-1) * gamma_k

with ``H_k = prod_{j<k} (1 + sqrt(1 - gamma_j**2)) / 2``, ``A, B`` fixed by the
strategy family and ``s, w`` the channel's contraction of the sequential
observer's sharp and weak measurement axes. The explicit per-family formulas
below are written out term by term; :func:`witness_coefficients` is the
factored form used to invert them for ``gamma_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .channels import ChannelKind, NoisyChannel
from .measurements import SEQUENTIAL_AXES, StrategyTag


class _Infeasible:
    """Marker for a sequence position where no sharpness in [0, 1] works."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Infeasible"

    def __reduce__(self):
        return (_Infeasible, ())


INFEASIBLE = _Infeasible()

# (strategy, channel) pairs under which sharing stays unbounded
IMMUNE = {
    (StrategyTag.MS1, ChannelKind.PHASE_FLIP),
    (StrategyTag.MS2, ChannelKind.BIT_FLIP),
    (StrategyTag.MS3, ChannelKind.BIT_FLIP),
    (StrategyTag.MS4, ChannelKind.PHASE_FLIP),
    (StrategyTag.MS5, ChannelKind.PHASE_FLIP),
    (StrategyTag.MS6, ChannelKind.BIT_FLIP),
}


@dataclass(frozen=True)
class ScenarioClass:
    tag: StrategyTag
    kind: ChannelKind

    def __post_init__(self):
        object.__setattr__(self, "tag", StrategyTag(self.tag))
        object.__setattr__(self, "kind", ChannelKind(self.kind))

    @property
    def is_immune(self) -> bool:
        return self.kind is ChannelKind.NOISELESS or (self.tag, self.kind) in IMMUNE

    @property
    def family(self) -> str:
        if self.tag in (StrategyTag.MS1, StrategyTag.MS2):
            return "chsh"
        if self.tag in (StrategyTag.MS3, StrategyTag.MS4):
            return "ghz"
        return "w"

    @property
    def formula(self) -> str:
        if self.kind is ChannelKind.DEPOLARIZING:
            return "depolarizing"
        return "immune" if self.is_immune else "swapped"

    def __str__(self):
        return f"{self.tag.value}/{self.kind.value}"


def _check_params(cls: ScenarioClass, theta: float, p: float) -> float:
    """Validate and return the effective channel parameter."""
    cls.tag.check_theta(theta)
    if cls.kind is ChannelKind.NOISELESS:
        return 1.0
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p!r} outside [0, 1]")
    if cls.kind in (ChannelKind.PHASE_FLIP, ChannelKind.BIT_FLIP) and p <= 0.5:
        raise ValueError(f"closed forms for {cls.kind.value} hold for p > 1/2, got p={p!r}")
    return p


def _check_gammas(k: int, gammas: Sequence[float]) -> None:
    if k < 1:
        raise ValueError(f"observer index must be >= 1, got {k}")
    if len(gammas) < k:
        raise ValueError(f"need {k} sharpness values, got {len(gammas)}")
    for g in gammas[:k]:
        if not 0.0 <= g <= 1.0:
            raise ValueError(f"sharpness {g!r} outside [0, 1]")


def lueders_product(gammas: Sequence[float], k: int) -> float:
    """``P_k = prod_{j=1}^{k-1} (1 + sqrt(1 - gamma_j**2))``."""
    return math.prod(1 + math.sqrt(1 - g * g) for g in gammas[: k - 1])


def w_sharp_weight(theta: float) -> float:
    """``Q = cos^2 theta + 2 sin^2 theta / 3``."""
    return math.cos(theta) ** 2 + 2 * math.sin(theta) ** 2 / 3


def chsh_closed(cls: ScenarioClass, k: int, theta: float, gammas: Sequence[float], p: float = 1.0) -> float:
    """CHSH value between Alice and the k-th Bob (MS1/MS2)."""
    if cls.family != "chsh":
        raise ValueError(f"{cls} is not a CHSH class")
    p = _check_params(cls, theta, p)
    _check_gammas(k, gammas)
    g, s, c = gammas[k - 1], math.sin(theta), math.cos(theta)
    pk = lueders_product(gammas, k)
    pre = 2.0 ** (2 - k)
    if cls.formula == "immune":
        return pre * (g * s * (2 * p - 1) ** (k - 1) + c * pk)
    if cls.formula == "swapped":
        return pre * (g * s + c * (2 * p - 1) ** (k - 1) * pk)
    return pre * p ** (k - 1) * (g * s + c * pk)


def mermin_ghz_closed(cls: ScenarioClass, k: int, theta: float, gammas: Sequence[float], p: float = 1.0) -> float:
    """Mermin value for Alice, Bob and the k-th Charlie on GHZ (MS3/MS4)."""
    if cls.family != "ghz":
        raise ValueError(f"{cls} is not a GHZ class")
    p = _check_params(cls, theta, p)
    _check_gammas(k, gammas)
    g = gammas[k - 1]
    pk = lueders_product(gammas, k)
    if cls.formula == "immune":
        return 2 * theta * (g * (p - 0.5) ** (k - 1) + 2.0 ** (1 - k) * pk)
    if cls.formula == "swapped":
        return 2 * theta * (p - 0.5) ** (k - 1) * (g + pk)
    return 2 * theta * (p / 2) ** (k - 1) * (g + pk)


def mermin_w_closed(cls: ScenarioClass, k: int, theta: float, gammas: Sequence[float], p: float = 1.0) -> float:
    """Mermin value for Alice, Bob and the k-th Charlie on W (MS5/MS6)."""
    if cls.family != "w":
        raise ValueError(f"{cls} is not a W class")
    p = _check_params(cls, theta, p)
    _check_gammas(k, gammas)
    g = gammas[k - 1]
    pk = lueders_product(gammas, k)
    q = w_sharp_weight(theta)
    cross = 4 * math.sin(theta) * math.cos(theta) / 3
    scale = 2.0 ** (2 - k)
    if cls.formula == "immune":
        return scale * (pk * q + g * (2 * p - 1) ** (k - 1) * cross)
    if cls.formula == "swapped":
        return scale * ((2 * p - 1) ** (k - 1) * pk * q + g * cross)
    return scale * p ** (k - 1) * (pk * q + g * cross)


_CLOSED = {"chsh": chsh_closed, "ghz": mermin_ghz_closed, "w": mermin_w_closed}


def closed_witness(cls: ScenarioClass, k: int, theta: float, gammas: Sequence[float], p: float = 1.0) -> float:
    return _CLOSED[cls.family](cls, k, theta, gammas, p)


def closed_trace(cls: ScenarioClass, theta: float, gammas: Sequence[float], p: float, n: int) -> tuple[float, ...]:
    return tuple(closed_witness(cls, k, theta, gammas, p) for k in range(1, n + 1))


# -- inversion for the sharpness sequence ------------------------------------


def _family_weights(family: str, theta: float) -> tuple[float, float, float]:
    """(log(A/2), A, B) for the family at ``theta``; log(A/2) computed without cancellation."""
    if family == "chsh":
        log_half_a = math.log1p(-2 * math.sin(theta / 2) ** 2)
        return log_half_a, 2 * math.cos(theta), 2 * math.sin(theta)
    if family == "ghz":
        return math.log(theta), 2 * theta, 2 * theta
    s, c = math.sin(theta), math.cos(theta)
    return math.log1p(-(s * s) / 3), 2 * w_sharp_weight(theta), 8 * s * c / 3


def _axis_factors(cls: ScenarioClass, p: float) -> tuple[float, float]:
    ch = NoisyChannel(cls.kind, p)
    sharp, weak = SEQUENTIAL_AXES[cls.tag]
    return ch.axis_factor(sharp), ch.axis_factor(weak)


def witness_coefficients(cls: ScenarioClass, k: int, theta: float, gammas: Sequence[float], p: float = 1.0) -> tuple[float, float]:
    """(offset, slope) with ``I_k = offset + slope * gamma_k``; only gammas[:k-1] are read."""
    p = _check_params(cls, theta, p)
    _, a, b = _family_weights(cls.family, theta)
    s, w = _axis_factors(cls, p)
    h = math.prod((1 + math.sqrt(1 - g * g)) / 2 for g in gammas[: k - 1])
    return a * s ** (k - 1) * h, b * (w / 2) ** (k - 1)


def _deficit(cls: ScenarioClass, k: int, theta: float, gammas: Sequence[float], s: float) -> float:
    """``2 - offset`` evaluated as ``-2 expm1(log(offset / 2))``."""
    log_half_a, _, _ = _family_weights(cls.family, theta)
    if s <= 0.0 and k > 1:
        return 2.0
    log_total = log_half_a + (k - 1) * (math.log(s) if k > 1 else 0.0)
    for g in gammas[: k - 1]:
        d = g * g / (2 * (1 + math.sqrt(1 - g * g)))
        log_total += math.log1p(-d)
    return -2.0 * math.expm1(log_total)


def required_sharpness(cls: ScenarioClass, k: int, theta: float, gammas: Sequence[float], p: float = 1.0) -> float:
    """Sharpness at which observer k's witness equals exactly 2 (``inf`` if the
    slope vanishes)."""
    p = _check_params(cls, theta, p)
    _, _, b = _family_weights(cls.family, theta)
    s, w = _axis_factors(cls, p)
    slope = b * (w / 2) ** (k - 1)
    if slope <= 0.0:
        return math.inf
    return _deficit(cls, k, theta, gammas, s) / slope


@dataclass(frozen=True)
class SharpnessSequence:
    cls: ScenarioClass
    theta: float
    epsilon: float
    p: float
    gammas: tuple

    @property
    def n_feasible(self) -> int:
        """Length of the leading run of finite entries."""
        n = 0
        for g in self.gammas:
            if g is INFEASIBLE:
                break
            n += 1
        return n

    def finite(self) -> list[float]:
        return list(self.gammas[: self.n_feasible])

    def product(self, k: int) -> float:
        """``P_k`` over the finite prefix."""
        if k - 1 > self.n_feasible:
            raise ValueError(f"P_{k} needs {k - 1} finite entries, have {self.n_feasible}")
        return lueders_product(self.gammas, k)

    @property
    def q_weight(self) -> float:
        return w_sharp_weight(self.theta)


def _check_epsilon(epsilon: float) -> None:
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")


def gamma_sequence(cls: ScenarioClass, theta: float, epsilon: float, p: float, n: int) -> SharpnessSequence:
    """Sharpness values putting each observer's witness a factor ``1 + epsilon``
    past the point where it reaches 2; Infeasible from the first value above 1 on."""
    _check_epsilon(epsilon)
    p_eff = _check_params(cls, theta, p)
    if n < 1:
        raise ValueError("n must be >= 1")
    gammas: list = []
    for k in range(1, n + 1):
        if gammas and gammas[-1] is INFEASIBLE:
            gammas.append(INFEASIBLE)
            continue
        g = (1 + epsilon) * required_sharpness(cls, k, theta, gammas, p_eff)
        gammas.append(g if 0.0 <= g <= 1.0 else INFEASIBLE)
    return SharpnessSequence(cls, theta, epsilon, p, tuple(gammas))


def q_sequence(theta: float, epsilon: float, p: float, n: int) -> tuple:
    """Upper-bound sequence dominating the MS1/phase-flip sharpness sequence."""
    _check_epsilon(epsilon)
    _check_params(ScenarioClass(StrategyTag.MS1, ChannelKind.PHASE_FLIP), theta, p)
    qs: list = [(1 + epsilon) * theta]
    for k in range(2, n + 1):
        prev = qs[-1]
        if prev is INFEASIBLE or not 0.0 <= prev <= 1.0:
            qs.append(INFEASIBLE)
            continue
        prod = math.prod(1 - q * q / 2 for q in qs)
        qs.append((1 + epsilon) * 2**k * (1 - (1 - theta**2 / 2) * prod) / (theta * (2 * p - 1) ** (k - 1)))
    return tuple(q if q is INFEASIBLE or q <= 1.0 else INFEASIBLE for q in qs[:n])
