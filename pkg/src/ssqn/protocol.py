"""Density-matrix simulation of the measure-and-forward protocol.

The sequential observer's qubit is always the last tensor factor. Observer 1
measures the pristine initial state; between observers ``k`` and ``k+1`` the
averaged Lueders update is followed by one use of the noisy channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .channels import NoisyChannel, channel_superop
from .measurements import Role, Strategy, StrategyTag, observable_for, sqrt_effects_for_sequential
from .qcore import DensityMatrix, StateFamily, apply_local_hadamards, apply_local_map, compose_superops, kron, kraus_superop, make_state

TSIRELSON = 2 * math.sqrt(2)
MERMIN_MAX = 4.0

_FAMILIES_FOR = {
    StrategyTag.MS1: (StateFamily.BELL,),
    StrategyTag.MS2: (StateFamily.BELL,),
    StrategyTag.MS3: (StateFamily.GHZ, StateFamily.GHZ_PRIME),
    StrategyTag.MS4: (StateFamily.GHZ, StateFamily.GHZ_PRIME),
    StrategyTag.MS5: (StateFamily.W, StateFamily.W_PRIME),
    StrategyTag.MS6: (StateFamily.W, StateFamily.W_PRIME),
}

DEFAULT_FAMILY = {tag: fams[0] for tag, fams in _FAMILIES_FOR.items()}


@dataclass(frozen=True)
class Scenario:
    family: StateFamily
    strategy: Strategy
    channel: NoisyChannel
    n_observers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "family", StateFamily(self.family))
        if self.family not in _FAMILIES_FOR[self.strategy.tag]:
            raise ValueError(f"state {self.family.value} cannot be used with {self.strategy.tag.value}")
        if self.n_observers < 1:
            raise ValueError("need at least one sequential observer")
        if len(self.strategy.gammas) < self.n_observers:
            raise ValueError(
                f"{self.n_observers} observers but only {len(self.strategy.gammas)} sharpness values"
            )

    @property
    def nqubits(self) -> int:
        return self.family.nqubits

    @property
    def bound(self) -> float:
        """Quantum maximum of the witness used by this scenario."""
        return TSIRELSON if self.nqubits == 2 else MERMIN_MAX

    def initial_state(self) -> DensityMatrix:
        rho = make_state(self.family)
        # MS4/MS6 act on the rotated state; primed families already are rotated
        if self.strategy.applies_local_unitary and not self.family.is_rotated:
            rho = apply_local_hadamards(rho)
        return rho


@dataclass(frozen=True)
class WitnessTrace:
    values: tuple[float, ...]

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


def _check_arity(rho: DensityMatrix, strategy: Strategy) -> None:
    if rho.nqubits != strategy.nqubits:
        raise ValueError(f"{strategy.tag.value} acts on {strategy.nqubits} qubits, state has {rho.nqubits}")


def luders_superop(strategy: Strategy, observer_k: int) -> np.ndarray:
    roots = sqrt_effects_for_sequential(strategy, observer_k)
    return kraus_superop(roots.values()) / 2


def luders_step(rho: DensityMatrix, strategy: Strategy, observer_k: int) -> DensityMatrix:
    """Post-measurement state of observer k, averaged over both inputs and outcomes."""
    _check_arity(rho, strategy)
    out = apply_local_map(rho.mat, luders_superop(strategy, observer_k), rho.nqubits - 1, rho.nqubits)
    return DensityMatrix(out, rho.nqubits)


def advance(rho: DensityMatrix, scenario: Scenario, observer_k: int) -> DensityMatrix:
    """State held with observer k+1, given the state held with observer k."""
    _check_arity(rho, scenario.strategy)
    step = compose_superops(channel_superop(scenario.channel), luders_superop(scenario.strategy, observer_k))
    out = apply_local_map(rho.mat, step, rho.nqubits - 1, rho.nqubits)
    return DensityMatrix(out, rho.nqubits)


def witness_operator(strategy: Strategy, observer_k: int) -> np.ndarray:
    """CHSH operator (two qubits) or Mermin operator (three qubits)."""
    seq = strategy.tag.sequential_role
    a = [observable_for(strategy, Role.ALICE, None, i) for i in (0, 1)]
    z = [observable_for(strategy, seq, observer_k, i) for i in (0, 1)]
    if strategy.nqubits == 2:
        return kron(a[0], z[0]) + kron(a[1], z[0]) + kron(a[0], z[1]) - kron(a[1], z[1])
    b = [observable_for(strategy, Role.BOB, None, i) for i in (0, 1)]
    return (
        kron(a[1], b[0], z[0])
        + kron(a[0], b[1], z[0])
        + kron(a[0], b[0], z[1])
        - kron(a[1], b[1], z[1])
    )


def witness(rho: DensityMatrix, scenario: Scenario, observer_k: int) -> float:
    _check_arity(rho, scenario.strategy)
    op = witness_operator(scenario.strategy, observer_k)
    return float(np.einsum("ij,ji->", rho.mat, op).real)


def evolve(scenario: Scenario) -> Iterator[DensityMatrix]:
    """Yield the state held jointly with observers 1, 2, ..., n."""
    rho = scenario.initial_state()
    for k in range(1, scenario.n_observers + 1):
        yield rho
        if k < scenario.n_observers:
            rho = advance(rho, scenario, k)


def run_protocol(scenario: Scenario) -> WitnessTrace:
    values = tuple(witness(rho, scenario, k) for k, rho in enumerate(evolve(scenario), start=1))
    return WitnessTrace(values)
