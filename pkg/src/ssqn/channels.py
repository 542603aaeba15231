"""Phase-flip, bit-flip and depolarizing channels in Kraus form."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .qcore import I2, SX, SY, SZ, DensityMatrix, apply_local_map, kraus_superop


class ChannelKind(str, enum.Enum):
    PHASE_FLIP = "phase-flip"
    BIT_FLIP = "bit-flip"
    DEPOLARIZING = "depolarizing"
    NOISELESS = "noiseless"


@dataclass(frozen=True)
class NoisyChannel:
    kind: ChannelKind
    p: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ChannelKind(self.kind))
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"channel parameter p must lie in [0, 1], got {self.p}")

    @property
    def is_identity(self) -> bool:
        return self.kind is ChannelKind.NOISELESS or self.p == 1.0

    def axis_factor(self, axis: str) -> float:
        """Contraction of the Bloch component along ``axis`` ('x', 'y' or 'z')."""
        kind, p = self.kind, self.p
        if kind is ChannelKind.NOISELESS:
            return 1.0
        if kind is ChannelKind.DEPOLARIZING:
            return p
        kept = "z" if kind is ChannelKind.PHASE_FLIP else "x"
        return 1.0 if axis == kept else 2 * p - 1


def kraus_set(ch: NoisyChannel) -> list[np.ndarray]:
    p = ch.p
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"channel parameter p must lie in [0, 1], got {p}")
    if ch.kind is ChannelKind.NOISELESS:
        return [I2.copy()]
    if ch.kind is ChannelKind.PHASE_FLIP:
        return [np.sqrt(p) * I2, np.sqrt(1 - p) * SZ]
    if ch.kind is ChannelKind.BIT_FLIP:
        return [np.sqrt(p) * I2, np.sqrt(1 - p) * SX]
    c = np.sqrt(1 - p) / 2
    return [np.sqrt((1 + 3 * p) / 4) * I2, c * SX, c * SY, c * SZ]


def channel_superop(ch: NoisyChannel) -> np.ndarray:
    return kraus_superop(kraus_set(ch))


def apply_channel_qubit(rho: DensityMatrix, ch: NoisyChannel, qubit_index: int) -> DensityMatrix:
    """Send one qubit of ``rho`` through ``ch``; the other qubits are untouched."""
    out = apply_local_map(rho.mat, channel_superop(ch), qubit_index, rho.nqubits)
    return DensityMatrix(out, rho.nqubits)
