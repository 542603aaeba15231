"""Small dense complex linear algebra and the initial states used by the protocols.

Matrices are plain ``numpy`` complex128 arrays. Qubit 0 is the leftmost tensor
factor (Alice), qubit 1 is Bob and qubit 2 is Charlie.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import reduce

import numpy as np

ATOL = 1e-12
PSD_SLACK = 1e-10

I2 = np.eye(2, dtype=np.complex128)
SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)

PAULI = {"x": SX, "y": SY, "z": SZ}


def bloch_operator(vec) -> np.ndarray:
    """Return ``r_x X + r_y Y + r_z Z`` for a real 3-vector."""
    rx, ry, rz = vec
    return np.array([[rz, rx - 1j * ry], [rx + 1j * ry, -rz]], dtype=np.complex128)


def _kron2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    (ra, ca), (rb, cb) = a.shape, b.shape
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(ra * rb, ca * cb)


def kron(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices, left to right."""
    if not mats:
        raise ValueError("kron needs at least one matrix")
    return reduce(_kron2, (np.asarray(m, dtype=np.complex128) for m in mats))


def embed_on_qubit(op: np.ndarray, qubit_index: int, nqubits: int) -> np.ndarray:
    """Place a single-qubit operator at ``qubit_index`` with identities elsewhere."""
    op = np.asarray(op, dtype=np.complex128)
    if op.shape != (2, 2):
        raise ValueError(f"expected a 2x2 operator, got shape {op.shape}")
    if not 0 <= qubit_index < nqubits:
        raise IndexError(f"qubit index {qubit_index} out of range for {nqubits} qubits")
    factors = [I2] * nqubits
    factors[qubit_index] = op
    return kron(*factors)


def allclose(a: np.ndarray, b: np.ndarray, atol: float = ATOL) -> bool:
    """Entrywise comparison with an absolute tolerance only."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= atol))


def is_hermitian(m: np.ndarray, atol: float = ATOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and allclose(m, m.conj().T, atol)


def mat_sqrt_psd(m: np.ndarray) -> np.ndarray:
    """Hermitian positive square root of a Hermitian PSD matrix.

    Eigenvalues in ``[-1e-10, 0)`` are treated as numerical zeros; anything more
    negative is rejected.
    """
    m = np.asarray(m, dtype=np.complex128)
    if not is_hermitian(m):
        raise ValueError("matrix is not Hermitian")
    herm = (m + m.conj().T) / 2
    if herm.shape == (2, 2):
        return _sqrt_psd_2x2(herm)
    w, v = np.linalg.eigh(herm)
    if w.min() < -PSD_SLACK:
        raise ValueError(f"matrix has negative eigenvalue {w.min():.3e}")
    root = np.sqrt(np.clip(w, 0.0, None))
    return (v * root) @ v.conj().T


def _sqrt_psd_2x2(m: np.ndarray) -> np.ndarray:
    # m = a I + r.sigma has eigenvalues a +- |r|
    a = m[0, 0].real + m[1, 1].real
    a /= 2
    rz = (m[0, 0].real - m[1, 1].real) / 2
    rx, ry = m[1, 0].real, m[1, 0].imag
    r = np.sqrt(rx * rx + ry * ry + rz * rz)
    hi = a + r
    # det / hi avoids the cancellation in a - r for nearly singular matrices
    det = m[0, 0].real * m[1, 1].real - (rx * rx + ry * ry)
    lo = det / hi if hi > 0 else a - r
    if lo < -PSD_SLACK:
        raise ValueError(f"matrix has negative eigenvalue {lo:.3e}")
    s_hi, s_lo = np.sqrt(hi), np.sqrt(max(lo, 0.0))
    alpha = (s_hi + s_lo) / 2
    if r == 0.0:
        return alpha * I2
    beta = (s_hi - s_lo) / (2 * r)
    return alpha * I2 + beta * (m - a * I2)


class StateFamily(str, enum.Enum):
    BELL = "bell"
    GHZ = "ghz"
    W = "w"
    GHZ_PRIME = "ghz-prime"
    W_PRIME = "w-prime"

    @property
    def nqubits(self) -> int:
        return 2 if self is StateFamily.BELL else 3

    @property
    def is_rotated(self) -> bool:
        """True for the Hadamard-rotated families."""
        return self in (StateFamily.GHZ_PRIME, StateFamily.W_PRIME)


@dataclass(frozen=True)
class DensityMatrix:
    """A 2- or 3-qubit density operator."""

    mat: np.ndarray
    nqubits: int

    def __post_init__(self):
        if self.nqubits not in (2, 3):
            raise ValueError(f"only 2 or 3 qubits are supported, got {self.nqubits}")
        dim = 2**self.nqubits
        if np.shape(self.mat) != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got {np.shape(self.mat)}")

    @classmethod
    def from_ket(cls, ket) -> "DensityMatrix":
        ket = np.asarray(ket, dtype=np.complex128)
        ket = ket / np.linalg.norm(ket)
        n = int(round(np.log2(ket.size)))
        return cls(np.outer(ket, ket.conj()), n)

    @property
    def dim(self) -> int:
        return 2**self.nqubits

    def trace(self) -> complex:
        return complex(np.trace(self.mat))

    def violations(self, atol: float = ATOL, psd_slack: float = PSD_SLACK) -> list[str]:
        """List every broken density-matrix invariant (empty when valid)."""
        problems = []
        if not is_hermitian(self.mat, atol):
            problems.append("not Hermitian")
        if abs(self.trace() - 1) > atol:
            problems.append(f"trace {self.trace().real:.15g} != 1")
        w = np.linalg.eigvalsh((self.mat + self.mat.conj().T) / 2)
        if w.min() < -psd_slack:
            problems.append(f"negative eigenvalue {w.min():.3e}")
        return problems

    def is_valid(self, atol: float = ATOL) -> bool:
        return not self.violations(atol)


_SQRT24 = np.sqrt(24.0)
_KETS = {
    StateFamily.BELL: np.array([1, 0, 0, 1]) / np.sqrt(2),
    StateFamily.GHZ: np.array([1, 0, 0, 0, 0, 0, 0, 1]) / np.sqrt(2),
    StateFamily.W: np.array([0, 1, 1, 0, 1, 0, 0, 0]) / np.sqrt(3),
    StateFamily.GHZ_PRIME: np.array([1, 0, 0, 1, 0, 1, 1, 0]) / 2,
    StateFamily.W_PRIME: np.array([3, 1, 1, -1, 1, -1, -1, -3]) / _SQRT24,
}


def make_state(family: StateFamily | str) -> DensityMatrix:
    """Pure-state projector of the named family in the computational basis."""
    family = StateFamily(family)
    return DensityMatrix.from_ket(_KETS[family])


def apply_local_hadamards(rho: DensityMatrix) -> DensityMatrix:
    """Conjugate a three-qubit state by ``H (x) H (x) H``."""
    if rho.nqubits != 3:
        raise ValueError(f"local Hadamards need a 3-qubit state, got {rho.nqubits}")
    u = kron(HADAMARD, HADAMARD, HADAMARD)
    return DensityMatrix(u @ rho.mat @ u.conj().T, 3)


def apply_local_map(mat: np.ndarray, superop: np.ndarray, qubit_index: int, nqubits: int) -> np.ndarray:
    """Apply a single-qubit linear map to one tensor factor of ``mat``.

    ``superop[i, l, j, k]`` is the coefficient sending ``|j><k|`` to ``|i><l|``.
    """
    if not 0 <= qubit_index < nqubits:
        raise IndexError(f"qubit index {qubit_index} out of range for {nqubits} qubits")
    left = 2**qubit_index
    right = 2 ** (nqubits - qubit_index - 1)
    t = np.asarray(mat).reshape(left, 2, right, left, 2, right)
    out = np.einsum("iljk,ajcbkd->aicbld", superop, t)
    dim = 2**nqubits
    return out.reshape(dim, dim)


def kraus_superop(ops) -> np.ndarray:
    """Superoperator tensor of ``rho -> sum_m K_m rho K_m^dagger`` on one qubit."""
    s = np.zeros((2, 2, 2, 2), dtype=np.complex128)
    for k in ops:
        s += np.einsum("ij,lk->iljk", k, k.conj())
    return s


def compose_superops(after: np.ndarray, before: np.ndarray) -> np.ndarray:
    """Superoperator of ``after(before(rho))``."""
    return np.einsum("ilmn,mnjk->iljk", after, before)
