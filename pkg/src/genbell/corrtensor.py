"""Correlation tensors of N-qubit states and quantum correlation functions.

The tensor holds T[x1..xN] = Tr[rho sigma_x1 (x) ... (x) sigma_xN] for
x_j in {1, 2, 3}. Storage is a flat array in base-3 order with observer 1
most significant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from genbell import kernels
from genbell.qstate import PAULIS, DensityMatrix, require_valid

UNIT_TOL = 1e-10
ORTHO_TOL = 1e-10
RANGE_TOL = 1e-9
IMAG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CorrelationTensor:
    n_qubits: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.array(self.entries, dtype=float).reshape(-1)
        if e.shape[0] != 3 ** self.n_qubits:
            raise ValueError(f"expected {3 ** self.n_qubits} entries, got {e.shape[0]}")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def array(self) -> np.ndarray:
        """View with one axis of length 3 per observer (0-based indices)."""
        return self.entries.reshape((3,) * self.n_qubits)

    def component(self, *x: int) -> float:
        """Entry at 1-based indices ``x`` (1 = x, 2 = y, 3 = z)."""
        if len(x) != self.n_qubits or any(i not in (1, 2, 3) for i in x):
            raise IndexError(f"bad tensor index {x}")
        return float(self.array[tuple(i - 1 for i in x)])

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.entries))

    def scaled(self, factor: float) -> "CorrelationTensor":
        return CorrelationTensor(self.n_qubits, factor * self.entries)

    def nonzero(self, threshold: float = 1e-10) -> dict[str, float]:
        labels = "xyz"
        out = {}
        for idx in np.flatnonzero(np.abs(self.entries) > threshold):
            digits = np.unravel_index(idx, (3,) * self.n_qubits)
            out["".join(labels[d] for d in digits)] = float(self.entries[idx])
        return out


@dataclass(frozen=True, eq=False)
class LocalFrame:
    """Per-observer orthonormal triads; ``axes[j, k]`` is the unit vector a^j_{k+1}."""

    axes: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.axes, dtype=float)
        if a.ndim != 3 or a.shape[1:] != (3, 3):
            raise ValueError("frame axes must have shape (n, 3, 3)")
        gram = np.einsum("jkx,jlx->jkl", a, a)
        if np.abs(gram - np.eye(3)).max() > ORTHO_TOL:
            raise ValueError("frame triads are not orthonormal")
        a.setflags(write=False)
        object.__setattr__(self, "axes", a)

    @property
    def n_qubits(self) -> int:
        return self.axes.shape[0]

    @classmethod
    def identity(cls, n: int) -> "LocalFrame":
        return cls(np.tile(np.eye(3), (n, 1, 1)))

    @classmethod
    def from_euler(cls, angles) -> "LocalFrame":
        """Build from (phi, theta, psi) z-y-z Euler angles per observer."""
        ang = np.asarray(angles, dtype=float).reshape(-1, 3)
        triads = []
        for phi, theta, psi in ang:
            a12 = kernels.euler_axes(phi, theta, psi)
            triads.append(np.vstack([a12, np.cross(a12[0], a12[1])]))
        return cls(np.array(triads))

    @classmethod
    def from_planes(cls, planes) -> "LocalFrame":
        """Complete orthonormal pairs ``planes[j] = (a1, a2)`` to triads."""
        pl = np.asarray(planes, dtype=float)
        return cls(np.array([np.vstack([p[0], p[1], np.cross(p[0], p[1])]) for p in pl]))


@dataclass(frozen=True, eq=False)
class MeasurementSettings:
    """``directions[j, k]`` is the unit vector of observer j's setting k+1."""

    directions: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = np.array(self.directions, dtype=float)
        if d.ndim != 3 or d.shape[1:] != (2, 3):
            raise ValueError("settings must have shape (n, 2, 3)")
        if np.abs(np.linalg.norm(d, axis=2) - 1).max() > UNIT_TOL:
            raise ValueError("setting directions must be unit vectors")
        d.setflags(write=False)
        object.__setattr__(self, "directions", d)

    @property
    def n_qubits(self) -> int:
        return self.directions.shape[0]

    def to_list(self) -> list:
        return self.directions.tolist()


def compute_tensor(rho: DensityMatrix) -> CorrelationTensor:
    """Correlation tensor of a valid state by successive per-qubit Pauli traces."""
    require_valid(rho)
    n = rho.n_qubits
    # axes: row bits of qubits 1..n, then column bits of qubits 1..n
    cur = rho.entries.reshape((2,) * (2 * n))
    for j in range(n):
        # Tr over qubit j against each Pauli: sum_ab rho[..a..,..b..] sigma[b, a]
        cur = np.tensordot(cur, PAULIS, axes=([0, n - j], [2, 1]))
    # remaining axes are the Pauli indices in qubit order 1..n
    t = cur.reshape(-1)
    if np.abs(t.imag).max(initial=0.0) > IMAG_TOL:
        raise ValueError("correlation tensor has non-negligible imaginary part")
    return CorrelationTensor(n, t.real)


def rotate_frame(tensor: CorrelationTensor, frame: LocalFrame) -> CorrelationTensor:
    """Components of ``tensor`` in the local bases of ``frame``."""
    if frame.n_qubits != tensor.n_qubits:
        raise ValueError("frame and tensor have different numbers of observers")
    return CorrelationTensor(
        tensor.n_qubits, kernels.mode_contract(tensor.entries, tensor.n_qubits, frame.axes)
    )


def _check_units(vectors) -> np.ndarray:
    v = np.asarray(vectors, dtype=float)
    if np.abs(np.linalg.norm(v, axis=-1) - 1).max() > UNIT_TOL:
        raise ValueError("measurement directions must be unit vectors")
    return v


def quantum_correlation(tensor: CorrelationTensor, directions) -> float:
    """Scalar product of the tensor with n_1 (x) ... (x) n_N."""
    d = _check_units(directions)
    if d.shape != (tensor.n_qubits, 3):
        raise ValueError("need one 3-vector per observer")
    return float(kernels.mode_contract(tensor.entries, tensor.n_qubits, d[:, None, :])[0])


def correlation_table(tensor: CorrelationTensor, settings: MeasurementSettings):
    """All 2^N correlation function values E(k1..kN) for the given settings."""
    from genbell.bellcore import CorrelationTable

    if settings.n_qubits != tensor.n_qubits:
        raise ValueError("settings and tensor have different numbers of observers")
    values = kernels.mode_contract(tensor.entries, tensor.n_qubits, settings.directions)
    return CorrelationTable(tensor.n_qubits, values)
