"""N-qubit density matrices, the GHZ state and its noisy (Werner) mixtures.

Conventions: computational basis, qubit 1 is the most significant bit of
the basis index, Pauli matrices in the standard X, Y, Z form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_QUBITS = 8

TRACE_TOL = 1e-12
HERMITIAN_TOL = 1e-12
EIGEN_TOL = -1e-9

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])


class InvalidStateError(ValueError):
    """Raised when an operator fails the density-matrix checks."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


def _n_qubits_for(dim: int) -> int:
    if dim < 2 or dim & (dim - 1):
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    n = dim.bit_length() - 1
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
    return n


@dataclass(frozen=True)
class PureState:
    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def density_matrix(self) -> "DensityMatrix":
        return make_pure(self.amplitudes)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Dense 2^N x 2^N operator. Hermiticity is enforced on construction;
    trace and positivity are only checked by :func:`validate`."""

    entries: np.ndarray = field(repr=False)
    n_qubits: int = field(init=False)

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        object.__setattr__(self, "n_qubits", _n_qubits_for(m.shape[0]))
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class ValidationReport:
    hermiticity_deviation: float
    trace_deviation: float
    min_eigenvalue: float
    hermitian_ok: bool
    trace_ok: bool
    positive_ok: bool

    @property
    def ok(self) -> bool:
        return self.hermitian_ok and self.trace_ok and self.positive_ok

    def failures(self) -> list[str]:
        out = []
        if not self.hermitian_ok:
            out.append(f"not Hermitian (deviation {self.hermiticity_deviation:.3e})")
        if not self.trace_ok:
            out.append(f"trace deviates from 1 by {self.trace_deviation:.3e}")
        if not self.positive_ok:
            out.append(f"not positive semidefinite (min eigenvalue {self.min_eigenvalue:.3e})")
        return out


def validate(rho) -> ValidationReport:
    """Report Hermiticity, trace and positivity of ``rho``. Never raises."""
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    herm = float(np.abs(m - m.conj().T).max())
    tr = float(abs(np.trace(m) - 1.0))
    lam = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min())
    return ValidationReport(
        hermiticity_deviation=herm,
        trace_deviation=tr,
        min_eigenvalue=lam,
        hermitian_ok=herm <= HERMITIAN_TOL,
        trace_ok=tr <= TRACE_TOL,
        positive_ok=lam >= EIGEN_TOL,
    )


def require_valid(rho: DensityMatrix) -> DensityMatrix:
    report = validate(rho)
    if not report.ok:
        raise InvalidStateError("invalid density matrix: " + "; ".join(report.failures()), report)
    return rho


def _normalized(amplitudes) -> np.ndarray:
    psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
    _n_qubits_for(psi.shape[0])
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("zero state vector")
    return psi / norm


def make_pure(amplitudes) -> DensityMatrix:
    """Projector onto the (renormalized) state vector ``amplitudes``."""
    psi = _normalized(amplitudes)
    return DensityMatrix(np.outer(psi, psi.conj()))


def make_ghz(n: int) -> PureState:
    if n < 2:
        raise ValueError("GHZ state needs at least 2 qubits")
    _n_qubits_for(2 ** n)
    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    return PureState(n, psi)


def mix_with_noise(rho: DensityMatrix, v: float) -> DensityMatrix:
    """``v * rho + (1 - v) * I / 2^N``."""
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"mixing weight {v} outside [0, 1]")
    noise = np.eye(rho.dim) / rho.dim
    return DensityMatrix(v * rho.entries + (1 - v) * noise)


def werner(n: int, v: float) -> DensityMatrix:
    return mix_with_noise(make_ghz(n).density_matrix(), v)


def bloch_state(vector) -> np.ndarray:
    """Single-qubit ket whose Bloch vector is the unit ``vector``."""
    x, y, z = np.asarray(vector, dtype=float) / np.linalg.norm(vector)
    theta = np.arccos(np.clip(z, -1.0, 1.0))
    phi = np.arctan2(y, x)
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def product_state(bloch_vectors) -> PureState:
    """Pure product state with the given per-qubit Bloch vectors."""
    vecs = np.asarray(bloch_vectors, dtype=float)
    if vecs.ndim != 2 or vecs.shape[1] != 3:
        raise ValueError("expected one 3-component Bloch vector per qubit")
    psi = np.ones(1, dtype=complex)
    for v in vecs:
        psi = np.kron(psi, bloch_state(v))
    return PureState(len(vecs), psi)


def random_pure(n: int, rng: np.random.Generator) -> PureState:
    psi = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return PureState(n, psi / np.linalg.norm(psi))


def random_mixed(n: int, rng: np.random.Generator, components: int = 3) -> DensityMatrix:
    """Random convex mixture of ``components`` random pure states."""
    weights = rng.dirichlet(np.ones(components))
    m = sum(w * make_pure(random_pure(n, rng).amplitudes).entries for w in weights)
    return DensityMatrix(m)


def random_product(n: int, rng: np.random.Generator) -> PureState:
    return product_state(rng.normal(size=(n, 3)))
