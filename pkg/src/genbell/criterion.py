"""Violation criteria computed directly from the correlation tensor.

``max_tmod`` is the necessary and sufficient test: the general inequality
can be violated by some choice of settings iff the largest value of

    sum_{x in {1,2}^N} c^1_x1 ... c^N_xN |T'_x1..xN|

over local frames (T' is T in the rotated frames) and unit 2-vectors c^j
exceeds 1. ``sum_squares_max`` is the Cauchy-Schwarz upper bound, which is
only a sufficient test for local describability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from genbell import kernels
from genbell.corrtensor import (
    CorrelationTensor,
    LocalFrame,
    MeasurementSettings,
    correlation_table,
)
from genbell.optimizer import BlockObjective, OptimizeOptions, multistart_maximize

UNIT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CVector:
    """Unit 2-vectors ``c[j] = (c^j_1, c^j_2)``, one per observer."""

    c: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        if c.ndim != 2 or c.shape[1] != 2:
            raise ValueError("c-vectors must have shape (n, 2)")
        if np.abs(np.linalg.norm(c, axis=1) - 1).max() > UNIT_TOL:
            raise ValueError("c-vectors must have unit length")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @classmethod
    def from_angles(cls, gamma) -> "CVector":
        g = np.asarray(gamma, dtype=float)
        return cls(np.stack([np.cos(g), np.sin(g)], axis=1))

    @property
    def alphas(self) -> np.ndarray:
        """Angles alpha_j with c^j_x = cos(alpha_j + x pi / 2)."""
        return np.arctan2(-self.c[:, 0], -self.c[:, 1])


@dataclass(frozen=True, eq=False)
class ViolationCertificate:
    value: float
    frames: LocalFrame
    c_vectors: CVector
    settings: MeasurementSettings
    converged: bool
    restarts_used: int

    def violated(self, tol: float = 1e-9) -> bool:
        return self.value > 1.0 + tol

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "converged": self.converged,
            "restarts_used": self.restarts_used,
            "frames": self.frames.axes.tolist(),
            "c_vectors": self.c_vectors.c.tolist(),
            "alphas": self.c_vectors.alphas.tolist(),
            "settings": self.settings.to_list(),
        }


def tmod_value(tensor: CorrelationTensor, frame: LocalFrame, c: CVector) -> float:
    """Weighted sum of in-plane component moduli in the given frames.

    Signed c-vectors are allowed, so the result can be negative.
    """
    n = tensor.n_qubits
    if frame.n_qubits != n or c.c.shape[0] != n:
        raise ValueError("frame / c-vectors do not match the tensor")
    return float(kernels.tmod(tensor.entries, n, frame.axes[:, :2, :], c.c))


def settings_from_certificate(frame: LocalFrame, c: CVector) -> MeasurementSettings:
    """Settings with n_1 + n_2 = 2 c_1 a_1 and n_2 - n_1 = 2 c_2 a_2 per observer."""
    a1 = frame.axes[:, 0, :]
    a2 = frame.axes[:, 1, :]
    c1 = c.c[:, :1]
    c2 = c.c[:, 1:]
    n1 = c1 * a1 - c2 * a2
    n2 = c1 * a1 + c2 * a2
    return MeasurementSettings(np.stack([n1, n2], axis=1))


def _certificate(tensor, frame, c, converged, restarts) -> ViolationCertificate:
    c = CVector(np.abs(c.c))
    value = max(0.0, tmod_value(tensor, frame, c))
    return ViolationCertificate(value, frame, c, settings_from_certificate(frame, c),
                                converged, restarts)


def max_tmod(tensor: CorrelationTensor, opts: OptimizeOptions | None = None) -> ViolationCertificate:
    """Maximize the modulus criterion over local frames and c-vectors.

    Each observer contributes three z-y-z Euler angles and one c angle.
    The certificate carries the maximizer and the measurement settings that
    realize ``2^N * value`` on the general inequality.
    """
    opts = opts or OptimizeOptions()
    n = tensor.n_qubits
    if not np.any(tensor.entries):
        c = CVector(np.tile([1.0, 0.0], (n, 1)))
        return _certificate(tensor, LocalFrame.identity(n), c, True, 0)
    obj = BlockObjective([4] * n, kernels.AngleObjective(tensor.entries, n, "tmod"))
    res = multistart_maximize(obj, opts=opts)
    ang = res.angles.reshape(n, 4)
    frame = LocalFrame.from_euler(ang[:, :3])
    c = CVector.from_angles(ang[:, 3])
    return _certificate(tensor, frame, c, res.best.converged, len(res.restarts))


def _project(arr: np.ndarray, mats: list) -> np.ndarray:
    """Contract axis j of ``arr`` with ``mats[j]`` (shape (m_j, 3)); None keeps the axis."""
    out = arr
    for j, m in enumerate(mats):
        if m is not None:
            out = np.moveaxis(np.tensordot(m, out, axes=([1], [j])), 0, j)
    return out


def sum_squares_in_plane(tensor: CorrelationTensor, planes) -> float:
    """Sum of squared components with every index in its observer's plane."""
    arr = _project(tensor.array, list(np.asarray(planes, dtype=float)))
    return float(np.sum(arr ** 2))


@dataclass(frozen=True)
class SumSquaresResult:
    value: float
    frame: LocalFrame
    converged: bool


def sum_squares_max(tensor: CorrelationTensor, restarts: int = 8, seed: int = 0,
                    tol: float = 1e-12, max_iter: int = 10_000) -> SumSquaresResult:
    """Largest in-plane sum of squares over all local frames.

    Alternates over observers; for fixed planes of the others the best
    plane of observer j spans the top two eigenvectors of the 3x3 matrix
    G_j = sum over the others' in-plane indices of T T^T, so every update
    is exact and the value never decreases.
    """
    n = tensor.n_qubits
    arr = tensor.array
    if not np.any(arr):
        return SumSquaresResult(0.0, LocalFrame.identity(n), True)
    rots = Rotation.random(max(restarts - 1, 0) * n, random_state=seed) if restarts > 1 else None
    best = None
    for r in range(restarts):
        if r == 0:
            planes = [np.eye(3)[:2] for _ in range(n)]
        else:
            mats = rots[(r - 1) * n: r * n].as_matrix()
            planes = [m.T[:2] for m in mats]
        value = -math.inf
        converged = False
        for _ in range(max_iter):
            prev = value
            for j in range(n):
                others = [p if k != j else None for k, p in enumerate(planes)]
                red = np.moveaxis(_project(arr, others), j, 0).reshape(3, -1)
                g = red @ red.T
                w, v = np.linalg.eigh(g)
                planes[j] = v[:, [2, 1]].T
                value = float(w[2] + w[1])
            if value - prev < tol:
                converged = True
                break
        if best is None or value > best[0]:
            best = (value, [p.copy() for p in planes], converged)
    frame = LocalFrame.from_planes(_orthonormalize(best[1]))
    return SumSquaresResult(best[0], frame, best[2])


def _orthonormalize(planes):
    out = []
    for p in planes:
        q, _ = np.linalg.qr(np.asarray(p).T)
        out.append(q.T[:2])
    return out


def horodecki_2qubit(tensor: CorrelationTensor) -> float:
    """Sum of the two largest eigenvalues of T^T T for a two-qubit tensor."""
    if tensor.n_qubits != 2:
        raise ValueError("the closed form applies to two qubits only")
    t = tensor.array
    w = np.linalg.eigvalsh(t.T @ t)
    return float(w[2] + w[1])


def werner_threshold(n: int) -> float:
    """Critical GHZ weight 1 / sqrt(2^(N-1)) above which the Werner state violates."""
    if n < 2:
        raise ValueError("need at least 2 qubits")
    return 1.0 / math.sqrt(2.0 ** (n - 1))


def certificate_consistency(tensor: CorrelationTensor, cert: ViolationCertificate) -> float:
    """Difference between the inequality value at the certificate settings and 2^N * value."""
    from genbell.bellcore import zb_lhs

    table = correlation_table(tensor, cert.settings)
    return zb_lhs(table) - 2 ** tensor.n_qubits * cert.value
