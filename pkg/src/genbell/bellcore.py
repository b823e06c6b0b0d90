"""The general two-setting Bell inequality and its family of sign-function
inequalities, evaluated on correlation tables.

Index conventions: setting k_j = 1, 2 maps to bit 0, 1 and sign s_j = +1, -1
maps to bit 0, 1, observer 1 most significant. With these the factor
s_1^(k_1 - 1) ... s_N^(k_N - 1) is (-1)^popcount(s & k), so the inner sums
of the inequality are the Walsh-Hadamard transform of the table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from genbell import kernels

RANGE_TOL = 1e-9
MAX_ENUMERATION_QUBITS = 4


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    """Values E(k1..kN) in row-major k order, k_j = 1 first."""

    n_qubits: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        e = np.array(self.entries, dtype=float).reshape(-1)
        if e.shape[0] != 2 ** self.n_qubits:
            raise ValueError(f"expected {2 ** self.n_qubits} table entries, got {e.shape[0]}")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def flagged(self) -> bool:
        """True if some entry lies outside [-1, 1] (not a physical correlation)."""
        return bool(np.abs(self.entries).max() > 1 + RANGE_TOL)

    def __getitem__(self, k: Sequence[int]) -> float:
        return float(self.entries[settings_index(k)])

    def walsh(self) -> np.ndarray:
        """Inner sums of the inequality, indexed by the s-bit pattern."""
        return kernels.fwht(self.entries.copy())


def settings_index(k: Sequence[int]) -> int:
    """Flat index of the 1-based setting tuple ``k``."""
    idx = 0
    for kj in k:
        if kj not in (1, 2):
            raise IndexError(f"setting labels must be 1 or 2, got {k}")
        idx = 2 * idx + (kj - 1)
    return idx


def sign_index(s: Sequence[int]) -> int:
    idx = 0
    for sj in s:
        if sj not in (1, -1):
            raise IndexError(f"signs must be +1 or -1, got {s}")
        idx = 2 * idx + (sj == -1)
    return idx


def sign_tuple(idx: int, n: int) -> tuple[int, ...]:
    return tuple(-1 if (idx >> (n - 1 - j)) & 1 else 1 for j in range(n))


@dataclass(frozen=True, eq=False)
class SignFunction:
    """A map {-1, 1}^N -> {-1, 1}, stored by s-bit index."""

    n_qubits: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.int8).reshape(-1)
        if v.shape[0] != 2 ** self.n_qubits:
            raise ValueError(f"expected {2 ** self.n_qubits} values, got {v.shape[0]}")
        if not np.all(np.abs(v) == 1):
            raise ValueError("sign function values must be exactly +1 or -1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __call__(self, *s: int) -> int:
        return int(self.values[sign_index(s)])

    def __eq__(self, other):
        return (isinstance(other, SignFunction) and other.n_qubits == self.n_qubits
                and np.array_equal(other.values, self.values))

    def __hash__(self):
        return hash((self.n_qubits, self.values.tobytes()))

    @classmethod
    def from_callable(cls, n: int, fn: Callable[..., int]) -> "SignFunction":
        return cls(n, [fn(*sign_tuple(i, n)) for i in range(2 ** n)])

    @classmethod
    def constant(cls, n: int, value: int = 1) -> "SignFunction":
        return cls(n, np.full(2 ** n, value))

    def coefficients(self) -> np.ndarray:
        """Integer weights of each E(k) in the inequality's linear combination."""
        return kernels.fwht(self.values.astype(float)).round().astype(np.int64)

    # relabelings that map an inequality of the family onto an equivalent one

    def swap_settings(self, j: int) -> "SignFunction":
        """Inequality for the table with observer j's settings 1 and 2 exchanged."""
        bit = 1 << (self.n_qubits - 1 - j)
        idx = np.arange(2 ** self.n_qubits)
        return SignFunction(self.n_qubits, np.where(idx & bit, -1, 1) * self.values)

    def flip_outcome(self, j: int) -> "SignFunction":
        """Inequality for the table with observer j's setting-2 outcome negated."""
        bit = 1 << (self.n_qubits - 1 - j)
        idx = np.arange(2 ** self.n_qubits)
        return SignFunction(self.n_qubits, self.values[idx ^ bit])

    def permute(self, perm: Sequence[int]) -> "SignFunction":
        """Relabel observers: new observer i is old observer ``perm[i]``."""
        n = self.n_qubits
        new = np.empty_like(self.values)
        for i in range(2 ** n):
            s = sign_tuple(i, n)
            old = [0] * n
            for a, b in enumerate(perm):
                old[b] = s[a]
            new[i] = self.values[sign_index(old)]
        return SignFunction(n, new)

    def negate(self) -> "SignFunction":
        return SignFunction(self.n_qubits, -self.values)

    def equivalence_class(self) -> list["SignFunction"]:
        """Closure under setting swaps, outcome flips, observer permutations and negation."""
        n = self.n_qubits
        seen = {self}
        frontier = [self]
        while frontier:
            nxt = []
            for f in frontier:
                moves = [f.negate()]
                moves += [f.swap_settings(j) for j in range(n)]
                moves += [f.flip_outcome(j) for j in range(n)]
                if n > 1:
                    moves.append(f.permute([1, 0] + list(range(2, n))))
                    moves.append(f.permute(list(range(1, n)) + [0]))
                for g in moves:
                    if g not in seen:
                        seen.add(g)
                        nxt.append(g)
            frontier = nxt
        return sorted(seen, key=lambda g: g.values.tobytes())


def _check_table(table: CorrelationTable) -> np.ndarray:
    if not isinstance(table, CorrelationTable):
        table = CorrelationTable(int(np.log2(len(table))), table)
    return table.entries


def zb_lhs(table: CorrelationTable) -> float:
    """Left side of the general inequality: the L1 norm of the Walsh transform.

    A local realistic model exists iff this is at most 2^N.
    """
    return float(kernels.walsh_l1(_check_table(table)))


def local_bound(n: int) -> float:
    return float(2 ** n)


def family_lhs(table: CorrelationTable, sign: SignFunction) -> float:
    """|sum_s S(s) sum_k s^(k-1) E(k)| for one member of the family."""
    e = _check_table(table)
    if sign.n_qubits != table.n_qubits:
        raise ValueError("sign function and table have different numbers of observers")
    return float(abs(np.dot(sign.values, kernels.fwht(e.copy()))))


def mabk_sign_function(n: int) -> SignFunction:
    """Sign function sqrt(2) cos(-pi/4 + (sum s - N) pi/4) giving the MABK inequalities.

    With m the number of -1 entries the cosine argument is -pi/4 - m pi/2,
    so the value only depends on m mod 4 and is (+1, -1, -1, +1)[m % 4].
    """
    if n < 2:
        raise ValueError("MABK inequalities need at least 2 observers")
    table = (1, -1, -1, 1)
    return SignFunction(n, [table[bin(i).count("1") % 4] for i in range(2 ** n)])


def enumerate_sign_functions(n: int) -> Iterator[SignFunction]:
    """All 2^(2^N) sign functions, in binary-counting order."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > MAX_ENUMERATION_QUBITS:
        raise ValueError(f"enumeration limited to n <= {MAX_ENUMERATION_QUBITS}")
    size = 2 ** n
    bits = np.arange(size)
    for code in range(2 ** size):
        yield SignFunction(n, 1 - 2 * ((code >> bits) & 1))


def all_sign_matrix(n: int) -> np.ndarray:
    """Every sign function as a row of a (2^(2^N), 2^N) int8 matrix."""
    if n > MAX_ENUMERATION_QUBITS:
        raise ValueError(f"enumeration limited to n <= {MAX_ENUMERATION_QUBITS}")
    size = 2 ** n
    codes = np.arange(2 ** size, dtype=np.int64)[:, None]
    return (1 - 2 * ((codes >> np.arange(size)) & 1)).astype(np.int8)


def named_inequality_terms(sign: SignFunction) -> str:
    """Human-readable linear combination, e.g. ``-2 E(1,1) +2 E(1,2) ...``."""
    n = sign.n_qubits
    parts = []
    for idx, c in enumerate(sign.coefficients()):
        if c:
            k = ",".join(str(1 + ((idx >> (n - 1 - j)) & 1)) for j in range(n))
            parts.append(f"{c:+d} E({k})")
    return " ".join(parts)


def product_table(strategy) -> np.ndarray:
    """Integer table of products prod_j A_j(n_kj) for a deterministic strategy.

    ``strategy`` has shape (N, 2) with entries +-1.
    """
    a = np.asarray(strategy, dtype=np.int64)
    out = np.ones(1, dtype=np.int64)
    for row in a:
        out = np.outer(out, row).reshape(-1)
    return out


def identity_sum(strategy, sign: SignFunction) -> int:
    """sum_s S(s) prod_j [A_j(n_1) + s_j A_j(n_2)] in exact integer arithmetic."""
    a = np.asarray(strategy, dtype=np.int64)
    n = a.shape[0]
    total = 0
    for idx, s in enumerate(itertools.product((1, -1), repeat=n)):
        term = 1
        for j in range(n):
            term *= int(a[j, 0] + s[j] * a[j, 1])
        total += int(sign.values[idx]) * term
    return total
