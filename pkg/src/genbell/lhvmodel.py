"""Explicit local hidden-variable models for two-setting correlation tables.

When the general inequality holds, each sign sector s gets probability
|W_s| / 2^N, where W_s are the Walsh coefficients of the table; inside a
sector every observer satisfies A_j(n_1) = s_j A_j(n_2) and the product of
the setting-1 outcomes carries the sign of W_s. Leftover probability goes
to uniform noise over all 4^N deterministic strategies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from genbell.bellcore import (
    MAX_ENUMERATION_QUBITS,
    CorrelationTable,
    all_sign_matrix,
    local_bound,
    sign_tuple,
    zb_lhs,
)

SLACK = 1e-12


class NoLocalModelError(ValueError):
    """The table violates the general inequality, so no local model exists."""

    def __init__(self, value: float, bound: float):
        super().__init__(f"general inequality violated: {value:.12g} > {bound:g}")
        self.value = value
        self.bound = bound
        self.violation = value - bound


@dataclass(frozen=True)
class DeterministicStrategy:
    """``outcomes[j] = (A_j(n_1), A_j(n_2))``."""

    outcomes: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for pair in self.outcomes:
            if len(pair) != 2 or any(a not in (1, -1) for a in pair):
                raise ValueError(f"strategy outcomes must be +-1 pairs, got {pair}")

    @property
    def n_qubits(self) -> int:
        return len(self.outcomes)

    def products(self) -> np.ndarray:
        """Integer table prod_j A_j(n_kj) over all 2^N setting choices."""
        out = np.ones(1, dtype=np.int64)
        for pair in self.outcomes:
            out = np.outer(out, pair).reshape(-1)
        return out


def all_strategies(n: int):
    """All 4^N deterministic strategies."""
    for flat in itertools.product((1, -1), repeat=2 * n):
        yield DeterministicStrategy(tuple(zip(flat[0::2], flat[1::2])))


def sector_strategies(s: tuple[int, ...], sign: int) -> list[DeterministicStrategy]:
    """Strategies with A_j(n_1) = s_j A_j(n_2) and prod_j A_j(n_1) = sign."""
    out = []
    for first in itertools.product((1, -1), repeat=len(s)):
        if int(np.prod(first)) == sign:
            out.append(DeterministicStrategy(tuple((a, a * sj) for a, sj in zip(first, s))))
    return out


@dataclass(frozen=True)
class LhvModel:
    n_qubits: int
    sector_probabilities: dict = field(repr=False)
    sector_signs: dict = field(repr=False)
    noise_weight: float = 0.0

    def __post_init__(self):
        probs = list(self.sector_probabilities.values())
        if any(p < 0 for p in probs) or self.noise_weight < -SLACK:
            raise ValueError("model probabilities must be nonnegative")
        if abs(sum(probs) + self.noise_weight - 1.0) > SLACK:
            raise ValueError("model probabilities do not sum to 1")

    def distribution(self):
        """Yield (strategy, probability) pairs; strategies may repeat across terms."""
        for s, p in self.sector_probabilities.items():
            if p == 0:
                continue
            members = sector_strategies(s, self.sector_signs[s])
            for strat in members:
                yield strat, p / len(members)
        if self.noise_weight > 0:
            w = self.noise_weight / 4 ** self.n_qubits
            for strat in all_strategies(self.n_qubits):
                yield strat, w

    def active_sectors(self, threshold: float = 0.0) -> list[dict]:
        return [
            {"s": list(s), "probability": p, "sign": self.sector_signs[s]}
            for s, p in self.sector_probabilities.items()
            if p > threshold
        ]


def build_lhv(table: CorrelationTable) -> LhvModel:
    """Construct the sector model for ``table``; raises if the inequality fails."""
    n = table.n_qubits
    value = zb_lhs(table)
    bound = local_bound(n)
    if value > bound + SLACK:
        raise NoLocalModelError(value, bound)
    w = table.walsh()
    probs, signs = {}, {}
    for idx in range(2 ** n):
        s = sign_tuple(idx, n)
        probs[s] = abs(float(w[idx])) / bound
        signs[s] = -1 if w[idx] < 0 else 1
    total = sum(probs.values())
    if total > 1.0:
        # only reachable inside the slack; renormalize so the model stays valid
        probs = {s: p / total for s, p in probs.items()}
        total = 1.0
    return LhvModel(n, probs, signs, noise_weight=max(0.0, 1.0 - total))


def reconstruct(model: LhvModel) -> CorrelationTable:
    """Correlation table predicted by the model's strategy distribution."""
    e = np.zeros(2 ** model.n_qubits)
    for strat, p in model.distribution():
        e += p * strat.products()
    return CorrelationTable(model.n_qubits, e)


def lhv_exists_bruteforce(table: CorrelationTable) -> bool:
    """Check every inequality of the sign-function family, N <= 4."""
    n = table.n_qubits
    if n > MAX_ENUMERATION_QUBITS:
        raise ValueError(f"brute-force check limited to n <= {MAX_ENUMERATION_QUBITS}")
    # the Walsh coefficients are formed here by the explicit s^(k-1) sums
    s_bits = np.arange(2 ** n)[:, None]
    k_bits = np.arange(2 ** n)[None, :]
    parity = np.vectorize(lambda v: bin(v).count("1") & 1)(s_bits & k_bits)
    inner = (1 - 2 * parity) @ table.entries
    lhs = np.abs(all_sign_matrix(n).astype(float) @ inner)
    return bool(lhs.max() <= local_bound(n) + SLACK)
