"""Log pseudo-likelihood, the penalized neighborhood criterion, and KL utilities.

All logarithms are natural. The penalty for a conditioning set ``W`` is
``c * |A|**|W| * ln(n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .counting import CountTable, joint_counts
from .data import Sample
from .errors import ArgumentError


@dataclass(frozen=True)
class PenalizedScore:
    log_pl: float
    penalty: float
    total: float
    c: float
    set_size: int


def _log_pl_cells(cells: np.ndarray) -> float:
    if cells.size == 0:
        return 0.0
    cnt = cells[:, 0].astype(float)
    tot = cells[:, 1].astype(float)
    # cells with N(a_v, a_W) == 0 are absent, as the product requires
    return float(np.sum(cnt * np.log(cnt / tot)))


def log_pseudo_likelihood(t: CountTable) -> float:
    """Sum of ``N(a_v, a_W) * ln p_hat(a_v | a_W)`` over observed cells; always <= 0."""
    if len(t) == 0:
        raise ArgumentError("empty count table")
    counts = t.counts
    tot = counts.sum(axis=1, keepdims=True)
    nz = counts > 0
    return float(np.sum(counts[nz] * np.log(counts[nz] / np.broadcast_to(tot, counts.shape)[nz])))


def penalty(c: float, alphabet_size: int, set_size: int, n: int) -> float:
    return c * float(alphabet_size) ** set_size * math.log(n)


def _check_c(c: float) -> None:
    if not (c > 0) or not math.isfinite(c):
        raise ArgumentError("penalty constant must be positive")


def penalized_score(t: CountTable, c: float, n: int | None = None) -> PenalizedScore:
    """Penalized criterion ``log_pl - c * |A|**|W| * ln n`` for one table."""
    _check_c(c)
    if n is None:
        n = t.n
    if n < 1:
        raise ArgumentError("sample size must be >= 1")
    if n != t.n:
        raise ArgumentError(f"n={n} does not match the table total {t.n}")
    lpl = log_pseudo_likelihood(t)
    pen = penalty(c, t.alphabet_size, len(t.cond_set), n)
    return PenalizedScore(lpl, pen, lpl - pen, float(c), len(t.cond_set))


def score_candidate(s: Sample, v: int, W: tuple[int, ...], c: float) -> PenalizedScore:
    """Fast path used by the search: same value as ``penalized_score(build_counts(...))``."""
    lpl = _log_pl_cells(joint_counts(s, v, W))
    pen = penalty(c, s.alphabet.size, len(W), s.n)
    return PenalizedScore(lpl, pen, lpl - pen, float(c), len(W))


def _as_pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.ndim != 1 or q.ndim != 1 or p.shape != q.shape:
        raise ArgumentError(f"distributions must be vectors of equal length, got {p.shape} and {q.shape}")
    return p, q


def check_distribution(p, tol: float = 1e-12) -> np.ndarray:
    """Validate a probability vector and return it as a float array."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ArgumentError("distribution must be a nonempty vector")
    if np.any(p < 0) or abs(p.sum() - 1.0) > tol:
        raise ArgumentError("distribution entries must be >= 0 and sum to 1")
    return p


def kl_divergence(p, q) -> float:
    """``D(p; q)`` in nats, with ``0 log 0 = 0`` and ``+inf`` when ``p(a) > q(a) = 0``."""
    p, q = _as_pair(p, q)
    support = p > 0
    if np.any(q[support] == 0):
        return math.inf
    ps, qs = p[support], q[support]
    d = float(np.sum(ps * (np.log(ps) - np.log(qs))))
    # rounding can push an exact zero slightly negative
    return 0.0 if -1e-12 < d < 0 else d


def chi_square_bound(p, q) -> float:
    """``sum over q(a) > 0 of (p(a) - q(a))**2 / q(a)``, an upper bound on ``D(p; q)``."""
    p, q = _as_pair(p, q)
    m = q > 0
    with np.errstate(over="ignore"):
        return float(np.sum((p[m] - q[m]) ** 2 / q[m]))
