"""Contingency counts N(a_W) and N(a_v, a_W) for one target and one conditioning set."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from .data import Configuration, Sample
from .errors import ArgumentError, UndefinedConditionalError

# mixed-radix keys stay in int64 below this bound
_INT_KEY_LIMIT = 2**62


def _check_ids(s: Sample, v: int, W: Iterable[int]) -> tuple[int, tuple[int, ...]]:
    W = tuple(sorted(int(w) for w in W))
    v = int(v)
    if len(set(W)) != len(W):
        raise ArgumentError("conditioning set has repeated vertices")
    for u in (v, *W):
        if not 0 <= u < s.p:
            raise ArgumentError(f"vertex id {u} out of range [0, {s.p})")
    if v in W:
        raise ArgumentError(f"target vertex {v} is inside the conditioning set")
    return v, W


@dataclass(frozen=True, eq=False)
class CountTable:
    """Sparse contingency table of ``X_v`` against configurations of ``X_W``.

    ``configs[i]`` is the i-th observed configuration on ``cond_set`` and
    ``counts[i, a]`` is ``N(a_v = a, a_W = configs[i])``. Only configurations
    with positive count are stored; rows are sorted lexicographically.
    """

    target: int
    cond_set: tuple[int, ...]
    alphabet_size: int
    configs: np.ndarray
    counts: np.ndarray
    _index: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def row_totals(self) -> np.ndarray:
        """``N(a_W)`` for each stored configuration."""
        return self.counts.sum(axis=1)

    def __len__(self):
        return self.counts.shape[0]

    @cached_property
    def rows(self) -> dict[Configuration, tuple[int, ...]]:
        return {
            Configuration(self.cond_set, tuple(cfg)): tuple(int(c) for c in cnt)
            for cfg, cnt in zip(self.configs.tolist(), self.counts)
        }

    def _row(self, a_W: Configuration) -> int:
        if not self._index:
            self._index.update({tuple(cfg): i for i, cfg in enumerate(self.configs.tolist())})
        if tuple(a_W.vertices) != self.cond_set:
            raise ArgumentError(
                f"configuration on {a_W.vertices} does not match conditioning set {self.cond_set}"
            )
        try:
            return self._index[tuple(a_W.symbols)]
        except KeyError:
            raise UndefinedConditionalError(
                f"configuration {a_W.symbols} on {self.cond_set} never observed"
            ) from None

    def row_counts(self, a_W: Configuration) -> np.ndarray:
        return self.counts[self._row(a_W)]


def config_keys(data: np.ndarray, W: tuple[int, ...], k: int) -> np.ndarray | None:
    """Mixed-radix integer code of each row restricted to ``W``; None on overflow."""
    if k ** (len(W) + 1) >= _INT_KEY_LIMIT:
        return None
    key = np.zeros(data.shape[0], dtype=np.int64)
    for w in W:
        key *= k
        key += data[:, w]
    return key


def build_counts(s: Sample, v: int, W: Iterable[int] = ()) -> CountTable:
    """Count ``N(a_v, a_W)`` over the sample for every observed ``a_W``."""
    v, W = _check_ids(s, v, W)
    k = s.alphabet.size
    data = s.data
    key = config_keys(data, W, k)
    if key is None:
        configs, inverse = np.unique(data[:, list(W)], axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
    else:
        uniq, inverse = np.unique(key, return_inverse=True)
        configs = _decode(uniq, len(W), k)
    m = configs.shape[0]
    cell = inverse.astype(np.int64) * k + data[:, v]
    counts = np.bincount(cell, minlength=m * k).reshape(m, k).astype(np.int64)
    return CountTable(v, W, k, configs.astype(np.uint8), counts)


def _decode(keys: np.ndarray, width: int, k: int) -> np.ndarray:
    out = np.empty((keys.shape[0], width), dtype=np.uint8)
    rem = keys.copy()
    for j in range(width - 1, -1, -1):
        out[:, j] = rem % k
        rem //= k
    return out


def empirical_conditional(t: CountTable, a_W: Configuration, a_v: int) -> float:
    """``N(a_v, a_W) / N(a_W)``; raises if ``a_W`` was never observed."""
    row = t.row_counts(a_W)
    if not 0 <= a_v < t.alphabet_size:
        raise ArgumentError(f"symbol code {a_v} out of range")
    return float(row[a_v]) / float(row.sum())


def joint_counts(s: Sample, v: int, W: Iterable[int] = ()) -> np.ndarray:
    """Pairs-only count vector for scoring: the nonzero ``N(a_v, a_W)`` and ``N(a_W)``.

    Returns an ``(m, 2)`` int array, one line per observed ``(a_W, a_v)``
    cell, holding the cell count and its row total. Faster than
    :func:`build_counts` because no configuration is decoded.
    """
    v, W = _check_ids(s, v, W)
    k = s.alphabet.size
    data = s.data
    key = config_keys(data, W, k)
    if key is None:
        return _cells_from_table(build_counts(s, v, W))
    cell = key * k + data[:, v]
    n = data.shape[0]
    # dense bincount when the key space is small relative to n
    if k ** (len(W) + 1) <= max(4 * n, 1 << 16):
        dense = np.bincount(cell, minlength=k ** (len(W) + 1)).reshape(-1, k)
        row_tot = dense.sum(axis=1)
        nz = dense > 0
        return np.column_stack([dense[nz], np.broadcast_to(row_tot[:, None], dense.shape)[nz]])
    ucell, cnt = np.unique(cell, return_counts=True)
    urow, inv = np.unique(ucell // k, return_inverse=True)
    row_tot = np.bincount(inv.reshape(-1), weights=cnt).astype(np.int64)
    return np.column_stack([cnt, row_tot[inv.reshape(-1)]])


def _cells_from_table(t: CountTable) -> np.ndarray:
    tot = t.row_totals
    nz = t.counts > 0
    return np.column_stack([t.counts[nz], np.broadcast_to(tot[:, None], t.counts.shape)[nz]])
