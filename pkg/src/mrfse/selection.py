"""K-fold cross-validation of the penalty constant ``c``."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .counting import config_keys
from .data import Sample
from .errors import ArgumentError
from .estimation import MODES, combine_neighborhoods, estimate_neighborhoods
from .simulation import make_rng


@dataclass(frozen=True)
class CVResult:
    grid: tuple[float, ...]
    fold_losses: np.ndarray  # shape (len(grid), folds)
    chosen_c: float
    folds: int
    seed: int
    mode: str
    fold_sizes: tuple[int, ...] = field(default=())

    @property
    def mean_losses(self) -> np.ndarray:
        return self.fold_losses.mean(axis=1)


def fold_assignment(n: int, folds: int, seed: int) -> list[np.ndarray]:
    """Seeded shuffle of ``range(n)`` cut into ``folds`` near-equal blocks."""
    if folds < 2:
        raise ArgumentError("need at least 2 folds")
    if folds > n:
        raise ArgumentError(f"folds={folds} exceeds the number of rows n={n}")
    perm = make_rng(seed).permutation(n)
    return [np.sort(block) for block in np.array_split(perm, folds)]


def heldout_loss(train: Sample, valid: Sample, neighborhoods: dict[int, tuple[int, ...]]) -> float:
    """Negative mean log of training conditionals on validation rows, per row and vertex.

    A validation cell ``(a_v, a_W)`` never seen in training is scored with
    probability ``1 / |A|``.
    """
    k = train.alphabet.size
    total = 0.0
    for v, W in sorted(neighborhoods.items()):
        W = tuple(sorted(W))
        tk = config_keys(train.data, W, k)
        vk = config_keys(valid.data, W, k)
        if tk is None:
            raise ArgumentError("conditioning set too large for held-out scoring")
        tcell = tk * k + train.data[:, v]
        vcell = vk * k + valid.data[:, v]
        cells, cnt = np.unique(tcell, return_counts=True)
        rows, inv = np.unique(cells // k, return_inverse=True)
        row_tot = np.bincount(inv.reshape(-1), weights=cnt)
        pos = np.searchsorted(cells, vcell)
        pos = np.minimum(pos, len(cells) - 1)
        hit = cells[pos] == vcell
        logp = np.full(vcell.shape[0], -math.log(k))
        rpos = np.searchsorted(rows, vcell[hit] // k)
        logp[hit] = np.log(cnt[pos[hit]] / row_tot[rpos])
        total += -float(logp.sum())
    return total / (valid.n * len(neighborhoods))


def _graph_neighborhoods(p: int, edges) -> dict[int, tuple[int, ...]]:
    ne: dict[int, set[int]] = {v: set() for v in range(p)}
    for a, b in edges:
        ne[a].add(b)
        ne[b].add(a)
    return {v: tuple(sorted(s)) for v, s in ne.items()}


def cross_validate_c(
    s: Sample,
    grid,
    folds: int = 10,
    seed: int = 0,
    mode: str = "or",
    max_size: int | None = None,
    threads: int = 1,
) -> CVResult:
    """Choose ``c`` from ``grid`` by minimizing mean held-out loss.

    For each fold the neighborhoods are estimated on the training rows and
    combined under ``mode``; the graph neighbors of each vertex are then used
    as its conditioning set on the held-out rows. Ties go to the smaller ``c``.
    """
    grid = tuple(float(c) for c in grid)
    if not grid:
        raise ArgumentError("grid must be nonempty")
    if any(not (c > 0) or not math.isfinite(c) for c in grid):
        raise ArgumentError("penalty constant must be positive")
    if mode not in MODES:
        raise ArgumentError(f"mode must be one of {MODES}, got {mode!r}")
    blocks = fold_assignment(s.n, folds, seed)

    def cell(job):
        i, j = job
        valid_idx = blocks[j]
        train_idx = np.setdiff1d(np.arange(s.n), valid_idx)
        train, valid = s.rows(train_idx), s.rows(valid_idx)
        nbhd = estimate_neighborhoods(train, grid[i], max_size)
        edges = combine_neighborhoods(s.vertices, nbhd, mode)
        return heldout_loss(train, valid, _graph_neighborhoods(s.p, edges))

    jobs = [(i, j) for i in range(len(grid)) for j in range(folds)]
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            values = list(ex.map(cell, jobs))
    else:
        values = [cell(job) for job in jobs]
    losses = np.array(values, dtype=float).reshape(len(grid), folds)
    means = losses.mean(axis=1)
    best = means.min()
    tol = 1e-12 * max(1.0, abs(best))
    chosen = min(c for c, m in zip(grid, means) if m <= best + tol)
    return CVResult(grid, losses, chosen, folds, int(seed), mode, tuple(len(b) for b in blocks))
