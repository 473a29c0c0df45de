"""Monte Carlo check of the deviation bound for empirical conditionals.

For a known model, a target ``v`` and a configuration ``a_W``, the bound reads

    P( N(a_W) * max_a |p_hat(a | a_W) - p(a | a_W)|**2 > delta * ln n )
        <= 2 * |A| * delta * (ln n)**2 / n**delta,

valid for ``n >= exp(1 / delta)``. Logarithms are natural here, like
everywhere else in the package.

Replication ``r`` of master seed ``s`` samples with the Philox key
``derive_key(s, r)``.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .counting import build_counts
from .data import Configuration
from .errors import ArgumentError, UndefinedConditionalError
from .simulation import FactorizedModel, derive_key, exact_conditional, sample_model


@dataclass(frozen=True)
class BoundCheck:
    delta: float
    n: int
    replications: int
    exceedances: int
    empirical_freq: float
    bound_value: float
    satisfied: bool

    @property
    def standard_error(self) -> float:
        f = self.empirical_freq
        return math.sqrt(f * (1 - f) / self.replications)


def deviation_bound(alphabet_size: int, delta: float, n: int) -> float:
    return 2 * alphabet_size * delta * math.log(n) ** 2 / n**delta


def deviation_statistic(sample, v: int, W: tuple[int, ...], a_W: Configuration, true_probs: np.ndarray) -> float:
    """``N(a_W) * max_a |p_hat - p|**2``, or 0 when ``a_W`` is unobserved."""
    t = build_counts(sample, v, W)
    try:
        row = t.row_counts(a_W)
    except UndefinedConditionalError:
        return 0.0
    N = row.sum()
    return float(N * np.max((row / N - true_probs) ** 2))


def check_deviation_bound(
    m: FactorizedModel,
    v: int,
    W: Iterable[int],
    a_W,
    delta: float,
    n: int,
    replications: int,
    seed: int = 0,
    threads: int = 1,
) -> BoundCheck:
    W = tuple(sorted(int(u) for u in W))
    if not (delta > 0):
        raise ArgumentError("delta must be positive")
    if int(n) != n or n < 1:
        raise ArgumentError("n must be a positive integer")
    if n < math.exp(1.0 / delta):
        raise ArgumentError(f"n={n} is below exp(1/delta)={math.exp(1.0 / delta):.6g}; the bound does not apply")
    if int(replications) != replications or replications < 1:
        raise ArgumentError("replications must be a positive integer")
    if not isinstance(a_W, Configuration):
        a_W = Configuration(W, tuple(a_W))
    if a_W.vertices != W:
        raise ArgumentError("configuration does not match the conditioning set")
    true_probs = exact_conditional(m, v, W, a_W)
    if true_probs is None:
        raise ArgumentError("conditioning configuration has probability zero")
    threshold = delta * math.log(n)

    def one(r):
        s = sample_model(m, int(n), derive_key(seed, r))
        return deviation_statistic(s, v, W, a_W, true_probs) > threshold

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            hits = sum(ex.map(one, range(replications)))
    else:
        hits = sum(one(r) for r in range(replications))
    freq = hits / replications
    bound = deviation_bound(m.alphabet.size, delta, int(n))
    return BoundCheck(float(delta), int(n), int(replications), int(hits), freq, bound, freq <= bound or bound >= 1)


def bound_grid(m, v, W, a_W, deltas, ns, replications, seed=0, threads=1) -> list[BoundCheck]:
    """One check per ``(delta, n)`` pair, all sharing the master seed."""
    return [
        check_deviation_bound(m, v, W, a_W, d, n, replications, seed, threads)
        for d in deltas
        for n in ns
    ]


REPORT_FIELDS = ("delta", "n", "replications", "exceedances", "empirical_freq", "bound_value", "satisfied")


def write_bound_report(checks: list[BoundCheck], path) -> None:
    with open(os.fspath(path), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_FIELDS)
        for c in checks:
            w.writerow([repr(c.delta), c.n, c.replications, c.exceedances, repr(c.empirical_freq), repr(c.bound_value), str(c.satisfied).lower()])
