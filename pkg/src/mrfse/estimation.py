"""Exhaustive penalized pseudo-likelihood neighborhood search and graph assembly."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Mapping

from .data import Sample, VertexSet
from .errors import ArgumentError
from .scoring import PenalizedScore, _check_c, score_candidate

MODES = ("and", "or")
TIE_RTOL = 1e-9


@dataclass(frozen=True)
class NeighborhoodEstimate:
    target: int
    neighborhood: tuple[int, ...]
    score: PenalizedScore
    candidates_evaluated: int
    max_size: int | None = None  # None means the full search ran


@dataclass(frozen=True)
class GraphEstimate:
    vertices: VertexSet
    edges: frozenset[tuple[int, int]]
    mode: str
    per_vertex: Mapping[int, NeighborhoodEstimate] = field(default_factory=dict)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(sorted({b if a == v else a for a, b in self.edges if v in (a, b)}))

    def edge_names(self) -> list[tuple[str, str]]:
        names = self.vertices.names
        return [(names[a], names[b]) for a, b in sorted(self.edges)]


def candidate_sets(others: tuple[int, ...], max_size: int) -> Iterator[tuple[int, ...]]:
    """Subsets by increasing size, lexicographic within a size."""
    for k in range(max_size + 1):
        yield from combinations(others, k)


def is_better(candidate: float, incumbent: float) -> bool:
    """Strict improvement beyond the tie tolerance."""
    tol = TIE_RTOL * max(1.0, abs(candidate), abs(incumbent))
    return candidate > incumbent + tol


def _check_max_size(s: Sample, max_size: int | None) -> int | None:
    if max_size is None:
        return None
    if int(max_size) != max_size or max_size < 0:
        raise ArgumentError("max_size must be a nonnegative integer")
    if max_size > s.p - 1:
        raise ArgumentError(f"max_size {max_size} exceeds p - 1 = {s.p - 1}")
    return int(max_size)


def estimate_neighborhood(s: Sample, v: int, c: float, max_size: int | None = None) -> NeighborhoodEstimate:
    """Maximize the penalized pseudo-likelihood over all ``W`` not containing ``v``.

    Ties (within a relative tolerance of 1e-9) keep the first set seen in
    size-then-lexicographic order, i.e. the smallest and then
    lexicographically smallest set.
    """
    _check_c(c)
    if not 0 <= v < s.p:
        raise ArgumentError(f"vertex id {v} out of range [0, {s.p})")
    cap = _check_max_size(s, max_size)
    others = tuple(u for u in range(s.p) if u != v)
    limit = len(others) if cap is None else cap
    best_set: tuple[int, ...] = ()
    best: PenalizedScore | None = None
    evaluated = 0
    for W in candidate_sets(others, limit):
        sc = score_candidate(s, v, W, c)
        evaluated += 1
        if best is None or is_better(sc.total, best.total):
            best, best_set = sc, W
    active_cap = cap if cap is not None and cap < len(others) else None
    return NeighborhoodEstimate(v, best_set, best, evaluated, active_cap)


def estimate_neighborhoods(
    s: Sample, c: float, max_size: int | None = None, threads: int = 1
) -> dict[int, NeighborhoodEstimate]:
    _check_c(c)
    _check_max_size(s, max_size)
    vs = range(s.p)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(lambda v: estimate_neighborhood(s, v, c, max_size), vs))
    else:
        results = [estimate_neighborhood(s, v, c, max_size) for v in vs]
    return {r.target: r for r in results}


def combine_neighborhoods(
    vertices: VertexSet, neighborhoods: Mapping[int, object], mode: str
) -> frozenset[tuple[int, int]]:
    """Edge set from per-vertex neighborhoods under the AND or OR rule.

    ``neighborhoods`` maps vertex id to either a NeighborhoodEstimate or a
    plain iterable of ids.
    """
    if mode not in MODES:
        raise ArgumentError(f"mode must be one of {MODES}, got {mode!r}")
    ne = {
        v: set(x.neighborhood if isinstance(x, NeighborhoodEstimate) else x)
        for v, x in neighborhoods.items()
    }
    p = len(vertices)
    edges = set()
    for v in range(p):
        for w in range(v + 1, p):
            fwd = w in ne.get(v, ())
            bwd = v in ne.get(w, ())
            if (fwd and bwd) if mode == "and" else (fwd or bwd):
                edges.add((v, w))
    return frozenset(edges)


def estimate_graph(
    s: Sample, c: float, mode: str = "or", max_size: int | None = None, threads: int = 1
) -> GraphEstimate:
    if mode not in MODES:
        raise ArgumentError(f"mode must be one of {MODES}, got {mode!r}")
    per_vertex = estimate_neighborhoods(s, c, max_size, threads)
    edges = combine_neighborhoods(s.vertices, per_vertex, mode)
    return GraphEstimate(s.vertices, edges, mode, per_vertex)
