"""Exactly specified factorized models: sampling, exact conditionals, ground truth.

A :class:`FactorizedModel` is an ordered list of conditional probability
tables ``p(x_target | x_parents)`` whose product is the joint law. It is the
ground truth for simulations: the true dependence graph, the constants that
govern consistency, and the edge-error metrics are all computed by exact
enumeration.

Random numbers come from numpy's counter-based Philox-4x64 generator. A seed
``s`` (0 <= s < 2**128) is used directly as the Philox key with counter 0;
``sample_model`` then draws one vector of ``n`` uniforms per factor in factor
order. Derived streams use the key ``s + (stream << 64)``, see
:func:`derive_key`.
"""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from .data import Alphabet, Configuration, Sample, VertexSet
from .errors import ArgumentError, CapacityError, FormatError
from .scoring import kl_divergence

SCHEMA_VERSION = 1
MAX_UNASSIGNED = 20
MAX_EXACT_VERTICES = 20
CPT_TOL = 1e-12
CI_TOL = 1e-10

# Fixed keys for the generated analogue models; the model size is mixed in
# as the high 64 bits.
COMPLETE_SEED = 20211
INDEPENDENT_SEED = 20212


def make_rng(seed: int) -> np.random.Generator:
    seed = int(seed)
    if not 0 <= seed < 2**128:
        raise ArgumentError("seed must lie in [0, 2**128)")
    return np.random.Generator(np.random.Philox(key=seed))


def derive_key(seed: int, stream: int) -> int:
    """Key of sub-stream ``stream`` of master ``seed`` (both below 2**64)."""
    seed, stream = int(seed), int(stream)
    if not (0 <= seed < 2**64 and 0 <= stream < 2**64):
        raise ArgumentError("seed and stream index must lie in [0, 2**64)")
    return seed + (stream << 64)


@dataclass(frozen=True)
class Factor:
    """``p(x_target | x_parents)`` as an array with axes ``(*parents, target)``."""

    target: int
    parents: tuple[int, ...]
    cpt: np.ndarray

    def row(self, parent_symbols: Sequence[int]) -> np.ndarray:
        return self.cpt[tuple(parent_symbols)]


@dataclass(frozen=True, eq=False)
class FactorizedModel:
    alphabet: Alphabet
    vertices: VertexSet
    factors: tuple[Factor, ...]
    name: str = "model"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        k, p = self.alphabet.size, len(self.vertices)
        fixed = []
        seen: set[int] = set()
        for f in self.factors:
            parents = tuple(int(u) for u in f.parents)
            if list(parents) != sorted(set(parents)):
                raise ArgumentError("factor parents must be sorted and distinct")
            if not 0 <= f.target < p or f.target in seen:
                raise ArgumentError(f"vertex {f.target} is not a fresh factor target")
            if f.target in parents:
                raise ArgumentError(f"vertex {f.target} listed as its own parent")
            missing = [u for u in parents if u not in seen]
            if missing:
                raise ArgumentError(f"parents {missing} of vertex {f.target} are not sampled before it")
            cpt = np.array(f.cpt, dtype=float)
            if cpt.shape != (k,) * (len(parents) + 1):
                raise ArgumentError(f"cpt for vertex {f.target} has shape {cpt.shape}, expected {(k,) * (len(parents) + 1)}")
            if np.any(cpt < 0) or np.any(np.abs(cpt.sum(axis=-1) - 1.0) > CPT_TOL):
                raise ArgumentError(f"cpt rows for vertex {f.target} must be nonnegative and sum to 1")
            cpt.flags.writeable = False
            seen.add(f.target)
            fixed.append(Factor(int(f.target), parents, cpt))
        if len(seen) != p:
            raise ArgumentError("every vertex must be the target of exactly one factor")
        object.__setattr__(self, "factors", tuple(fixed))

    @property
    def p(self) -> int:
        return len(self.vertices)

    def marginal(self, vertices: Iterable[int]) -> np.ndarray:
        """Exact joint law of ``X_S``, axes in increasing vertex order."""
        S = tuple(sorted(set(int(u) for u in vertices)))
        if S in self._cache:
            return self._cache[S]
        if self.p - len(S) > MAX_UNASSIGNED:
            raise CapacityError(
                f"exact marginal would sum over {self.p - len(S)} vertices (limit {MAX_UNASSIGNED})"
            )
        if self.p > 52:
            raise CapacityError("exact computation supports at most 52 vertices")
        operands = []
        for f in self.factors:
            operands += [f.cpt, [*f.parents, f.target]]
        out = np.einsum(*operands, list(S), optimize="greedy") if S else np.array(
            np.einsum(*operands, [], optimize="greedy")
        )
        out = np.asarray(out, dtype=float)
        out.flags.writeable = False
        self._cache[S] = out
        return out

    def joint(self) -> np.ndarray:
        return self.marginal(range(self.p))


# ---------------------------------------------------------------------------
# builtin models

_TABLE1_X3 = [0.3, 0.2, 0.5]
_TABLE1_X1_GIVEN_X3 = [[0.2, 0.4, 0.4], [0.3, 0.4, 0.3], [0.4, 0.3, 0.3]]
# indexed [x1][x3]
_TABLE1_X2_GIVEN_X1_X3 = [
    [[0.5, 0.5, 0.0], [0.3, 0.0, 0.7], [0.0, 0.75, 0.25]],
    [[0.5, 0.25, 0.25], [0.25, 0.25, 0.5], [0.3, 0.3, 0.4]],
    [[0.25, 0.25, 0.5], [0.3, 0.7, 0.0], [0.4, 0.3, 0.3]],
]
_TABLE1_X4_GIVEN_X3 = [[0.1, 0.4, 0.5], [0.2, 0.7, 0.1], [0.3, 0.6, 0.1]]
_TABLE1_X5_GIVEN_X3 = [[0.2, 0.6, 0.2], [0.3, 0.1, 0.6], [0.4, 0.3, 0.3]]


def _example3() -> FactorizedModel:
    x1, x2, x3, x4, x5 = range(5)
    factors = (
        Factor(x3, (), np.array(_TABLE1_X3)),
        Factor(x1, (x3,), np.array(_TABLE1_X1_GIVEN_X3)),
        Factor(x2, (x1, x3), np.array(_TABLE1_X2_GIVEN_X1_X3)),
        Factor(x4, (x3,), np.array(_TABLE1_X4_GIVEN_X3)),
        Factor(x5, (x3,), np.array(_TABLE1_X5_GIVEN_X3)),
    )
    return FactorizedModel(Alphabet(("0", "1", "2")), VertexSet.numbered(5), factors, "example3")


CHAIN_TRANSITION = np.array([[0.5, 0.5], [1.0, 0.0]])
CHAIN_STATIONARY = np.array([2.0 / 3.0, 1.0 / 3.0])


def _markov_chain_window(k: int) -> FactorizedModel:
    if k < 1:
        raise ArgumentError("window length must be >= 1")
    factors = [Factor(0, (), CHAIN_STATIONARY)]
    factors += [Factor(i, (i - 1,), CHAIN_TRANSITION) for i in range(1, k)]
    return FactorizedModel(Alphabet(("0", "1")), VertexSet.numbered(k), tuple(factors), f"markov_chain_window({k})")


def _random_rows(rng: np.random.Generator, shape: tuple[int, ...], k: int) -> np.ndarray:
    raw = rng.dirichlet(np.ones(k), size=shape)
    # keep every entry >= 0.2 / k so that dependencies are not near-degenerate
    return 0.8 * raw + 0.2 / k


def _complete(p: int, k: int = 2) -> FactorizedModel:
    if p < 1:
        raise ArgumentError("p must be >= 1")
    rng = make_rng(COMPLETE_SEED + (p << 64))
    factors = tuple(Factor(i, tuple(range(i)), _random_rows(rng, (k,) * i, k)) for i in range(p))
    return FactorizedModel(Alphabet.of_size(k), VertexSet.numbered(p), factors, f"complete({p})")


def _independent(p: int, k: int = 2) -> FactorizedModel:
    if p < 1:
        raise ArgumentError("p must be >= 1")
    rng = make_rng(INDEPENDENT_SEED + (p << 64))
    factors = tuple(Factor(i, (), _random_rows(rng, (), k)) for i in range(p))
    return FactorizedModel(Alphabet.of_size(k), VertexSet.numbered(p), factors, f"independent({p})")


BUILTIN_NAMES = ("example3", "markov_chain_window", "complete", "independent")
_NAME_RE = re.compile(r"^\s*([a-z_0-9]+?)\s*(?:\(\s*(\d+)\s*\))?\s*$")


def builtin_model(name: str, size: int | None = None) -> FactorizedModel:
    """Construct a builtin model by name, e.g. ``"markov_chain_window(5)"``.

    ``complete(p)`` and ``independent(p)`` are binary models with CPTs drawn
    from fixed seeds (``COMPLETE_SEED``, ``INDEPENDENT_SEED``).
    """
    m = _NAME_RE.match(str(name))
    if not m:
        raise ArgumentError(f"unknown model {name!r}")
    base, arg = m.group(1), m.group(2)
    if arg is not None:
        size = int(arg)
    if base == "example3":
        if size is not None:
            raise ArgumentError("example3 takes no size")
        return _example3()
    builders = {"markov_chain_window": _markov_chain_window, "complete": _complete, "independent": _independent}
    if base not in builders:
        raise ArgumentError(f"unknown model {name!r}; choose from {BUILTIN_NAMES}")
    if size is None:
        raise ArgumentError(f"model {base} needs a size, e.g. {base}(5)")
    return builders[base](size)


# ---------------------------------------------------------------------------
# model files

def model_to_dict(m: FactorizedModel) -> dict:
    labels, names = m.alphabet.labels, m.vertices.names
    factors = []
    for f in m.factors:
        rows = []
        for given in product(range(m.alphabet.size), repeat=len(f.parents)):
            rows.append({"given": [labels[a] for a in given], "probs": [float(x) for x in f.row(given)]})
        factors.append({"target": names[f.target], "parents": [names[u] for u in f.parents], "cpt": rows})
    return {
        "schema_version": SCHEMA_VERSION,
        "name": m.name,
        "alphabet": list(labels),
        "vertices": list(names),
        "factors": factors,
    }


def model_from_dict(doc: dict) -> FactorizedModel:
    try:
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise FormatError(f"unsupported model schema_version {doc.get('schema_version')!r}")
        alphabet = Alphabet(tuple(doc["alphabet"]))
        vertices = VertexSet(tuple(doc["vertices"]))
        k = alphabet.size
        factors = []
        for fd in doc["factors"]:
            target = vertices.index(fd["target"])
            parents = sorted(vertices.index(u) for u in fd.get("parents", []))
            order = [vertices.names[u] for u in parents]
            declared = list(fd.get("parents", []))
            perm = [declared.index(nm) for nm in order]
            cpt = np.full((k,) * (len(parents) + 1), np.nan)
            for row in fd["cpt"]:
                given = [alphabet.code(a) for a in row["given"]]
                if len(given) != len(parents):
                    raise FormatError(f"cpt row for {fd['target']} has wrong width")
                probs = np.asarray(row["probs"], dtype=float)
                if probs.shape != (k,):
                    raise FormatError(f"cpt row for {fd['target']} must list {k} probabilities")
                cpt[tuple(given[j] for j in perm)] = probs
            if np.isnan(cpt).any():
                raise FormatError(f"cpt for {fd['target']} does not cover every parent configuration")
            factors.append(Factor(target, tuple(parents), cpt))
        return FactorizedModel(alphabet, vertices, tuple(factors), str(doc.get("name", "model")))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed model document: {exc!r}") from None
    except ArgumentError as exc:
        raise FormatError(f"invalid model: {exc}") from None


def save_model(m: FactorizedModel, path) -> None:
    with open(os.fspath(path), "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(m), fh, indent=2)
        fh.write("\n")


def load_model(path) -> FactorizedModel:
    try:
        with open(os.fspath(path), encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"model file is not valid JSON: {exc}") from None
    return model_from_dict(doc)


def resolve_model(source: str) -> FactorizedModel:
    """A builtin name, or the path of a model JSON file."""
    if os.path.exists(source):
        return load_model(source)
    return builtin_model(source)


# ---------------------------------------------------------------------------
# sampling and exact probabilities

def sample_model(m: FactorizedModel, n: int, seed: int) -> Sample:
    """Draw ``n`` i.i.d. configurations by ancestral sampling in factor order."""
    if int(n) != n or n < 1:
        raise ArgumentError("n must be a positive integer")
    n = int(n)
    rng = make_rng(seed)
    k = m.alphabet.size
    data = np.zeros((n, m.p), dtype=np.uint8)
    for f in m.factors:
        u = rng.random(n)
        table = f.cpt.reshape(-1, k)
        cdf = np.cumsum(table, axis=1)
        cdf /= cdf[:, -1:]
        code = np.zeros(n, dtype=np.int64)
        for par in f.parents:
            code = code * k + data[:, par]
        data[:, f.target] = (cdf[code] <= u[:, None]).sum(axis=1)
    return Sample(m.alphabet, m.vertices, data)


def _config_symbols(a_W, W: tuple[int, ...]) -> tuple[int, ...]:
    if isinstance(a_W, Configuration):
        if a_W.vertices != W:
            raise ArgumentError(f"configuration on {a_W.vertices} does not match W={W}")
        return a_W.symbols
    sym = tuple(int(a) for a in a_W)
    if len(sym) != len(W):
        raise ArgumentError("configuration length does not match W")
    return sym


def exact_conditional(m: FactorizedModel, v: int, W: Iterable[int], a_W) -> np.ndarray | None:
    """``p(. | a_W)`` at vertex ``v`` by exact summation; None when ``p(a_W) = 0``."""
    W = tuple(sorted(int(u) for u in W))
    v = int(v)
    if v in W:
        raise ArgumentError("target vertex inside the conditioning set")
    for u in (v, *W):
        if not 0 <= u < m.p:
            raise ArgumentError(f"vertex id {u} out of range")
    sym = _config_symbols(a_W, W)
    if any(not 0 <= a < m.alphabet.size for a in sym):
        raise ArgumentError("configuration symbol out of range")
    S = tuple(sorted((v, *W)))
    marg = m.marginal(S)
    index = []
    for u in S:
        index.append(slice(None) if u == v else sym[W.index(u)])
    vec = np.array(marg[tuple(index)], dtype=float)
    tot = vec.sum()
    if tot <= 0:
        return None
    return vec / tot


def _conditional_table(marg: np.ndarray, axis: int) -> tuple[np.ndarray, np.ndarray]:
    """Conditional of ``axis`` given the others, plus the mask of defined entries."""
    den = marg.sum(axis=axis, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = np.where(den > 0, marg / np.where(den > 0, den, 1.0), np.nan)
    return cond, np.broadcast_to(den > 0, marg.shape)


@dataclass(frozen=True)
class TrueGraph:
    vertices: VertexSet
    edges: frozenset[tuple[int, int]]
    neighborhoods: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def is_symmetric(self) -> bool:
        return all(v in self.neighborhoods.get(w, ()) for v, ne in self.neighborhoods.items() for w in ne)

    def edge_names(self) -> list[tuple[str, str]]:
        names = self.vertices.names
        return [(names[a], names[b]) for a, b in sorted(self.edges)]


def is_markov_neighborhood(m: FactorizedModel, v: int, W: Iterable[int], tol: float = CI_TOL) -> bool:
    """Whether ``p(. | a_W)`` equals ``p(. | a_rest)`` on every defined rest configuration."""
    W = tuple(sorted(W))
    joint = m.joint()
    full, defined = _conditional_table(joint, v)
    drop = tuple(u for u in range(m.p) if u != v and u not in W)
    marg = joint.sum(axis=drop, keepdims=True) if drop else joint
    cond_W, _ = _conditional_table(marg, v)
    cond_W = np.broadcast_to(cond_W, joint.shape)
    diff = np.abs(np.where(defined, cond_W - full, 0.0))
    return bool(np.all(diff <= tol))


def basic_neighborhood(m: FactorizedModel, v: int, tol: float = CI_TOL) -> tuple[int, ...]:
    """Smallest Markov neighborhood of ``v`` (first hit in size-then-lex order)."""
    others = tuple(u for u in range(m.p) if u != v)
    for size in range(len(others) + 1):
        for W in combinations(others, size):
            if is_markov_neighborhood(m, v, W, tol):
                return W
    return others


def true_graph(m: FactorizedModel, tol: float = CI_TOL) -> TrueGraph:
    if m.p > MAX_EXACT_VERTICES:
        raise CapacityError(f"exact graph derivation supports at most {MAX_EXACT_VERTICES} vertices")
    ne = {v: basic_neighborhood(m, v, tol) for v in range(m.p)}
    edges = frozenset((min(v, w), max(v, w)) for v, nv in ne.items() for w in nv)
    return TrueGraph(m.vertices, edges, ne)


@dataclass(frozen=True)
class TheoremConstants:
    p_min: float
    alpha_min: float
    c_threshold: float
    neighborhood: tuple[int, ...]


def _p_min(m: FactorizedModel, v: int, ne: tuple[int, ...]) -> float:
    best = math.inf
    for size in range(len(ne) + 1):
        for W in combinations(ne, size):
            S = tuple(sorted((v, *W)))
            cond, defined = _conditional_table(m.marginal(S), S.index(v))
            pos = defined & (np.nan_to_num(cond) > 0)
            if pos.any():
                best = min(best, float(cond[pos].min()))
    return best


def _alpha_min(m: FactorizedModel, v: int, ne: tuple[int, ...]) -> float:
    if not ne:
        return math.inf
    k = m.alphabet.size
    best = math.inf
    cfgs = [c for c in product(range(k), repeat=len(ne))]
    p_ne = m.marginal(ne)
    for size in range(len(ne)):
        for W in combinations(ne, size):
            total = 0.0
            for a_ne in cfgs:
                w = float(p_ne[a_ne])
                if w <= 0:
                    continue
                full = exact_conditional(m, v, ne, a_ne)
                a_W = tuple(a_ne[ne.index(u)] for u in W)
                sub = exact_conditional(m, v, W, a_W)
                total += w * kl_divergence(full, sub)
            best = min(best, total)
    return best


def theorem_constants(m: FactorizedModel, v: int, neighborhood: Iterable[int] | None = None) -> TheoremConstants:
    """``p_min(v)``, ``alpha_min(v)`` and the strong-consistency threshold on ``c``.

    The threshold is ``|A|**2 / (p_min(v) * (|A| - 1))``. ``alpha_min`` is
    ``+inf`` when the neighborhood is empty.
    """
    if not 0 <= v < m.p:
        raise ArgumentError(f"vertex id {v} out of range")
    ne = tuple(sorted(neighborhood)) if neighborhood is not None else basic_neighborhood(m, v)
    k = m.alphabet.size
    pm = _p_min(m, v, ne)
    return TheoremConstants(pm, _alpha_min(m, v, ne), k * k / (pm * (k - 1)), ne)


def p_min_set(m: FactorizedModel, vertices: Iterable[int]) -> float:
    """Minimum of ``p_min(v)`` over a vertex subset."""
    return min(theorem_constants(m, v).p_min for v in vertices)


# ---------------------------------------------------------------------------
# error metrics

@dataclass(frozen=True)
class ErrorReport:
    ue: float
    oe: float
    te: float


def _ordered(edges) -> set[tuple[int, int]]:
    out = set()
    for a, b in edges:
        if a == b:
            raise ArgumentError("self-loop in edge set")
        out.add((a, b))
        out.add((b, a))
    return out


def error_metrics(truth, est) -> ErrorReport:
    """Under-, over- and total edge-error rates over ordered vertex pairs.

    Empty denominators give 0: ``ue = 0`` for an edgeless truth, ``oe = 0``
    for a complete truth.
    """
    if tuple(truth.vertices.names) != tuple(est.vertices.names):
        raise ArgumentError("truth and estimate have different vertex sets")
    p = len(truth.vertices)
    E = _ordered(truth.edges)
    Ehat = _ordered(est.edges)
    n_pairs = p * (p - 1)
    n_edges = len(E)
    n_non = n_pairs - n_edges
    missed = len(E - Ehat)
    spurious = len(Ehat - E)
    ue = missed / n_edges if n_edges else 0.0
    oe = spurious / n_non if n_non else 0.0
    te = (oe * n_edges + ue * n_non) / n_pairs if n_pairs else 0.0
    return ErrorReport(ue, oe, te)
