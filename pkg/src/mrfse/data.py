"""Alphabets, vertex sets, samples and configurations, plus CSV ingestion.

Symbols are stored as small integer codes (``uint8``), so an alphabet holds
at most 255 symbols. A :class:`Sample` is an immutable ``n x p`` code matrix.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ArgumentError, CapacityError, FormatError, InsufficientDataError

MAX_ALPHABET = 255


@dataclass(frozen=True)
class Alphabet:
    """Finite symbol set; the position of a label is its internal code."""

    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        if len(self.labels) < 2:
            raise ArgumentError("alphabet needs at least 2 symbols")
        if len(set(self.labels)) != len(self.labels):
            raise ArgumentError("alphabet labels must be distinct")
        if len(self.labels) > MAX_ALPHABET:
            raise CapacityError(f"alphabet has {len(self.labels)} symbols; at most {MAX_ALPHABET} supported")

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self):
        return len(self.labels)

    def code(self, label: str) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise ArgumentError(f"symbol {label!r} not in alphabet {list(self.labels)}") from None

    @classmethod
    def of_size(cls, k: int) -> "Alphabet":
        return cls(tuple(str(i) for i in range(k)))


@dataclass(frozen=True)
class VertexSet:
    """Ordered, named vertices; vertex id == position in ``names``."""

    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(str(x) for x in self.names))
        if len(self.names) < 1:
            raise ArgumentError("vertex set must be nonempty")
        if len(set(self.names)) != len(self.names):
            raise ArgumentError("vertex names must be distinct")

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(str(name))
        except ValueError:
            raise ArgumentError(f"unknown vertex {name!r}") from None

    @classmethod
    def numbered(cls, p: int, prefix: str = "x") -> "VertexSet":
        return cls(tuple(f"{prefix}{i + 1}" for i in range(p)))


@dataclass(frozen=True)
class Configuration:
    """Assignment of symbol codes to a strictly increasing list of vertices."""

    vertices: tuple[int, ...] = ()
    symbols: tuple[int, ...] = ()

    def __post_init__(self):
        v = tuple(int(x) for x in self.vertices)
        s = tuple(int(x) for x in self.symbols)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "symbols", s)
        if len(v) != len(s):
            raise ArgumentError("configuration vertices and symbols differ in length")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ArgumentError("configuration vertices must be strictly increasing")

    def __len__(self):
        return len(self.vertices)

    @classmethod
    def from_mapping(cls, assignment: Mapping[int, int]) -> "Configuration":
        items = sorted(assignment.items())
        return cls(tuple(k for k, _ in items), tuple(a for _, a in items))


class Sample:
    """Immutable ``n x p`` matrix of symbol codes with its alphabet and vertices."""

    __slots__ = ("alphabet", "vertices", "data")

    def __init__(self, alphabet: Alphabet, vertices: VertexSet, data):
        arr = np.asarray(data)
        if arr.ndim != 2:
            raise ArgumentError("sample data must be a 2-d matrix")
        if arr.shape[0] < 1:
            raise InsufficientDataError("no observations")
        if arr.shape[1] != len(vertices):
            raise ArgumentError(f"sample has {arr.shape[1]} columns but {len(vertices)} vertices")
        if arr.size and (arr.min() < 0 or arr.max() >= alphabet.size):
            raise ArgumentError(f"sample codes must lie in [0, {alphabet.size})")
        arr = np.array(arr, dtype=np.uint8, copy=True)
        arr.flags.writeable = False
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Sample is immutable")

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]

    def rows(self, index) -> "Sample":
        """Sub-sample made of the selected rows."""
        return Sample(self.alphabet, self.vertices, self.data[index])

    def __eq__(self, other):
        if not isinstance(other, Sample):
            return NotImplemented
        return (
            self.alphabet == other.alphabet
            and self.vertices == other.vertices
            and np.array_equal(self.data, other.data)
        )

    def __repr__(self):
        return f"Sample(n={self.n}, p={self.p}, |A|={self.alphabet.size})"


def _read_text(path_or_text) -> str:
    if isinstance(path_or_text, io.TextIOBase):
        return path_or_text.read()
    with open(os.fspath(path_or_text), encoding="utf-8", newline="") as fh:
        return fh.read()


def _parse_table(text: str) -> tuple[list[str], list[list[str]]]:
    rows = [r for r in csv.reader(io.StringIO(text))]
    # tolerate a trailing blank line
    while rows and not any(cell.strip() for cell in rows[-1]):
        rows.pop()
    if not rows:
        raise FormatError("empty file")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header) or any(not h for h in header):
        raise FormatError("header must contain distinct, nonempty variable names")
    body = []
    for lineno, r in enumerate(rows[1:], start=2):
        if len(r) != len(header):
            raise FormatError(f"row {lineno}: expected {len(header)} fields, got {len(r)}")
        cells = [c.strip() for c in r]
        if any(c == "" for c in cells):
            raise FormatError(f"row {lineno}: missing value")
        body.append(cells)
    return header, body


def load_sample(path, format: str = "csv") -> Sample:
    """Read a categorical sample from a CSV file with a header row.

    The alphabet is the lexicographically sorted set of distinct tokens found
    in the body, and codes are assigned in that order.
    """
    if format != "csv":
        raise ArgumentError(f"unsupported format {format!r}")
    header, body = _parse_table(_read_text(path))
    if not body:
        raise FormatError("no observations")
    tokens = sorted({c for row in body for c in row})
    if len(tokens) > MAX_ALPHABET:
        raise CapacityError(f"{len(tokens)} distinct symbols; at most {MAX_ALPHABET} supported")
    if len(tokens) == 1:
        # a constant column set still needs a 2-symbol alphabet
        tokens = tokens + ["1" if tokens[0] != "1" else "0"]
        tokens.sort()
    lookup = {t: i for i, t in enumerate(tokens)}
    data = np.array([[lookup[c] for c in row] for row in body], dtype=np.uint8)
    return Sample(Alphabet(tuple(tokens)), VertexSet(tuple(header)), data)


def save_sample(s: Sample, path) -> None:
    with open(os.fspath(path), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(s.vertices.names)
        labels = s.alphabet.labels
        for row in s.data:
            w.writerow([labels[c] for c in row])


def load_price_series(path) -> dict[str, list[float]]:
    """Read a price table (header of names, one row per day) into columns."""
    header, body = _parse_table(_read_text(path))
    try:
        cols = {h: [float(r[j]) for r in body] for j, h in enumerate(header)}
    except ValueError as exc:
        raise FormatError(f"non-numeric price: {exc}") from None
    return cols


def binarize_series(series, names: Sequence[str] | None = None) -> Sample:
    """Code day-over-day moves: 1 when the price strictly rises, else 0.

    ``series`` is either a mapping name -> prices or a sequence of per-variable
    price sequences. With ``T`` prices per variable the result has ``T - 1``
    rows.
    """
    if isinstance(series, Mapping):
        names = list(series.keys())
        columns = [list(series[k]) for k in names]
    else:
        columns = [list(col) for col in series]
        if names is None:
            names = [f"x{i + 1}" for i in range(len(columns))]
    if not columns:
        raise FormatError("no variables")
    lengths = {len(c) for c in columns}
    if len(lengths) != 1:
        raise FormatError(f"variables have unequal lengths {sorted(lengths)}")
    T = lengths.pop()
    if T < 2:
        raise InsufficientDataError("need at least 2 price points per variable")
    prices = np.asarray(columns, dtype=float).T
    codes = (prices[1:] > prices[:-1]).astype(np.uint8)
    return Sample(Alphabet(("0", "1")), VertexSet(tuple(names)), codes)


def thin_sample(s: Sample, step: int) -> Sample:
    """Keep rows 0, step, 2*step, ... (``ceil(n / step)`` rows)."""
    if int(step) != step or step < 1:
        raise ArgumentError("thinning step must be a positive integer")
    if step == 1:
        return s
    return s.rows(slice(0, None, int(step)))
