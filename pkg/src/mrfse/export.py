"""Graph documents (JSON edge list, DOT) and run manifests."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field

from .errors import FormatError

GRAPH_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunManifest:
    command: str
    parameters: dict = field(default_factory=dict)
    seed: int | None = None
    tool_version: str = ""
    input_digest: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def digest_file(path) -> str:
    with open(os.fspath(path), "rb") as fh:
        return digest_bytes(fh.read())


def digest_json(doc) -> str:
    return digest_bytes(json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8"))


def dumps(doc) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=False) + "\n"


def graph_to_dict(g, c: float, manifest: RunManifest | None = None) -> dict:
    names = g.vertices.names
    caps = {est.max_size for est in g.per_vertex.values()}
    neighborhoods = {}
    for v, est in sorted(g.per_vertex.items()):
        neighborhoods[names[v]] = {
            "neighborhood": [names[u] for u in est.neighborhood],
            "log_pseudo_likelihood": est.score.log_pl,
            "penalty": est.score.penalty,
            "score": est.score.total,
            "candidates_evaluated": est.candidates_evaluated,
        }
    doc = {
        "schema_version": GRAPH_SCHEMA_VERSION,
        "mode": g.mode,
        "c": float(c),
        "max_size": next(iter(caps)) if len(caps) == 1 else None,
        "vertices": list(names),
        "edges": [list(e) for e in g.edge_names()],
        "neighborhoods": neighborhoods,
    }
    if manifest is not None:
        doc["manifest"] = manifest.to_dict()
    return doc


def read_graph_json(path) -> dict:
    """Load and minimally validate a graph document."""
    with open(os.fspath(path), encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schema_version") != GRAPH_SCHEMA_VERSION:
        raise FormatError(f"unsupported graph schema_version {doc.get('schema_version')!r}")
    names = set(doc["vertices"])
    for e in doc["edges"]:
        if len(e) != 2 or e[0] == e[1] or not set(e) <= names:
            raise FormatError(f"invalid edge {e!r}")
    return doc


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def graph_to_dot(g, manifest: RunManifest | None = None) -> str:
    lines = []
    if manifest is not None:
        for line in json.dumps(manifest.to_dict(), sort_keys=True).splitlines():
            lines.append(f"// manifest: {line}")
    lines.append("graph mrf {")
    for nm in g.vertices.names:
        lines.append(f"  {_dot_id(nm)};")
    for a, b in g.edge_names():
        lines.append(f"  {_dot_id(a)} -- {_dot_id(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_text(path, text: str) -> None:
    with open(os.fspath(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
