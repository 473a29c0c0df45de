"""Batch command-line front end.

Exit codes: 0 success, 2 usage/argument error, 3 data/format error,
4 capacity error. Every artifact embeds (JSON, DOT) or is accompanied by
(CSV, as ``<out>.manifest.json``) a run manifest. Outputs do not depend on
``--threads``.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .data import Configuration, load_sample
from .diagnostics import REPORT_FIELDS, bound_grid
from .errors import ArgumentError, MRFError
from .estimation import GraphEstimate, combine_neighborhoods, estimate_graph, estimate_neighborhoods
from .export import (
    RunManifest,
    digest_file,
    digest_json,
    dumps,
    graph_to_dict,
    graph_to_dot,
    write_text,
)
from .selection import cross_validate_c
from .simulation import (
    derive_key,
    error_metrics,
    model_to_dict,
    resolve_model,
    sample_model,
    save_model,
    true_graph,
)

THREADS_ENV = "MRFSE_THREADS"


class StageError(Exception):
    def __init__(self, stage: str, exc: BaseException, code: int):
        super().__init__(f"{stage}: {exc}")
        self.code = code


@contextlib.contextmanager
def stage(name: str):
    try:
        yield
    except MRFError as exc:
        raise StageError(name, exc, exc.exit_code) from exc
    except (FileNotFoundError, IsADirectoryError, PermissionError, UnicodeDecodeError) as exc:
        raise StageError(name, exc, 3) from exc


def _threads(args) -> int:
    if args.threads is not None:
        k = args.threads
    else:
        try:
            k = int(os.environ.get(THREADS_ENV, "1"))
        except ValueError:
            raise ArgumentError(f"{THREADS_ENV} must be an integer") from None
    if k < 1:
        raise ArgumentError("--threads must be >= 1")
    return k


def _manifest(command, params, seed, digest) -> RunManifest:
    return RunManifest(command, params, seed, __version__, digest)


def _model_digest(source: str, model) -> str:
    return digest_file(source) if os.path.exists(source) else digest_json(model_to_dict(model))


def _write_csv(path, header, rows, manifest: RunManifest) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    write_text(path, buf.getvalue())
    write_text(f"{os.fspath(path)}.manifest.json", dumps(manifest.to_dict()))


def _fmt(x) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------

def cmd_estimate(args) -> int:
    fmt = args.format or "json"
    if fmt not in ("json", "dot"):
        raise StageError("arguments", ArgumentError("estimate writes json or dot"), 2)
    with stage("arguments"):
        threads = _threads(args)
    with stage("input"):
        s = load_sample(args.input)
        digest = digest_file(args.input)
    with stage("estimation"):
        g = estimate_graph(s, args.c, args.mode, args.max_size, threads)
    params = {"c": args.c, "mode": args.mode, "max_size": args.max_size, "input": os.path.basename(args.input)}
    manifest = _manifest("estimate", params, None, digest)
    with stage("output"):
        if fmt == "json":
            write_text(args.out, dumps(graph_to_dict(g, args.c, manifest)))
        else:
            write_text(args.out, graph_to_dot(g, manifest))
        if args.dot:
            write_text(args.dot, graph_to_dot(g, manifest))
    return 0


SIM_FIELDS = ("model", "n", "c", "mode", "run", "seed", "ue", "oe", "te")


def simulation_stream(run: int, n: int) -> int:
    """Sub-stream index of (run, n); independent of the grid order."""
    return (run << 32) | n


def cmd_simulate(args) -> int:
    fmt = args.format or "csv"
    if fmt != "csv":
        raise StageError("arguments", ArgumentError("simulate writes csv"), 2)
    with stage("arguments"):
        threads = _threads(args)
        if args.runs < 1:
            raise ArgumentError("--runs must be >= 1")
        if any(n < 1 or n >= 2**32 for n in args.n):
            raise ArgumentError("--n values must lie in [1, 2**32)")
        modes = list(dict.fromkeys(args.mode))
    with stage("model"):
        model = resolve_model(args.model)
        digest = _model_digest(args.model, model)
        truth = true_graph(model)

    jobs = [(n, run) for n in args.n for run in range(args.runs)]

    def job(item):
        n, run = item
        key = derive_key(args.seed, simulation_stream(run, n))
        s = sample_model(model, n, key)
        out = []
        for c in args.c_list:
            nb = estimate_neighborhoods(s, c, args.max_size)
            for mode in modes:
                g = GraphEstimate(s.vertices, combine_neighborhoods(s.vertices, nb, mode), mode, nb)
                out.append((n, c, mode, run, key, error_metrics(truth, g)))
        return out

    with stage("simulation"):
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                results = [r for chunk in ex.map(job, jobs) for r in chunk]
        else:
            results = [r for item in jobs for r in job(item)]

    results.sort(key=lambda r: (r[0], r[1], modes.index(r[2]), r[3]))
    rows = [
        [model.name, n, _fmt(c), mode, run, key, _fmt(e.ue), _fmt(e.oe), _fmt(e.te)]
        for n, c, mode, run, key, e in results
    ]
    groups: dict = {}
    for n, c, mode, run, key, e in results:
        groups.setdefault((n, c, mode), []).append(e)
    for (n, c, mode), errs in groups.items():
        means = [float(np.mean([getattr(e, f) for e in errs])) for f in ("ue", "oe", "te")]
        rows.append([model.name, n, _fmt(c), mode, "mean", args.seed, *map(_fmt, means)])
    params = {
        "model": args.model,
        "n": list(args.n),
        "c_list": list(args.c_list),
        "modes": modes,
        "runs": args.runs,
        "max_size": args.max_size,
    }
    with stage("output"):
        _write_csv(args.out, SIM_FIELDS, rows, _manifest("simulate", params, args.seed, digest))
    return 0


def cmd_cv(args) -> int:
    fmt = args.format or "json"
    if fmt != "json":
        raise StageError("arguments", ArgumentError("cv writes json"), 2)
    with stage("arguments"):
        threads = _threads(args)
    with stage("input"):
        s = load_sample(args.input)
        digest = digest_file(args.input)
    with stage("cross-validation"):
        res = cross_validate_c(s, args.grid, args.folds, args.seed, args.mode, args.max_size, threads)
    params = {
        "grid": list(args.grid),
        "folds": args.folds,
        "mode": args.mode,
        "max_size": args.max_size,
        "input": os.path.basename(args.input),
    }
    doc = {
        "schema_version": 1,
        "grid": list(res.grid),
        "folds": res.folds,
        "seed": res.seed,
        "mode": res.mode,
        "fold_sizes": list(res.fold_sizes),
        "fold_losses": res.fold_losses.tolist(),
        "mean_losses": res.mean_losses.tolist(),
        "chosen_c": res.chosen_c,
        "manifest": _manifest("cv", params, args.seed, digest).to_dict(),
    }
    with stage("output"):
        write_text(args.out, dumps(doc))
    return 0


def cmd_diagnose(args) -> int:
    fmt = args.format or "csv"
    if fmt != "csv":
        raise StageError("arguments", ArgumentError("diagnose writes csv"), 2)
    with stage("arguments"):
        threads = _threads(args)
        if args.replications < 1:
            raise ArgumentError("replications must be a positive integer")
    with stage("model"):
        model = resolve_model(args.model)
        digest = _model_digest(args.model, model)
        v = model.vertices.index(args.vertex)
        W = [model.vertices.index(u) for u in args.cond_set]
        if len(args.config) != len(W):
            raise ArgumentError("--config must give one symbol per --cond-set vertex")
        assign = {w: model.alphabet.code(a) for w, a in zip(W, args.config)}
        a_W = Configuration.from_mapping(assign)
    with stage("diagnostics"):
        checks = bound_grid(model, v, a_W.vertices, a_W, args.delta, args.n, args.replications, args.seed, threads)
    rows = [
        [_fmt(c.delta), c.n, c.replications, c.exceedances, _fmt(c.empirical_freq), _fmt(c.bound_value), str(c.satisfied).lower()]
        for c in checks
    ]
    params = {
        "model": args.model,
        "vertex": args.vertex,
        "cond_set": list(args.cond_set),
        "config": list(args.config),
        "delta": list(args.delta),
        "n": list(args.n),
        "replications": args.replications,
    }
    with stage("output"):
        _write_csv(args.out, REPORT_FIELDS, rows, _manifest("diagnose", params, args.seed, digest))
    return 0


def cmd_export_model(args) -> int:
    with stage("model"):
        model = resolve_model(args.model)
    with stage("output"):
        save_model(model, args.out)
    return 0


# ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", required=True, help="output path")
    p.add_argument("--threads", type=int, default=None, help=f"worker threads (fallback: ${THREADS_ENV}, then 1)")
    p.add_argument("--format", choices=("json", "dot", "csv"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mrfse", description="Discrete Markov random field structure estimation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate the dependence graph of a CSV sample")
    p.add_argument("--input", required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--mode", choices=("and", "or"), default="or")
    p.add_argument("--max-size", type=int, default=None)
    p.add_argument("--dot", default=None, help="also write a DOT rendering here")
    _common(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="recovery experiment on a known model")
    p.add_argument("--model", required=True, help="builtin name, e.g. example3, or a model JSON file")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--c-list", type=float, nargs="+", default=[1.0])
    p.add_argument("--mode", choices=("and", "or"), nargs="+", default=["and", "or"])
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-size", type=int, default=None)
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("cv", help="choose c by k-fold cross-validation")
    p.add_argument("--input", required=True)
    p.add_argument("--grid", type=float, nargs="+", required=True)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("and", "or"), default="or")
    p.add_argument("--max-size", type=int, default=None)
    _common(p)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("diagnose", help="Monte Carlo check of the deviation bound")
    p.add_argument("--model", required=True)
    p.add_argument("--vertex", required=True, help="target vertex name")
    p.add_argument("--cond-set", nargs="*", default=[], help="conditioning vertex names")
    p.add_argument("--config", nargs="*", default=[], help="symbol labels, aligned with --cond-set")
    p.add_argument("--delta", type=float, nargs="+", required=True)
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--replications", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    _common(p)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("export-model", help="write a builtin or file model as model JSON")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_model)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"mrfse {args.command}: error in {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
