"""Command line: ``pspark trial``, ``pspark sweep``, ``pspark verify``."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .graph import GeneratorSpec, generate
from .harness import TrialConfig, config_dict, run_experiment, run_trial, verify_coloring
from .palette import ListAssignment

EXIT_CONFIG = 2


class ConfigError(Exception):
    pass


def _number(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_graph(text: str, seed: int = 0) -> GeneratorSpec:
    """``kind:key=value,...`` or ``file:PATH``."""
    kind, _, rest = text.partition(":")
    if kind == "file":
        if not rest:
            raise ConfigError("file graph needs a path: file:PATH")
        return GeneratorSpec("file", {"path": rest}, seed)
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise ConfigError(f"malformed graph parameter {item!r} (want key=value)")
        params[key.strip()] = _number(value.strip())
    try:
        return GeneratorSpec(kind, params, seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_range(text: str) -> list[float]:
    """``lo:hi:step`` inclusive of ``hi``, or a comma list."""
    if "," in text or ":" not in text:
        return [float(x) for x in text.split(",")]
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise ConfigError(f"bad range {text!r} (want lo:hi:step)") from exc
    if step <= 0 or hi < lo:
        raise ConfigError("range needs step > 0 and hi >= lo")
    count = int(round((hi - lo) / step)) + 1
    return [round(lo + i * step, 10) for i in range(count)]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", required=True, help="kind:key=value,... or file:PATH")
    p.add_argument("--graph-seed", type=int, default=0)
    p.add_argument("--D", type=int, default=None, help="degree bound (default: max degree)")
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--paper-faithful", dest="paper_faithful", action="store_true", default=True)
    p.add_argument("--no-paper-faithful", dest="paper_faithful", action="store_false")
    p.add_argument("--adaptive-process", action="store_true")
    p.add_argument("--skip-regularize", action="store_true")
    p.add_argument("--retries", type=int, default=20)
    p.add_argument("--restarts", type=int, default=3)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pspark", description="Palette sparsification experiments")
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("trial", help="run one seeded trial")
    _common(t)
    t.add_argument("--c", type=float, default=1.5)
    t.add_argument("--seed", type=int, default=42)
    t.add_argument("--json", help="write the trial record here")
    t.add_argument("--coloring-out", help="write the colouring, one colour per line")

    s = sub.add_parser("sweep", help="success rate over a range of c")
    _common(s)
    s.add_argument("--c-range", default="0.5:2.0:0.1")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0, help="master seed")
    s.add_argument("--out", required=True, help="CSV path")
    s.add_argument("--json", help="also write a JSON summary")
    s.add_argument("--parallel", type=int, default=1)

    v = sub.add_parser("verify", help="check a colouring against a graph")
    v.add_argument("--graph", required=True)
    v.add_argument("--graph-seed", type=int, default=0)
    v.add_argument("--coloring", required=True, help="one colour per line, or a JSON list")
    v.add_argument("--lists", help="JSON list of per-vertex colour lists")
    return ap


def _read_coloring(path: str) -> np.ndarray:
    with open(path) as fh:
        text = fh.read().strip()
    if text.startswith("[") or text.startswith("{"):
        data = json.loads(text)
        data = data["coloring"] if isinstance(data, dict) else data
        return np.asarray(data, dtype=np.int64)
    return np.asarray(text.split(), dtype=np.int64)


def _config(args, c: float, seed: int) -> TrialConfig:
    try:
        return TrialConfig(graph=parse_graph(args.graph, args.graph_seed), c=c, D=args.D,
                           eps=args.eps, seed=seed, paper_faithful=args.paper_faithful,
                           adaptive_process=args.adaptive_process,
                           skip_regularize=args.skip_regularize,
                           retries=args.retries, restarts=args.restarts)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _trial(args) -> int:
    cfg = _config(args, args.c, args.seed)
    try:
        r = run_trial(cfg)
    except (ValueError, OSError) as exc:
        raise ConfigError(str(exc)) from exc
    status = "success" if r.success else f"failure ({r.failure_phase})"
    print(f"n={r.n} D={r.D} c={r.c} ell={r.ell} eps={r.eps} seed={r.seed}: {status} "
          f"in {r.wall_time * 1000:.1f} ms")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(dict(r.to_dict(include_coloring=True), config=config_dict(cfg)), fh, indent=2)
    if args.coloring_out and r.coloring is not None:
        np.savetxt(args.coloring_out, r.coloring, fmt="%d")
    return 0


def _sweep(args) -> int:
    if args.trials < 1:
        raise ConfigError("--trials must be >= 1")
    grid = [_config(args, c, 0) for c in parse_range(args.c_range)]
    try:
        summary = run_experiment(grid, args.trials, parallelism=args.parallel,
                                 master_seed=args.seed)
    except (ValueError, OSError) as exc:
        raise ConfigError(str(exc)) from exc
    summary.write_csv(args.out)
    if args.json:
        summary.write_json(args.json)
    for row in summary.rows():
        print(f"c={row['c']:<5} ell={row['ell']:<3} {row['successes']}/{row['trials']}")
    return 0


def _verify(args) -> int:
    try:
        g = generate(parse_graph(args.graph, args.graph_seed))
        colors = _read_coloring(args.coloring)
        lists = None
        if args.lists:
            with open(args.lists) as fh:
                raw = json.load(fh)
            width = 1 + max([int(c) for row in raw for c in row] + colors.tolist() + [0])
            lists = ListAssignment.from_lists(raw, width)
    except (ValueError, OSError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    ok = verify_coloring(g, lists, colors)
    print("valid" if ok else "invalid")
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return {"trial": _trial, "sweep": _sweep, "verify": _verify}[args.command](args)
    except ConfigError as exc:
        print(f"pspark: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
