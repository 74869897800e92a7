"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 runtime or numerical error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .backends import BACKENDS
from .config import ConfigError, _build, load_yaml
from .datasets import DatasetError
from .experiments import (OUTPUT_ENV, REGISTRY, DataUnavailable, ExperimentConfig, check_config,
                          load_config, rerun_manifest, run_experiment)
from .learners.readout import TrainingDivergence
from .physics import SimulationError

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def _out_root(arg: str | None) -> Path:
    return Path(arg or os.environ.get(OUTPUT_ENV) or "results")


def cmd_run(args) -> int:
    if args.name not in REGISTRY:
        print(f"error: unknown experiment {args.name!r}; known: {', '.join(REGISTRY)}", file=sys.stderr)
        return EXIT_CONFIG
    overrides = {"seed": args.seed} if args.seed is not None else {}
    cfg = load_config(args.config, overrides)
    out = _out_root(args.out) / args.name
    result, manifest = run_experiment(args.name, cfg, backend=args.backend, jobs=args.jobs, out_dir=out)
    print(json.dumps({"experiment": args.name, "manifest": str(manifest),
                      "metrics": {k: v for k, v in result.metrics.items() if not isinstance(v, list)}},
                     indent=1, default=str))
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        cfg = _build(ExperimentConfig, load_yaml(args.path), "")
    except ConfigError as exc:
        print(f"invalid: {exc}")
        return EXIT_CONFIG
    problems = check_config(cfg)
    for p in problems:
        print(f"invalid: {p}")
    if problems:
        return EXIT_CONFIG
    print(f"{args.path}: valid")
    return EXIT_OK


def cmd_rerun(args) -> int:
    recorded, reproduced = rerun_manifest(args.manifest, args.out)
    same = recorded == reproduced
    print("identical metrics" if same else "metrics differ")
    if not same:
        for k in sorted(set(recorded) | set(reproduced)):
            if recorded.get(k) != reproduced.get(k):
                print(f"  {k}: {recorded.get(k)!r} -> {reproduced.get(k)!r}")
    return EXIT_OK if same else EXIT_RUNTIME


def cmd_list(args) -> int:
    for e in REGISTRY.values():
        print(f"{e.name:20s} [{e.default_backend}] {e.summary}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="floquet-elm", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a named experiment")
    r.add_argument("name", help="experiment name (see 'list')")
    r.add_argument("--config", help="YAML configuration file (defaults apply to omitted keys)")
    r.add_argument("--backend", choices=BACKENDS, help="override the experiment's default backend")
    r.add_argument("--seed", type=int, help="master seed")
    r.add_argument("--jobs", type=int, default=1, help="parallel FDTD runs (default 1)")
    r.add_argument("--out", help=f"output root (default ${OUTPUT_ENV} or ./results)")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("validate-config", help="check a configuration file")
    v.add_argument("path")
    v.set_defaults(func=cmd_validate)

    m = sub.add_parser("rerun", help="repeat a run from its manifest and compare metrics")
    m.add_argument("manifest")
    m.add_argument("--out", help="where to write the repeated run (default: nothing written)")
    m.set_defaults(func=cmd_rerun)

    ls = sub.add_parser("list", help="list experiments")
    ls.set_defaults(func=cmd_list)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SimulationError, TrainingDivergence, DataUnavailable, DatasetError, FloatingPointError,
            RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
