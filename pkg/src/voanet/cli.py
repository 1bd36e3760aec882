"""Command-line batch driver.

    voanet run --config run.toml [--out DIR] [--format json|csv|both] [--threads N]
    voanet list-models
    voanet validate-config --config run.toml

Exit codes: 0 success, 1 a check failed, 2 usage or config error,
3 internal error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .config import ConfigError, RunConfig, list_models, load_config
from .models import build_model
from .report import SCHEMA_VERSION, csv_rows, dumps
from .scalar import format_scalar
from .suites import resolve_field, run_suite

log = logging.getLogger("voanet")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2, 3


def _fields_used(cfg: RunConfig):
    for suite in cfg.suites:
        p = cfg.params[suite]
        if "field" in p:
            yield f"{suite}.field", p["field"]
        for i, pair in enumerate(p.get("locality") or []):
            yield f"{suite}.locality[{i}].a", pair["a"]
            yield f"{suite}.locality[{i}].b", pair["b"]


def execute(cfg: RunConfig, threads: int = 1):
    """Build the model and run every suite; returns (report, timings, results)."""
    model = build_model(cfg.model)
    for name, value in _fields_used(cfg):
        try:
            resolve_field(model, value)
        except ValueError as exc:
            raise ConfigError(name, str(exc)) from exc
    workers = threads if threads > 0 else (os.cpu_count() or 1)

    def timed(suite):
        t0 = time.perf_counter()
        res = run_suite(suite, model, cfg.params[suite])
        return res, time.perf_counter() - t0

    if workers == 1 or len(cfg.suites) == 1:
        outcomes = [timed(s) for s in cfg.suites]
    else:
        with ThreadPoolExecutor(max_workers=min(workers, len(cfg.suites))) as pool:
            outcomes = list(pool.map(timed, cfg.suites))
    results = [r for r, _ in outcomes]
    timings = {r.name: t for r, t in outcomes}
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "voanet", "version": __version__},
        "config": cfg.echo(),
        "model": {**model.describe(), "central_charge": format_scalar(model.central_charge),
                  "dims": model.dims()},
        "suites": {r.name: {"passed": r.passed, **r.data} for r in results},
        "passed": all(r.passed is not False for r in results),
    }
    return report, timings, results


def write_outputs(cfg: RunConfig, report: dict, timings: dict, results: list, formats) -> list:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in formats:
        (out / "report.json").write_text(dumps(report), encoding="utf-8")
        written.append(out / "report.json")
    if "csv" in formats:
        for r in results:
            for stem, (header, rows) in sorted(r.csv.items()):
                (out / f"{stem}.csv").write_text(csv_rows(header, rows), encoding="utf-8")
                written.append(out / f"{stem}.csv")
    # wall-clock times differ run to run, so they live beside the report
    (out / "timings.json").write_text(dumps({"seconds": timings}), encoding="utf-8")
    written.append(out / "timings.json")
    return written


def _formats(flag: str | None, cfg: RunConfig):
    if flag is None:
        return cfg.formats
    return ("json", "csv") if flag == "both" else (flag,)


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
        if args.out:
            cfg.out_dir = Path(args.out)
        report, timings, results = execute(cfg, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception:  # noqa: BLE001 - reported as an internal error
        traceback.print_exc()
        return EXIT_INTERNAL
    write_outputs(cfg, report, timings, results, _formats(args.format, cfg))
    for r in results:
        status = {True: "pass", False: "FAIL", None: "info"}[r.passed]
        print(f"{r.name}: {status} ({timings[r.name]:.2f} s)")
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_list_models(args) -> int:
    sys.stdout.write(dumps(list_models()))
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(dumps(cfg.echo()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="voanet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"voanet {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)
    run = sub.add_parser("run", help="run the suites of a config and write reports")
    run.add_argument("--config", required=True, metavar="PATH")
    run.add_argument("--out", metavar="DIR", help="output directory (overrides output.dir)")
    run.add_argument("--format", choices=("json", "csv", "both"))
    run.add_argument("--threads", type=int, default=1, metavar="N", help="0 = one per CPU")
    run.set_defaults(func=cmd_run)
    lm = sub.add_parser("list-models", help="print supported model kinds and suite parameters")
    lm.set_defaults(func=cmd_list_models)
    vc = sub.add_parser("validate-config", help="check a config and print its normalized form")
    vc.add_argument("--config", required=True, metavar="PATH")
    vc.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 0) < 0:
        print("--threads must be >= 0", file=sys.stderr)
        return EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
