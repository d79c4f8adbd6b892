"""Command-line entry point: ``atomlaser {run,sweep,criteria,validate,gnuplot}``.

Exit codes: 0 ok, 2 invalid config, 3 truncation too small, 4 solver failure,
5 file-system error.  On failure a JSON error record goes to stderr and, when
an output directory is known, to ``<out>/error.json``.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .artifacts import read_csv, write_gnuplot, write_json
from .config import load_config
from .errors import AtomLaserError, ConfigInvalid
from .runner import criteria_for, manifest, run_scenario, sweep_threshold

OUT_ENV = "ATOMLASER_OUT"
EXIT_IO = 5


def _parser():
    ap = argparse.ArgumentParser(prog="atomlaser", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, out=True):
        p.add_argument("config", type=Path)
        if out:
            p.add_argument("--out", type=Path, default=None,
                           help=f"output directory (default ${OUT_ENV} or ./atomlaser-out)")
        p.add_argument("--dim-cap", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--seed", type=int)

    common(sub.add_parser("run", help="compute the artifacts listed under outputs"))
    sw = sub.add_parser("sweep", help="generic laser statistics across theta")
    common(sw)
    sw.add_argument("--theta", required=True,
                    help="comma-separated threshold parameters, e.g. 0.5,1,2")
    common(sub.add_parser("criteria", help="print the laser-criteria report as JSON"), out=False)
    common(sub.add_parser("validate", help="check a config without computing"), out=False)
    gp = sub.add_parser("gnuplot", help="convert a CSV artifact to a whitespace-separated .dat file")
    gp.add_argument("csv", type=Path)
    gp.add_argument("--out", type=Path, default=None, help="default: the CSV path with .dat suffix")
    return ap


def _apply_overrides(cfg, args):
    for key in ("dim_cap", "workers", "seed"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    return cfg


def _parse_thetas(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigInvalid(f"bad --theta list {text!r}") from exc


def _fail(kind, code, message, out):
    record = {"status": "error", "kind": kind, "exit_code": code, "message": message}
    print(json.dumps(record), file=sys.stderr)
    if out is not None:
        try:
            out.mkdir(parents=True, exist_ok=True)
            write_json(out / "error.json", {**manifest(None, "error", 0.0), "error": record})
        except OSError:
            pass
    return code


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "gnuplot":
        try:
            print(write_gnuplot(args.out or args.csv.with_suffix(".dat"), read_csv(args.csv)))
        except OSError as exc:
            return _fail(type(exc).__name__, EXIT_IO, str(exc), None)
        return 0
    out = None
    if hasattr(args, "out"):
        out = args.out or Path(os.environ.get(OUT_ENV, "atomlaser-out"))
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        if args.command == "validate":
            print(json.dumps({"status": "ok", "model": cfg.model, "dims": list(cfg.dims),
                              "outputs": list(cfg.outputs)}))
        elif args.command == "criteria":
            print(json.dumps(criteria_for(cfg).to_dict(), indent=2, default=str))
        elif args.command == "run":
            for path in run_scenario(cfg, out):
                print(path)
        elif args.command == "sweep":
            print(sweep_threshold(cfg, _parse_thetas(args.theta), out))
    except AtomLaserError as exc:
        return _fail(type(exc).__name__, exc.exit_code, str(exc), out)
    except OSError as exc:
        return _fail(type(exc).__name__, EXIT_IO, str(exc), None)
    return 0


if __name__ == "__main__":
    sys.exit(main())
