"""Command line: ``radproj {verify,hunt,stats,construct}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..constructions import generate
from ..geom import space
from .config import (
    ConfigError,
    SweepConfig,
    apply_settings,
    parse_family,
    read_config_file,
    smoke_config,
)
from .report import reports_csv, reports_json, rows_csv, write_text
from .runner import STATS_COLUMNS, default_hunt_config, run_hunt, run_stats, run_verify


def _shared(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value file (or JSON object)")
    parser.add_argument("--p", help="characteristic(s), comma separated")
    parser.add_argument("--e", help="extension degree(s), comma separated")
    parser.add_argument("--d", help="dimension(s), comma separated")
    parser.add_argument("--family", action="append", help="family, e.g. random(n=5:20); repeatable")
    parser.add_argument("--theorem", help="comma separated theorem selection")
    parser.add_argument("--size", type=int, help="set size n for random/collinear families")
    parser.add_argument("--M", help="comma separated M grid")
    parser.add_argument("--C", help="comma separated C grid, rationals like 3/2")
    parser.add_argument("--k", help="comma separated subspace / conjecture dimension(s)")
    parser.add_argument("--trials", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--jobs", type=int)
    parser.add_argument("--out", help="output path ('-' for stdout)")
    parser.add_argument("--format", choices=["json", "csv"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radproj", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="check bounds and identities over a sweep grid")
    _shared(verify)
    verify.add_argument("--smoke", action="store_true", help="start from the built-in smoke config")

    hunt = sub.add_parser("hunt", help="search for sets with too many low-projection centers")
    _shared(hunt)
    hunt.add_argument("--checkpoint", help="completed-cell log (default OUT.ckpt)")

    stats = sub.add_parser("stats", help="rich-line and exceptional-set statistics (CSV)")
    _shared(stats)
    stats.add_argument("--k-lo", type=int, dest="k_lo")
    stats.add_argument("--k-hi", type=int, dest="k_hi")

    construct = sub.add_parser("construct", help="write one family member as a point-set file")
    _shared(construct)
    construct.add_argument("--m", type=int, help="number of lines for concurrent_lines")
    return parser


def _settings(args: argparse.Namespace) -> dict:
    settings = read_config_file(args.config) if args.config else {}
    ps = args.p.split(",") if args.p else None
    es = args.e.split(",") if args.e else None
    if ps or es:
        if not ps:
            raise ConfigError("--e needs --p")
        es = es or ["1"]
        settings["fields"] = [f"{p.strip()}^{e.strip()}" for p in ps for e in es]
    cli = {
        "dims": args.d,
        "families": args.family,
        "theorems": args.theorem,
        "M": args.M,
        "C": args.C,
        "k": args.k,
        "trials": args.trials,
        "seed": args.seed,
        "jobs": args.jobs,
        "out": args.out,
        "format": args.format,
        "k_lo": getattr(args, "k_lo", None),
        "k_hi": getattr(args, "k_hi", None),
    }
    settings.update({k: v for k, v in cli.items() if v is not None})
    return settings


def _apply_size(cfg: SweepConfig, size: int | None, m: int | None = None, k: list[int] | None = None):
    fams = []
    for fam in cfg.families:
        params = dict(fam.params)
        if size is not None and fam.kind in ("random", "collinear"):
            params["n"] = size
        if m is not None and fam.kind == "concurrent_lines":
            params["m"] = m
        if k and fam.kind == "subspace" and "k" not in params:
            params["k"] = k[0]
        fams.append(type(fam)(fam.kind, params))
    cfg.families = fams


def cmd_verify(args) -> int:
    cfg = smoke_config() if args.smoke else SweepConfig()
    apply_settings(cfg, _settings(args))
    _apply_size(cfg, args.size)
    result = run_verify(cfg)
    text = reports_json(result.reports, result.manifest) if cfg.format == "json" else reports_csv(
        result.reports, result.manifest
    )
    write_text(cfg.out, text)
    if cfg.out and cfg.out != "-":
        Path(cfg.out + ".manifest.json").write_text(json.dumps(result.manifest, indent=1) + "\n")
    counts = {}
    for r in result.reports:
        counts[r.holds] = counts.get(r.holds, 0) + 1
    print(f"verify: {len(result.reports)} reports {counts}", file=sys.stderr)
    for r in result.failures[:20]:
        print(f"  FAIL {r.theorem} q={r.q} d={r.d} |E|={r.size_e} M={r.M} C={r.C} "
              f"measured={r.measured} bound={r.bound} seed={r.seed}", file=sys.stderr)
    return result.exit_code


def cmd_hunt(args) -> int:
    cfg = default_hunt_config()
    apply_settings(cfg, _settings(args))
    _apply_size(cfg, args.size)
    out = cfg.out or "witnesses.jsonl"
    summary = run_hunt(cfg, out, args.checkpoint)
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_stats(args) -> int:
    cfg = SweepConfig(fields=[(13, 1)], families=[parse_family("random(n=40)")], M=[5], trials=1)
    apply_settings(cfg, _settings(args))
    _apply_size(cfg, args.size)
    rows = run_stats(cfg)
    write_text(cfg.out, rows_csv(rows, STATS_COLUMNS, cfg.digest()))
    return 0


def cmd_construct(args) -> int:
    cfg = SweepConfig(trials=1)
    apply_settings(cfg, _settings(args))
    _apply_size(cfg, args.size, args.m, cfg.k)
    if len(cfg.fields) != 1 or len(cfg.dims) != 1 or len(cfg.families) != 1:
        raise ConfigError("construct needs exactly one field, dimension and family")
    (p, e), d = cfg.fields[0], cfg.dims[0]
    sp = space(p, e, d)
    E = generate(sp, cfg.families[0], cfg.seed)
    if args.format == "json":
        doc = {
            "field": sp.field.to_json(),
            "d": d,
            "family": cfg.families[0].label(),
            "seed": cfg.seed,
            "points": [list(pt) for pt in E],
            "packed": E.to_json(),
        }
        write_text(cfg.out, json.dumps(doc) + "\n")
    else:
        write_text(cfg.out, E.to_text())
    return 0


COMMANDS = {"verify": cmd_verify, "hunt": cmd_hunt, "stats": cmd_stats, "construct": cmd_construct}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"radproj: config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
