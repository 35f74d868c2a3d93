"""Command-line front end.

Usage examples::

    pplb table --cmax 6 --dmax 6 --limit 1e7
    pplb certify --c-list 0,1,2 --d-list 1,2 --mode strict
    pplb runs --c 1 --d 1 --start 45 --end 55
    pplb verify theorem2 --limit 1_000_000
    pplb count --limit 1e10 --segment-size 16777216

Data goes to ``--output`` (or standard output); the one-line summary goes to
standard output when ``--output`` is set and to standard error otherwise.
``--no-banner`` drops the summary. Exit codes: 0 ok, 2 config error,
3 range/resource error, 4 certification failed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from decimal import Decimal, InvalidOperation

from . import analytic_bounds, postulate_core, sequence_lab
from .errors import ConfigError, PPLBError, RangeError
from .postulate_core import Mode, OffsetSpec
from .prime_engine import DEFAULT_SEGMENT_SIZE, PrimeTable, SieveConfig, count_primes_below

DEFAULT_LIMIT = 10**8
CACHE_ENV = "PPLB_CACHE"
FORMATS = ("csv", "json", "bfile")


def parse_int(text: str) -> int:
    """Integer flag parser accepting ``10_000_000`` and ``1e8`` forms."""
    s = str(text).strip().replace("_", "")
    try:
        value = Decimal(s)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not value.is_finite() or value != value.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def parse_int_list(text: str) -> list[int]:
    try:
        return [parse_int(t) for t in text.split(",") if t.strip()]
    except argparse.ArgumentTypeError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from None


@dataclasses.dataclass
class RunConfig:
    command: str
    limit: int = DEFAULT_LIMIT
    segment_size: int = DEFAULT_SEGMENT_SIZE
    c_list: list[int] | None = None
    d_list: list[int] | None = None
    mode: str = "nonstrict"
    format: str = "csv"
    output: str | None = None
    threads: int = 1
    cache: str | None = None
    options: dict = dataclasses.field(default_factory=dict)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return cls(**data)

    def sieve_config(self) -> SieveConfig:
        return SieveConfig(self.limit, self.segment_size, self.threads)


_COMMAND_OPTIONS = {
    "table": ("cmax", "dmax", "scan_limit_index", "statistic"),
    "certify": ("ceiling",),
    "delta": ("c", "d", "start", "end"),
    "runs": ("c", "d", "start", "end"),
    "survey": ("cmax", "dmax", "scan_limit"),
    "verify": ("check", "n_max", "k"),
    "count": (),
    "cache": (),
}


def _common(p: argparse.ArgumentParser, fmt_default: str = "csv") -> None:
    g = p.add_argument_group("common options")
    g.add_argument("--limit", type=parse_int, default=DEFAULT_LIMIT, help="sieve all primes below this (default 1e8)")
    g.add_argument("--segment-size", type=parse_int, default=DEFAULT_SEGMENT_SIZE, help="bytes per sieve segment")
    g.add_argument("--threads", type=parse_int, default=1, help="sieve worker threads")
    g.add_argument("--cache", default=None, help=f"prime-cache file (default ${CACHE_ENV})")
    g.add_argument("--format", choices=FORMATS, default=fmt_default)
    g.add_argument("-o", "--output", default=None, help="write data here instead of standard output")
    g.add_argument("--no-banner", action="store_true", help="suppress the summary line")
    g.add_argument("--dump-config", action="store_true", help="print the parsed configuration as JSON and exit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pplb", description="Generalized Bertrand-postulate prime-sum tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", help="empirical M(c,d) grid from one pass over the primes")
    p.add_argument("--cmax", type=parse_int, default=6)
    p.add_argument("--dmax", type=parse_int, default=6)
    p.add_argument("--mode", choices=("strict", "nonstrict"), default="nonstrict")
    p.add_argument("--scan-limit-index", type=parse_int, default=None,
                   help="largest n to scan (default: as far as the primes allow)")
    p.add_argument("--statistic", choices=("m", "first-hold"), default="m",
                   help="m: one past the last violation; first-hold: least n where the inequality holds")
    _common(p)

    p = sub.add_parser("certify", help="certified least N for a prime-sum inequality")
    p.add_argument("--c-list", type=parse_int_list, required=True)
    p.add_argument("--d-list", type=parse_int_list, required=True)
    p.add_argument("--mode", choices=("strict", "nonstrict"), default="strict")
    p.add_argument("--ceiling", type=parse_int, default=analytic_bounds.DEFAULT_CEILING)
    _common(p, "json")

    for name, help_ in (("delta", "delta(c,d,n) values"), ("runs", "runs of identical delta values")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--c", type=parse_int, required=True)
        p.add_argument("--d", type=parse_int, required=True)
        p.add_argument("--start", type=parse_int, required=True)
        p.add_argument("--end", type=parse_int, required=True)
        _common(p, "csv" if name == "delta" else "json")

    p = sub.add_parser("survey", help="longest delta run per (c,d)")
    p.add_argument("--cmax", type=parse_int, default=1)
    p.add_argument("--dmax", type=parse_int, default=1)
    p.add_argument("--scan-limit", type=parse_int, required=True, help="largest n to scan")
    _common(p, "json")

    p = sub.add_parser("verify", help="finite checks: loo, shevelev, theorem2, rs-bounds")
    p.add_argument("check", choices=("loo", "shevelev", "theorem2", "rs-bounds"))
    p.add_argument("--n-max", type=parse_int, default=None)
    p.add_argument("--k", type=parse_int, default=None, help="Shevelev k (default: all of 1,2,3,5,9,14)")
    _common(p, "json")

    p = sub.add_parser("count", help="count primes below --limit")
    _common(p, "json")

    p = sub.add_parser("cache", help="write a prime-cache file for --limit to --output")
    _common(p, "json")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=args.command,
        limit=args.limit,
        segment_size=args.segment_size,
        c_list=getattr(args, "c_list", None),
        d_list=getattr(args, "d_list", None),
        mode=getattr(args, "mode", "nonstrict"),
        format=args.format,
        output=args.output,
        threads=args.threads,
        cache=args.cache if args.cache is not None else os.environ.get(CACHE_ENV),
        options={k: getattr(args, k) for k in _COMMAND_OPTIONS[args.command]},
    )
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    """Reject bad combinations before any sieving happens."""
    cfg.sieve_config()
    opts = cfg.options
    if cfg.command == "certify":
        OffsetSpec(cfg.c_list, cfg.d_list, Mode(cfg.mode))
    elif cfg.command == "table":
        if opts["cmax"] < 1 or opts["dmax"] < 1:
            raise ConfigError("--cmax and --dmax must be >= 1")
        if cfg.format == "bfile" and opts["cmax"] != 1:
            raise ConfigError("--format bfile exports a single row; use --cmax 1")
    elif cfg.command in ("delta", "runs"):
        if opts["c"] < 1 or opts["d"] < 1:
            raise ConfigError("--c and --d must be >= 1")
        if opts["start"] < opts["c"] + 1 or opts["end"] < opts["start"]:
            raise ConfigError("need c+1 <= --start <= --end")
    elif cfg.command == "survey":
        if opts["cmax"] < 1 or opts["dmax"] < 1 or opts["scan_limit"] < opts["cmax"] + 1:
            raise ConfigError("bad survey bounds")
    elif cfg.command == "verify":
        if opts["k"] is not None and opts["check"] != "shevelev":
            raise ConfigError("--k only applies to the shevelev check")
    elif cfg.command == "cache" and not cfg.output:
        raise ConfigError("cache needs --output")
    if cfg.format == "bfile" and cfg.command != "table":
        raise ConfigError("--format bfile is only available for table")


def _prime_source(cfg: RunConfig) -> PrimeTable | SieveConfig:
    if cfg.cache and os.path.exists(cfg.cache):
        try:
            return PrimeTable.load(cfg.cache, cfg.limit)
        except RangeError:
            pass  # cache too small; fall back to sieving
    return cfg.sieve_config()


def load_table(cfg: RunConfig) -> PrimeTable:
    source = _prime_source(cfg)
    return source if isinstance(source, PrimeTable) else PrimeTable.from_config(source)


def _csv(rows) -> str:
    return "".join(",".join(str(x) for x in r) + "\n" for r in rows)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def run_table(cfg: RunConfig):
    o = cfg.options
    seen = 0

    def counted(chunks):
        nonlocal seen
        for chunk in chunks:
            seen += len(chunk)
            yield chunk

    source = counted(postulate_core.prime_chunks(_prime_source(cfg)))
    table = postulate_core.threshold_table(o["cmax"], o["dmax"], o["scan_limit_index"], source, Mode(cfg.mode))
    stat = "m_value" if o["statistic"] == "m" else "first_hold_index"
    grid = [[getattr(cell, stat) for cell in row] for row in table]
    if cfg.format == "csv":
        if stat == "m_value":
            text = postulate_core.table_to_csv(table)
        else:
            text = _csv([["c\\d"] + list(range(1, o["dmax"] + 1))] + [[c] + r for c, r in enumerate(grid, 1)])
    elif cfg.format == "json":
        obj = postulate_core.table_to_json_obj(table)
        obj["statistic"] = o["statistic"]
        text = _json(obj)
    else:
        text = sequence_lab.export_sequence(grid[0], "bfile")
    return text, f"table {o['cmax']}x{o['dmax']} ({cfg.mode}): {seen} primes below {cfg.limit} used"


def _count_in(source) -> int:
    if isinstance(source, PrimeTable):
        return len(source)
    return count_primes_below(source.limit, source).count


def run_certify(cfg: RunConfig):
    spec = OffsetSpec(cfg.c_list, cfg.d_list, Mode(cfg.mode))
    cert = analytic_bounds.certified_least_n(spec, load_table(cfg), cfg.options["ceiling"])
    if cfg.format == "csv":
        text = _csv([["n0", "x_star", "certified_least_n"],
                     [cert.n0, cert.derivative_witness_x, cert.certified_least_n]])
    else:
        text = cert.to_json() + "\n"
    return text, f"{spec}: certified for all n >= {cert.certified_least_n} (n0={cert.n0}, x*={cert.derivative_witness_x})"


def run_delta(cfg: RunConfig):
    o = cfg.options
    series = postulate_core.delta_series(o["c"], o["d"], o["start"], o["end"], load_table(cfg))
    ns = range(o["start"], o["end"] + 1)
    if cfg.format == "csv":
        text = _csv([["n", "delta"]] + [[n, v] for n, v in zip(ns, series.values)])
    else:
        text = _json({"c": o["c"], "d": o["d"], "values": [{"n": n, "delta": v} for n, v in zip(ns, series.values)]})
    return text, f"delta({o['c']},{o['d']},n) for n in [{o['start']}, {o['end']}]"


def run_runs(cfg: RunConfig):
    o = cfg.options
    rep = sequence_lab.delta_runs(o["c"], o["d"], o["start"], o["end"], load_table(cfg))
    if cfg.format == "csv":
        text = _csv([["start_index", "length", "value"]] + [list(r) for r in rep.runs])
    else:
        text = _json(rep.to_dict())
    longest = ", ".join(f"value {r.value} at n={r.start_index}" for r in rep.longest())
    return text, f"max run length {rep.max_run_length}: {longest}"


def run_survey(cfg: RunConfig):
    o = cfg.options
    rep = sequence_lab.max_run_survey(o["cmax"], o["dmax"], o["scan_limit"], load_table(cfg))
    rows = [{"c": c, "d": d, **v} for (c, d), v in rep["cells"].items()]
    if cfg.format == "csv":
        text = _csv([["c", "d", "max_run_length", "first_longest_start", "value"]]
                    + [[r["c"], r["d"], r["max_run_length"], r["first_longest_start"], r["value"]] for r in rows])
    else:
        text = _json({"scan_limit": rep["scan_limit"], "overall_max_run_length": rep["overall_max_run_length"], "cells": rows})
    return text, f"overall max run length {rep['overall_max_run_length']} up to n={o['scan_limit']}"


def run_verify(cfg: RunConfig):
    o = cfg.options
    table = load_table(cfg)
    check = o["check"]
    if check == "loo":
        rep = sequence_lab.verify_loo(o["n_max"] or 10**5, table).to_dict()
        summary = f"loo: {rep['checked']} intervals, {len(rep['failures'])} failures"
    elif check == "shevelev":
        ks = [o["k"]] if o["k"] is not None else list(sequence_lab.SHEVELEV_K)
        reports = [sequence_lab.verify_shevelev(k, o["n_max"] or 10**4, table).to_dict() for k in ks]
        rep = {"reports": reports}
        summary = "shevelev: " + ", ".join(f"k={r['k']} {len(r['failures'])} failures" for r in reports)
    elif check == "theorem2":
        rep = sequence_lab.verify_theorem2(table, o["n_max"])
        eq = ",".join(map(str, rep["equalities"])) or "none"
        summary = f"theorem2 up to n={rep['n_max']}: equality only at n={eq}; {len(rep['violations'])} violations"
    else:
        rep = analytic_bounds.check_rs_bounds(table, o["n_max"])
        summary = (f"rs-bounds up to n={rep['n_max']}: lower {len(rep['lower_violations'])} violations, "
                   f"upper {len(rep['upper_violations'])} violations")
    if cfg.format == "csv":
        text = _csv([["summary"], [summary]])
    else:
        text = _json(rep)
    return text, summary


def run_count(cfg: RunConfig):
    source = _prime_source(cfg)
    n = _count_in(source)
    text = _csv([["limit", "count"], [cfg.limit, n]]) if cfg.format == "csv" else _json({"limit": cfg.limit, "count": n})
    return text, f"{n} primes below {cfg.limit}"


def run_cache(cfg: RunConfig):
    table = PrimeTable.from_config(cfg.sieve_config())
    table.save(cfg.output)
    return None, f"wrote {len(table)} primes below {cfg.limit} to {cfg.output}"


COMMANDS = {
    "table": run_table,
    "certify": run_certify,
    "delta": run_delta,
    "runs": run_runs,
    "survey": run_survey,
    "verify": run_verify,
    "count": run_count,
    "cache": run_cache,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.dump_config:
            sys.stdout.write(_json(cfg.to_dict()))
            return 0
        t0 = time.perf_counter()
        text, summary = COMMANDS[cfg.command](cfg)
        elapsed = time.perf_counter() - t0
        if text is not None:
            if cfg.output and cfg.command != "cache":
                with open(cfg.output, "w", newline="\n") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
        if not args.no_banner:
            banner = sys.stdout if cfg.output else sys.stderr
            print(f"{summary} [{elapsed:.2f}s]", file=banner)
        return 0
    except PPLBError as exc:
        print(f"pplb: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
