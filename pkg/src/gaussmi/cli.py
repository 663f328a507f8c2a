"""Command-line front end: ``sweep``, ``figure``, ``verify`` and ``optimize``.

Settings come from three places, later ones winning: built-in defaults, a JSON
file given with ``--config`` (keys are flag names with underscores, e.g.
``"n_max"``), and flags on the command line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import formulas, optimize, schemes, verification

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2

DEFAULTS = {
    "schemes": ",".join(schemes.SCHEME_IDS),
    "n_min": 0.0,
    "n_max": 10.0,
    "n_points": 21,
    "gains": "1",
    "base": "bits",
    "out": None,
    "seed": 2024,
    "samples": 200_000,
    "threads": os.cpu_count() or 1,
    "tolerance": 1e-9,
}

FIGURE_N = np.linspace(0.0, 10.0, 101)
FIGURE_GAINS = np.linspace(1.0, 100.0, 199)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(value) -> str:
    if value is None:
        return "inf"
    if isinstance(value, str):
        return value
    return format(float(value), ".12g")


def write_csv(path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    if path is None or path == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(buf.getvalue())


def _split(text, convert=str):
    if isinstance(text, (list, tuple)):
        items = list(text)
    else:
        items = [t for t in str(text).split(",") if t.strip()]
    try:
        return [convert(str(t).strip()) for t in items]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _settings(args) -> dict:
    config = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        unknown = set(config) - set(DEFAULTS) - {"figure", "corrupt_convention"}
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    merged = dict(DEFAULTS)
    merged.update(config)
    for key, value in vars(args).items():
        if value is not None and key not in ("command", "config"):
            merged[key] = value
    return merged


def _scheme_list(settings) -> list[str]:
    ids = _split(settings["schemes"])
    unknown = [s for s in ids if s not in schemes.SCHEME_IDS]
    if unknown or not ids:
        raise UsageError(f"unknown scheme id(s): {', '.join(unknown) or '(none)'}; "
                         f"known: {', '.join(schemes.SCHEME_IDS)}")
    return ids


def _n_grid(settings) -> np.ndarray:
    lo, hi, pts = float(settings["n_min"]), float(settings["n_max"]), int(settings["n_points"])
    if pts < 1 or lo < 0 or hi < lo:
        raise UsageError("n grid needs n_points >= 1 and 0 <= n_min <= n_max")
    return np.linspace(lo, hi, pts)


def _gains(settings) -> list[float]:
    gains = _split(settings["gains"], float)
    if not gains or min(gains) < 1:
        raise UsageError("gains must be a non-empty list of values >= 1")
    return gains


def _log_base(settings) -> tuple[float, str]:
    base = settings["base"]
    if base == "bits":
        return 2.0, "bits"
    if base == "nats":
        return math.e, "nats"
    raise UsageError(f"base must be 'bits' or 'nats', got {base!r}")


def _pool_map(fn, items, threads):
    if threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def cmd_sweep(settings) -> int:
    ids = sorted(_scheme_list(settings))
    n_grid = _n_grid(settings)
    gains = sorted(_gains(settings))
    log_base, unit = _log_base(settings)
    tasks = [(sid, float(n), g) for sid in ids for n in n_grid for g in gains]

    def run(task):
        sid, n, g = task
        engine = schemes.scheme_mi(sid, n, g, log_base=log_base)
        closed = formulas.formula_mi(sid, n, g, log_base)
        return sid, n, g, engine, closed, abs(engine - closed)

    rows = _pool_map(run, tasks, int(settings["threads"]))
    header = ["scheme", "n", "g", f"mi_{unit}", f"mi_formula_{unit}", "abs_diff"]
    write_csv(settings["out"], header, rows)
    return EXIT_OK


def figure_rows(name: str, log_base: float = 2.0):
    if name == "fig2":
        ids = ("2d_coh_2", "epr_disp_2", "conj_coh_2", "epr_conj_2")
        header = ["n", "eq9", "eq13", "eq14", "eq15"]
        rows = [[n] + [schemes.scheme_mi(s, n, log_base=log_base) for s in ids] for n in FIGURE_N]
        return header, rows
    if name == "fig3":
        header = ["n", "eq9", "eq15", "eq10_g1", "eq10_ginf", "eq11_g1", "eq11_ginf"]
        rows = []
        for n in FIGURE_N:
            rows.append([
                n,
                schemes.scheme_mi("2d_coh_2", n, log_base=log_base),
                schemes.scheme_mi("epr_conj_2", n, log_base=log_base),
                schemes.scheme_mi("1d_coh_2", n, log_base=log_base),
                formulas.high_gain_limit("1d_coh_2", n, log_base),
                schemes.scheme_mi("1d_sq_2", n, log_base=log_base),
                formulas.high_gain_limit("1d_sq_2", n, log_base),
            ])
        return header, rows
    if name == "figA1":
        curve = optimize.threshold_curve(FIGURE_GAINS)
        variants = optimize.THRESHOLD_VARIANTS
        header = ["g"] + list(variants) + [f"{v}_asymptote" for v in variants]
        rows = []
        for i, g in enumerate(curve.gains):
            rows.append([g] + [curve.thresholds[v][i] for v in variants]
                        + [curve.constants[v] / g for v in variants])
        return header, rows
    raise UsageError(f"unknown figure {name!r}; choose fig2, fig3 or figA1")


def cmd_figure(settings) -> int:
    name = settings.get("figure")
    log_base, _ = _log_base(settings)
    header, rows = figure_rows(name, log_base)
    out = settings["out"] or f"{name}.csv"
    write_csv(out, header, rows)
    return EXIT_OK


def cmd_verify(settings) -> int:
    results = verification.run_checks(
        tolerance=float(settings["tolerance"]),
        samples=int(settings["samples"]),
        seed=int(settings["seed"]),
        threads=int(settings["threads"]),
        corrupt=bool(settings.get("corrupt_convention")),
    )
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name:<{width}}  observed: {r.observed}  expected: {r.expected}")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_optimize(settings) -> int:
    ids = [s for s in sorted(_scheme_list(settings)) if s in schemes.FREE_VARIANCE]
    if not ids:
        raise UsageError(f"optimize needs schemes with a free variance: {', '.join(schemes.FREE_VARIANCE)}")
    n_grid = [n for n in _n_grid(settings) if n > 0]
    gains = sorted(_gains(settings))
    log_base, unit = _log_base(settings)
    tasks = [(sid, float(n), g) for sid in ids for n in n_grid for g in gains]

    def run(task):
        sid, n, g = task
        res = optimize.maximize_variance(sid, n, g)
        return (sid, n, g, res.variance, res.mi / math.log2(log_base),
                formulas.optimal_variance(sid, n, g), formulas.formula_mi(sid, n, g, log_base))

    rows = _pool_map(run, tasks, int(settings["threads"]))
    header = ["scheme", "n", "g", "variance", f"mi_{unit}", "formula_variance", f"mi_formula_{unit}"]
    write_csv(settings["out"], header, rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gaussmi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, grid=True):
        p.add_argument("--config", help="JSON file with default settings")
        p.add_argument("--base", choices=("bits", "nats"))
        p.add_argument("--out", help="output CSV path ('-' for stdout)")
        p.add_argument("--threads", type=int)
        if grid:
            p.add_argument("--schemes", help="comma-separated scheme ids")
            p.add_argument("--n-min", dest="n_min", type=float)
            p.add_argument("--n-max", dest="n_max", type=float)
            p.add_argument("--n-points", dest="n_points", type=int)
            p.add_argument("--gains", help="comma-separated gains >= 1")

    common(sub.add_parser("sweep", help="engine and closed-form MI over an (n, g) grid"))
    fig = sub.add_parser("figure", help="CSV data for the fig2, fig3 and figA1 curves")
    fig.add_argument("figure", choices=("fig2", "fig3", "figA1"))
    common(fig, grid=False)
    ver = sub.add_parser("verify", help="run the invariant suite")
    ver.add_argument("--config")
    ver.add_argument("--tolerance", type=float)
    ver.add_argument("--seed", type=int)
    ver.add_argument("--samples", type=int)
    ver.add_argument("--threads", type=int)
    ver.add_argument("--corrupt-convention", dest="corrupt_convention", action="store_true",
                     default=None, help="drop the idler conjugation in the amplifier (harness self-test)")
    common(sub.add_parser("optimize", help="golden-section search of free variances"))
    return parser


COMMANDS = {"sweep": cmd_sweep, "figure": cmd_figure, "verify": cmd_verify, "optimize": cmd_optimize}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = _settings(args)
        return COMMANDS[args.command](settings)
    except UsageError as exc:
        print(f"gaussmi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
