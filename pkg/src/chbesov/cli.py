"""Command-line driver: ``chbesov <suite> [flags]``.

Configuration precedence: suite defaults < ``--config`` JSON file < flags.
Exit status is 0 when every gate of the suite passes, 1 otherwise, and 2
for invalid arguments.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .experiments import SUITES, resolve_config

PLOT_TEMPLATE = '''"""Plot {experiment} results; run with matplotlib installed."""
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "{csv_name}"
with open(path) as fh:
    rows = list(csv.DictReader(fh))
x = [float(r["{x}"]) for r in rows]
fig, ax = plt.subplots()
for col in {ys!r}:
    ax.plot(x, [float(r[col]) for r in rows], "o-", label=col)
ax.set_xlabel("{x}")
ax.set_xscale("{xscale}")
ax.set_yscale("log")
ax.legend()
fig.savefig("{experiment}.png", dpi=150)
'''

PLOT_AXES = {
    "holder": ("n", ["quotient", "besov_distance"], "linear"),
    "scaling": ("t", ["distance_norm", "remainder_norm"], "log"),
    "lemma31": ("n", ["r_n"], "linear"),
}


def _float(text: str) -> float:
    return float(text)  # accepts "inf"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--s", type=float)
    common.add_argument("--p", type=_float)
    common.add_argument("--r", type=_float)
    common.add_argument("--alpha", type=float)
    common.add_argument("--n-min", type=int, dest="n_min")
    common.add_argument("--n-max", type=int, dest="n_max")
    common.add_argument("--model", help="ch, bfamily:<b> or novikov")
    common.add_argument("--grid-L", type=int, dest="grid_L")
    common.add_argument("--grid-N", type=int, dest="grid_N")
    common.add_argument("--seed", type=int)
    common.add_argument("--case", choices=["high", "low"], help="scaling suite regime")
    common.add_argument("--truncation", choices=["row", "fixed"], help="holder suite data truncation")
    common.add_argument("--workers", type=int)
    common.add_argument("--no-refine", action="store_false", dest="refine", default=None)
    common.add_argument("--config", type=Path, help="flat JSON file of suite keys")
    common.add_argument("--out", type=Path, default=Path("."))
    common.add_argument("--format", choices=["csv", "json"], default="json")
    common.add_argument("--plot", action="store_true", help="also write a matplotlib script")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="chbesov", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="suite", required=True)
    for name in ("cutoffs", "lemma31", "scaling", "holder", "invariants"):
        sub.add_parser(name, parents=[common])
    return parser


_NON_CONFIG = {"suite", "config", "out", "format", "plot", "verbose"}


def _load_config(path: Path | None) -> dict:
    if path is None:
        return {}
    data = json.loads(path.read_text())
    if not isinstance(data, dict) or any(isinstance(v, (dict, list)) for v in data.values()):
        raise ValueError(f"{path}: config must be a flat JSON object")
    return data


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    flags = {k: v for k, v in vars(args).items() if k not in _NON_CONFIG and v is not None}
    try:
        cfg = resolve_config(args.suite, _load_config(args.config))
        cfg = resolve_config(args.suite, cfg, flags)
        report = SUITES[args.suite](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    args.out.mkdir(parents=True, exist_ok=True)
    target = args.out / f"{report.experiment}.{args.format}"
    target.write_text(report.to_json() if args.format == "json" else report.to_csv())
    if args.plot:
        csv_path = args.out / f"{report.experiment}.csv"
        if args.format != "csv":
            csv_path.write_text(report.to_csv())
        x, ys, xscale = PLOT_AXES.get(report.experiment, ("index", ["value"], "linear"))
        (args.out / f"plot_{report.experiment}.py").write_text(PLOT_TEMPLATE.format(
            experiment=report.experiment, csv_name=csv_path.name, x=x, ys=ys, xscale=xscale))
    for line in report.summary_lines():
        print(line)
    print(f"{report.experiment}: {report.status['overall'].upper()} -> {target}")
    return 0 if report.passed else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
