"""Command-line entry point.

Every subcommand accepts ``--config FILE`` holding flat ``key=value`` lines
whose keys are flag names (``trials=20000``, ``noise=g2=0.017,eta=0.011``).
Flags given on the command line win over the file, the file wins over
built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from . import explore, fixtures
from .errors import BosonBunchError, ParseError
from .gram import (
    Gram3Params,
    GramMatrix,
    StatePrepParams,
    gram_from_params,
    gram_from_states,
    states_from_prep,
)
from .interference import (
    NonUnitaryWarning,
    PhotonConfig,
    as_distribution,
    bargmann_groups,
    extract_bargmann,
    output_distribution,
)
from .matrices import (
    fourier_matrix,
    read_matrix,
    read_square_matrix,
    sylvester_hadamard,
)
from .noise import (
    DEFAULT_BRIGHTNESS,
    DEFAULT_ETA,
    DEFAULT_G2,
    SourceModel,
    noisy_distribution,
)
from .report import csv_text, key_value_text

SEED_ENV = "BOSONBUNCH_SEED"


class _Parser(argparse.ArgumentParser):
    """Argument errors become ParseError (exit 2, ERROR[parse] prefix)."""

    def error(self, message):
        raise ParseError(f"{self.prog}: {message}")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _floats(text: str, count: int, what: str) -> list[float]:
    parts = [s for s in text.split(",") if s.strip()]
    if len(parts) != count:
        raise ParseError(f"{what} expects {count} comma-separated numbers, got {text!r}")
    try:
        return [float(s) for s in parts]
    except ValueError:
        raise ParseError(f"{what}: cannot parse numbers in {text!r}") from None


def parse_unitary(text: str) -> np.ndarray:
    kind, _, arg = text.partition(":")
    if kind in ("fourier", "hadamard"):
        try:
            n = int(arg)
        except ValueError:
            raise ParseError(f"--unitary {kind}:N needs an integer order, got {arg!r}") from None
        return fourier_matrix(n) if kind == "fourier" else sylvester_hadamard(n)
    if kind == "file":
        return read_matrix(arg)
    if kind == "u3tilde":
        return fixtures.u3tilde()
    raise ParseError(f"unknown --unitary value {text!r}")


def parse_gram(text: str) -> GramMatrix:
    kind, _, arg = text.partition(":")
    if kind == "params":
        d12, d13, d23, phi = _floats(arg, 4, "--gram params")
        return gram_from_params(Gram3Params(d12, d13, d23, phi))
    if kind == "prep":
        alpha, beta, gamma, phi, x = _floats(arg, 5, "--gram prep")
        return gram_from_states(states_from_prep(StatePrepParams(alpha, beta, gamma, phi, x)))
    if kind == "file":
        return GramMatrix.from_matrix(read_square_matrix(arg))
    if kind in ("indistinguishable", "distinguishable"):
        raise ParseError(f"--gram {kind} needs an explicit size; use ones:N or identity:N")
    if kind in ("ones", "identity"):
        try:
            n = int(arg)
        except ValueError:
            raise ParseError(f"--gram {kind}:N needs an integer size, got {arg!r}") from None
        return GramMatrix.ones(n) if kind == "ones" else GramMatrix.identity(n)
    raise ParseError(f"unknown --gram value {text!r}")


def parse_noise(text: str) -> SourceModel:
    values = {"g2": DEFAULT_G2, "brightness": DEFAULT_BRIGHTNESS, "eta": DEFAULT_ETA}
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, sep, val = item.partition("=")
        if not sep or key not in values:
            raise ParseError(f"--noise expects g2=..,eta=..,brightness=.., got {item!r}")
        try:
            values[key] = float(val)
        except ValueError:
            raise ParseError(f"--noise: bad value for {key}: {val!r}") from None
    return SourceModel.from_brightness(values["g2"], values["brightness"], values["eta"])


def read_config(path: str) -> dict[str, str]:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, val = line.partition("=")
            if not sep or not key.strip():
                raise ParseError(f"{path}: line {lineno}: expected key=value")
            out[key.strip().replace("-", "_")] = val.strip()
    return out


def read_distribution_csv(path: str):
    rows = {}
    with open(path) as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader, None)
    if not header or header[-1].strip() != "probability":
        raise ParseError(f"{path}: line 1: expected header n1,..,nm,probability")
    for lineno, cells in enumerate(reader, start=2):
        try:
            occ = tuple(int(c) for c in cells[:-1])
            rows[occ] = float(cells[-1])
        except (ValueError, IndexError):
            raise ParseError(f"{path}: line {lineno}: malformed row {','.join(cells)!r}") from None
        if len(occ) != len(header) - 1:
            raise ParseError(f"{path}: line {lineno}: expected {len(header) - 1} occupation fields")
    if not rows:
        raise ParseError(f"{path}: no distribution rows")
    return as_distribution(rows)


# -- subcommands --------------------------------------------------------------------------


def cmd_distribution(args) -> int:
    u = parse_unitary(args.unitary)
    g = parse_gram(args.gram)
    m = u.shape[0]
    modes = tuple(range(g.dim)) if args.inputs is None else tuple(int(s) for s in args.inputs.split(","))
    cfg = PhotonConfig(modes, m)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonUnitaryWarning)
        if args.noise:
            d = noisy_distribution(u, cfg, g, parse_noise(args.noise), at_least=args.at_least)
        else:
            d = output_distribution(u, cfg, g)
    _write(args.out, d.to_csv())
    return 0


def cmd_scan(args) -> int:
    src = parse_noise(args.noise) if args.noise else None
    table = explore.scan_family(args.kind, args.grid, args.model, src)
    _write(args.out, table.to_csv())
    return 0


def cmd_search(args) -> int:
    report = explore.haar_search(args.n, args.trials, args.seed, args.workers)
    _write(args.out, report.to_text())
    print(f"search n={report.n}: {report.count}/{report.trials} counter-intuitive", file=sys.stderr)
    return 0


def cmd_tables(args) -> int:
    if args.which == "bounds":
        rs = np.linspace(0.0, 1.0, 11)
        phis = np.linspace(0.0, math.pi, 7)
        _write(args.out, csv_text(("r", "phi", "lower", "upper"), explore.bounds_table(rs, phis)))
        return 0
    rows = []
    if args.which == "fourier":
        orders = args.orders or list(range(2, 22))
        rows = explore.fourier_table(orders)
    else:
        orders = args.orders if args.orders is not None else [2, 4, 8, 16]
        rows = explore.sylvester_table(orders)
        rows += explore.hadamard_table(read_matrix(p) for p in args.hadamard_files)
    _write(args.out, explore.table_csv(rows))
    return 0


def cmd_validate(args) -> int:
    rows = fixtures.load_table(args.table)
    src = parse_noise(args.noise) if args.noise else None
    res = fixtures.residual_report(rows, args.model, args.tol, src)
    _write(args.out, fixtures.residual_csv(res))
    passed = sum(r.passed for r in res)
    print(f"validate {args.table} ({args.model}): {passed}/{len(res)} rows within {args.tol}", file=sys.stderr)
    return 0


def cmd_bargmann(args) -> int:
    d = read_distribution_csv(args.dist)
    z = extract_bargmann(d)
    pa, pb, pc = bargmann_groups(d)
    items = [
        ("P_A", pa), ("P_B", pb), ("P_C", pc),
        ("re", z.real), ("im", z.imag), ("modulus", abs(z)), ("phase", math.atan2(z.imag, z.real)),
    ]  # fmt: skip
    _write(args.out, key_value_text(items))
    return 0


def _orders(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bosonbunch", description="Multiphoton bunching with partially distinguishable photons.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", help="flat key=value file; keys are flag names")
        p.add_argument("--out", help="output path (default: standard output)")
        p.set_defaults(func=func)
        return p

    p = add("distribution", cmd_distribution, "exact output distribution as CSV")
    p.add_argument("--unitary", help="fourier:N | hadamard:N | file:PATH | u3tilde")
    p.add_argument("--gram", help="params:d12,d13,d23,phi | prep:alpha,beta,gamma,phi,x | file:PATH | ones:N | identity:N")
    p.add_argument("--inputs", help="comma-separated input modes (default: 0..n-1)")
    p.add_argument("--noise", help="source model, e.g. g2=0.017,eta=0.011,brightness=0.13")
    p.add_argument("--at-least", action="store_true", help="keep events with more than n detected photons")

    p = add("scan", cmd_scan, "state-preparation scans through the tritter")
    p.add_argument("--kind", choices=explore.SCAN_KINDS)
    p.add_argument("--grid", type=int, help="grid points per scanned parameter")
    p.add_argument("--model", choices=("ideal", "noisy"), help="default: ideal")
    p.add_argument("--noise", help="source model for --model noisy")

    p = add("search", cmd_search, "count Haar-random interferometers with a negative bunching gap")
    p.add_argument("--n", type=int, help="number of photons and modes")
    p.add_argument("--trials", type=int, help="number of random unitaries")
    p.add_argument("--seed", type=int, help=f"RNG seed (default: ${SEED_ENV} or 0)")
    p.add_argument("--workers", type=int, help="worker processes (default: 1)")

    p = add("tables", cmd_tables, "antibunching tables and tritter bounds")
    p.add_argument("--which", choices=("fourier", "hadamard", "bounds"))
    p.add_argument("--orders", type=_orders, help="comma-separated orders")
    p.add_argument("--hadamard-files", nargs="*", help="extra Hadamard matrices (matrix file format)")

    p = add("validate", cmd_validate, "compare model predictions with the bundled measured tables")
    p.add_argument("--table", choices=tuple(fixtures.TABLES))
    p.add_argument("--model", choices=("ideal", "noisy"), help="default: ideal")
    p.add_argument("--tol", type=float, help="absolute tolerance (default: 0.05)")
    p.add_argument("--noise", help="source model for --model noisy")

    p = add("bargmann", cmd_bargmann, "extract the Bargmann invariant from a tritter distribution CSV")
    p.add_argument("--dist", help="distribution CSV as written by 'distribution'")
    return parser


DEFAULTS = {
    "distribution": {"noise": None, "inputs": None, "at_least": False},
    "scan": {"grid": None, "model": "ideal", "noise": None},
    "search": {"workers": 1},
    "tables": {"orders": None, "hadamard_files": []},
    "validate": {"model": "ideal", "tol": 0.05, "noise": None},
    "bargmann": {},
}
REQUIRED = {
    "distribution": ("unitary", "gram"),
    "scan": ("kind",),
    "search": ("n", "trials"),
    "tables": ("which",),
    "validate": ("table",),
    "bargmann": ("dist",),
}
CONVERT = {
    "grid": int, "n": int, "trials": int, "seed": int, "workers": int, "tol": float,
    "orders": _orders, "hadamard_files": str.split,
    "at_least": lambda s: s.lower() in ("1", "true", "yes"),
}  # fmt: skip


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset flags from the config file, then from defaults."""
    cmd = args.command
    config = read_config(args.config) if args.config else {}
    defaults = dict(DEFAULTS[cmd])
    if cmd == "search":
        env = os.environ.get(SEED_ENV)
        try:
            defaults["seed"] = int(env) if env else 0
        except ValueError:
            raise ParseError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    known = set(vars(args)) - {"func", "command", "config"}
    for key in config:
        if key not in known:
            raise ParseError(f"{args.config}: unknown key {key!r} for '{cmd}'")
    for key in known:
        if getattr(args, key) not in (None, False):
            continue
        if key in config:
            conv = CONVERT.get(key, str)
            try:
                setattr(args, key, conv(config[key]))
            except ValueError:
                raise ParseError(f"{args.config}: bad value for {key}: {config[key]!r}") from None
        elif key in defaults:
            setattr(args, key, defaults[key])
    for key in REQUIRED[cmd]:
        if getattr(args, key) is None:
            raise ParseError(f"{cmd}: --{key.replace('_', '-')} is required (flag or config key)")
    return args


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(resolve(args))
    except ParseError as exc:
        print(f"ERROR[{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ERROR[io]: {exc}", file=sys.stderr)
        return 2
    except BosonBunchError as exc:
        print(f"ERROR[{exc.code}]: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
