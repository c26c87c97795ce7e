"""Command-line driver: ``contextsim {table1,chsh,curve,facets,squeeze}``.

Angles are read in degrees unless ``--radians`` is given.  Exit codes: 0 on
success, 2 on usage or validation errors, 3 when ``table1 --check`` finds a
mismatch against the golden table.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

from contextsim import polytope, protocol
from contextsim.plasticity import EllipseShape, squeezed_adaptive_estimate

SEED_ENV = "CONTEXTSIM_SEED"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISMATCH = 3

CURVE_FIELDS = ["theta", "mean", "stderr", "n", "analytic"]
TABLE1_FIELDS = ["x", "A", "Ap", "B", "Bp",
                 "na_AB", "na_ABp", "na_ApB", "na_ApBp", "na_chsh",
                 "ad_AB", "ad_ABp", "ad_ApB", "ad_ApBp", "ad_chsh"]
CHSH_FIELDS = ["protocol", "mean", "stderr", "n", "analytic", "cobits_total", "bits_total"]


class UsageError(Exception):
    pass


class CheckMismatch(Exception):
    pass


# --- parsing --------------------------------------------------------------------

def parse_angle(token: str, radians: bool) -> float:
    """Angle token to radians; degree values map to exact multiples of pi."""
    token = token.strip()
    try:
        if radians:
            value = float(token)
        else:
            frac = Fraction(token) / 180
            value = math.pi * frac.numerator / frac.denominator
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse angle {token!r}") from None
    if not math.isfinite(value):
        raise UsageError(f"angle must be finite, got {token!r}")
    return value


def parse_number_list(text: str) -> list[str]:
    return [t for t in (p.strip() for p in text.split(",")) if t]


def parse_grid(text: str) -> list[Fraction]:
    """``start,stop,num`` to num evenly spaced exact values (num >= 1)."""
    parts = parse_number_list(text)
    if len(parts) != 3:
        raise UsageError(f"grid must be START,STOP,NUM, got {text!r}")
    try:
        start, stop, num = Fraction(parts[0]), Fraction(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}") from None
    if num < 1:
        raise UsageError("grid needs at least one point")
    if num == 1:
        return [start]
    step = (stop - start) / (num - 1)
    return [start + k * step for k in range(num)]


def read_x_file(path: Path) -> list[str]:
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read x file: {exc}") from None
    xs = []
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        try:
            value = float(text)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: not a number: {text!r}") from None
        if not (math.isfinite(value) and -1.0 <= value <= 1.0):
            raise UsageError(f"{path}:{lineno}: breaking point {text} outside [-1, 1]")
        xs.append(text)
    return xs


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


# --- output ---------------------------------------------------------------------

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render(rows: list[dict], fields: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([_cell(row[k]) for k in fields])
    return buf.getvalue()


def emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text)


def _sign(v: int) -> str:
    return "+" if v > 0 else "-"


# --- subcommands ----------------------------------------------------------------

def golden_rows(path: Path | None = None) -> list[dict]:
    if path is None:
        text = resources.files("contextsim").joinpath("data/table1_golden.csv").read_text()
    else:
        text = Path(path).read_text()
    return list(csv.DictReader(io.StringIO(text)))


def table_row_dict(row: protocol.TableRow, fmt: str) -> dict:
    signs = list(row.outcomes) + list(row.nonadaptive) + list(row.adaptive)
    cells = signs if fmt == "json" else [_sign(v) for v in signs]
    out = {"x": row.x}
    out.update(zip(TABLE1_FIELDS[1:9], cells[:8]))
    out["na_chsh"] = row.nonadaptive_chsh
    out.update(zip(TABLE1_FIELDS[10:14], cells[8:]))
    out["ad_chsh"] = row.adaptive_chsh
    return out


def check_against_golden(rows: list[protocol.TableRow], golden: list[dict]) -> list[str]:
    problems = []
    if len(rows) != len(golden):
        problems.append(f"row count {len(rows)} != golden {len(golden)}")
    for i, (row, ref) in enumerate(zip(rows, golden), start=1):
        mine = table_row_dict(row, "csv")
        for key in TABLE1_FIELDS[1:]:
            if str(mine[key]) != ref[key].strip():
                problems.append(f"row {i} (x={row.x}): {key} = {mine[key]}, golden {ref[key].strip()}")
    return problems


def cmd_table1(args) -> int:
    if args.builtin_paper_rows:
        xs = list(protocol.PRINTED_TABLE1_X)
    elif args.x_file is not None:
        xs = read_x_file(args.x_file)
    else:
        raise UsageError("table1 needs --builtin-paper-rows or --x-file")
    rows = protocol.reproduce_table1(xs)
    emit(render([table_row_dict(r, args.format) for r in rows], TABLE1_FIELDS, args.format), args.output)
    if args.check:
        problems = check_against_golden(rows, golden_rows(args.golden))
        if problems:
            for p in problems:
                print(f"check: {p}", file=sys.stderr)
            raise CheckMismatch()
    return EXIT_OK


def parse_settings(text: str, radians: bool) -> protocol.SettingsQuad:
    parts = parse_number_list(text)
    if len(parts) != 4:
        raise UsageError(f"--settings needs four angles, got {text!r}")
    return protocol.SettingsQuad(*(parse_angle(p, radians) for p in parts))


def cmd_chsh(args) -> int:
    settings = parse_settings(args.settings, args.radians) if args.settings else protocol.CANONICAL_SETTINGS
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    est, ledger = protocol.estimate_chsh(
        args.protocol, settings, args.trials, resolve_seed(args.seed), workers=args.workers,
        orientation=args.orientation, fresh_shares=args.fresh_shares,
    )
    row = {"protocol": args.protocol, "mean": est.mean, "stderr": est.stderr, "n": est.n,
           "analytic": est.analytic, "cobits_total": ledger.cobits_total, "bits_total": ledger.bits_total}
    if args.format == "json":
        emit(json.dumps(row, indent=2) + "\n", args.output)
    else:
        emit(render([row], CHSH_FIELDS, "csv"), args.output)
    return EXIT_OK


def _theta_values(args) -> list[str]:
    if args.thetas:
        return parse_number_list(args.thetas)
    grid = args.grid or ("0,3.141592653589793,19" if args.radians else "0,180,19")
    return [str(v) for v in parse_grid(grid)]


def cmd_curve(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    tokens = _theta_values(args)
    if not tokens:
        raise UsageError("theta grid is empty")
    thetas = [parse_angle(t, args.radians) for t in tokens]
    if args.model in protocol.BOUNDED_MODELS:
        for tok, th in zip(tokens, thetas):
            if not 0.0 <= th <= math.pi:
                raise UsageError(f"theta {tok} outside the {args.model} domain [0, 180] degrees")
    ests = protocol.estimate_curve(args.model, thetas, args.trials, resolve_seed(args.seed), workers=args.workers)
    rows = [{"theta": float(Fraction(tok)) if not args.radians else float(tok), "mean": e.mean,
             "stderr": e.stderr, "n": e.n, "analytic": e.analytic} for tok, e in zip(tokens, ests)]
    emit(render(rows, CURVE_FIELDS, args.format), args.output)
    return EXIT_OK


def cmd_facets(args) -> int:
    points = polytope.raw_vertices() if args.coords == "raw" else polytope.product_vertices()
    facets = polytope.enumerate_facets(points)
    if args.format == "json":
        text = json.dumps([{"coeffs": list(f.coeffs), "rhs": f.rhs} for f in facets], indent=2) + "\n"
    else:
        text = polytope.format_facets(facets)
    emit(text, args.output)
    return EXIT_OK


def cmd_squeeze(args) -> int:
    if not (math.isfinite(args.minor) and args.minor > 0 and math.isfinite(args.major) and args.major > 0):
        raise UsageError(f"--minor and --major must be positive, got {args.minor}, {args.major}")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    shape = EllipseShape(args.minor, args.major)
    fracs = parse_number_list(args.fractions) if args.fractions else [str(v) for v in parse_grid(args.grid)]
    seed = resolve_seed(args.seed)
    rows = []
    for k, tok in enumerate(fracs):
        t = float(Fraction(tok))
        if not 0.0 <= t <= 0.5:
            raise UsageError(f"fraction {tok} outside [0, 0.5]")
        est = squeezed_adaptive_estimate(shape, t, args.trials, seed, workers=args.workers, tag=f"squeeze/{k}")
        rows.append({"a": shape.a, "b": shape.b, "theta": t, "mean": est.mean, "stderr": est.stderr,
                     "n": est.n, "analytic": est.analytic})
    emit(render(rows, ["a", "b"] + CURVE_FIELDS, args.format), args.output)
    return EXIT_OK


# --- argument parser --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", type=Path, default=None, help="write here instead of stdout")
    common.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or 0")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--radians", action="store_true", help="read angles in radians (default degrees)")

    parser = argparse.ArgumentParser(prog="contextsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table1", parents=[common], help="valuation table of the band model")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--builtin-paper-rows", action="store_true", help="use the 20 published breaking points")
    src.add_argument("--x-file", type=Path, help="one breaking point per line")
    p.add_argument("--check", action="store_true", help="compare signs and CHSH values with the golden table")
    p.add_argument("--golden", type=Path, default=None, help="alternative golden CSV for --check")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("chsh", parents=[common], help="Monte Carlo CHSH sum")
    p.add_argument("--protocol", choices=("nonadaptive", "adaptive"), required=True)
    p.add_argument("--settings", default=None, help="alpha,alpha',beta,beta' (default 0,90,45,-45)")
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--orientation", choices=("fixed", "uniform"), default="fixed")
    p.add_argument("--fresh-shares", action="store_true", help="experimental: new share per adaptive term")
    p.set_defaults(func=cmd_chsh)

    p = sub.add_parser("curve", parents=[common], help="correlation curve sweep")
    p.add_argument("--model", choices=protocol.CURVE_MODELS, required=True)
    p.add_argument("--thetas", default=None, help="comma-separated angles")
    p.add_argument("--grid", default=None, help="START,STOP,NUM (default 0,180,19)")
    p.add_argument("--trials", type=int, default=100_000)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("facets", parents=[common], help="facets of the CHSH correlation polytope")
    p.add_argument("--coords", choices=("raw", "product"), required=True)
    p.set_defaults(func=cmd_facets)

    p = sub.add_parser("squeeze", parents=[common], help="deformed band correlation curve")
    p.add_argument("--minor", type=float, required=True, help="horizontal semi-axis a")
    p.add_argument("--major", type=float, required=True, help="vertical semi-axis b")
    p.add_argument("--fractions", default=None, help="comma-separated arc-length fractions in [0, 0.5]")
    p.add_argument("--grid", default="0,1/2,21", help="START,STOP,NUM over fractions")
    p.add_argument("--trials", type=int, default=100_000)
    p.set_defaults(func=cmd_squeeze)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "workers", 1) < 1:
        print("contextsim: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"contextsim {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CheckMismatch:
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
