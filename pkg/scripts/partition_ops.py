#!/usr/bin/env python3
"""
Command line for the operation calculus.

Usage:
    python partition_ops.py basis --kind unary -p 2 -j 0 --weights 2 --min-degree -5
    python partition_ops.py basis --kind free -p 2 --gens 1,2 --weights 2
    python partition_ops.py compose -p 2 -j 0 "R2" "R1"
    python partition_ops.py rewrite --kind primal -p 2 "Q5 Q1"
    python partition_ops.py check bm -p 2 --gens 1 --weight-cap 16 --window -30:5
    python partition_ops.py check bar -p 2 -j 1 -W 4
    python partition_ops.py dims --kind free -p 3 --gens 1,2 --weight-cap 9 --pivot

Words are whitespace separated letters, outermost first: R3 R1, bR2, R2 B,
Q5 Q1, Q3* Q1*, Sq2 Sq1, P1 bP1; "1" is the identity.

Degrees are read in homotopy grading; --cohomological negates the degrees
that are printed. Exit codes: 0 success, 1 failed check or algebraic error,
2 usage error.
"""

import argparse
import logging
import os
import sys
from collections import Counter
from typing import Dict, List, Optional, Sequence, Tuple

# Add parent directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from pydantic import ValidationError

from src.algebra.dyer_lashof import primal_adem_rewrite
from src.algebra.errors import DegreeMismatchError, PartitionOpsError, WordSyntaxError
from src.algebra.koszul_dual import normal_form_word
from src.algebra.power_ring import (PowerOp, RWord, compose, normalize_rword, op_basis, r_letter_drop,
                                     r_letter_exists)
from src.algebra.steenrod import PLACEHOLDER, canonicalize, slinear_op_basis, steenrod_adem_rewrite
from src.lie.free_partition_lie import FreePartitionLie, bm_basis, dims
from src.oracles import checks
from src.utils.config import Config, get_settings
from src.utils.output import DimTable, write_report, write_rows, write_table
from src.utils.word_syntax import parse_dual, parse_mixed, parse_primal, parse_rword, parse_steenrod

logger = logging.getLogger("partition_ops")

# options whose values may start with a minus sign
VALUE_FLAGS = {"--window", "-j", "--gens", "--min-degree", "--max-degree", "--classes"}

WEIGHT_CAP_DEFAULTS = {"bm": 16, "bar": 4, "lie": 6, "e2": 8, "stability": 4}
DEFAULT_WINDOW = (-30, 30)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _window(text: str) -> Tuple[int, Optional[int]]:
    lo, sep, hi = text.partition(":")
    try:
        return int(lo), (int(hi) if sep and hi.strip() else None)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")


def join_negative_values(argv: Sequence[str]) -> List[str]:
    """Turn ``--window -30:5`` into ``--window=-30:5`` so argparse accepts it."""
    out: List[str] = []
    k = 0
    while k < len(argv):
        token = argv[k]
        if token in VALUE_FLAGS and k + 1 < len(argv) and argv[k + 1].startswith("-"):
            out.append(f"{token}={argv[k + 1]}")
            k += 2
            continue
        out.append(token)
        k += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-p', type=int, default=2, help='The prime (default 2)')
    common.add_argument('--cohomological', action='store_true', help='Print cohomological degrees')
    common.add_argument('--window', type=_window, help='Degree window LO:HI (an omitted end defaults to -30:30)')
    common.add_argument('--min-degree', type=int, help='Lower end of the degree window')
    common.add_argument('--max-degree', type=int, help='Upper end of the degree window')
    common.add_argument('--weight-cap', type=int, help='Largest weight')
    common.add_argument('--weights', type=_int_list, help='Only these weights, e.g. 2 or 2,4')
    common.add_argument('--format', dest='output_format', choices=['text', 'json', 'csv'], default='text')
    common.add_argument('--seed', type=int, default=0, help='Seed for sampled sweeps')
    common.add_argument('--jobs', type=int, default=1, help='Worker processes for checks')
    common.add_argument('-v', '--verbose', action='store_true', help='Debug logging')

    parser = argparse.ArgumentParser(
        description='Operations on spectral partition Lie algebras',
        epilog='Words: R3 R1 | bR2 | R2 B | Q5 Q1 | Q3* Q1* | Sq2 Sq1 | P1 bP1 | 1 (identity)')
    sub = parser.add_subparsers(dest='command', required=True)

    basis = sub.add_parser('basis', parents=[common], help='List a basis')
    basis.add_argument('--kind', choices=['unary', 'free', 'slinear'], default='unary')
    basis.add_argument('-j', type=int, default=0, help='Source degree (unary, slinear)')
    basis.add_argument('--gens', type=_int_list, default=[1], help='Generator degrees (free)')

    comp = sub.add_parser('compose', parents=[common], help='Compose two R-words')
    comp.add_argument('-j', type=int, required=True, help='Source degree of the inner word')
    comp.add_argument('outer', help='Outer word, e.g. "R2"')
    comp.add_argument('inner', help='Inner word, applied first')

    rewrite = sub.add_parser('rewrite', parents=[common], help='Normal form of a word')
    rewrite.add_argument('--kind', choices=['primal', 'dual', 'r', 'mixed', 'steenrod'], default='r')
    rewrite.add_argument('-j', type=int, default=0, help='Source or class degree')
    rewrite.add_argument('--variant', choices=['additive', 'full'], default='additive', help='Dual variant')
    rewrite.add_argument('word')

    check = sub.add_parser('check', parents=[common], help='Run a verification sweep')
    check.add_argument('name', choices=checks.CHECKS)
    check.add_argument('-j', type=_int_list, default=[-1, 0, 1], help='Source degrees')
    check.add_argument('-W', dest='bar_weight', type=int, help='Weight cap of the bar oracle')
    check.add_argument('--gens', type=_int_list, action='append', help='Generator degrees; repeatable')
    check.add_argument('--index-window', type=int, help='Largest |index| swept')
    check.add_argument('--source-window', type=int, default=4, help='Largest |source| (adem)')
    check.add_argument('--index-cap', type=int, help='Largest index in relation sweeps')
    check.add_argument('--classes', type=_int_list, help='Class degrees (nishida)')
    check.add_argument('--samples', type=int, default=60, help='Sampled words per class (nishida)')
    check.add_argument('--all', dest='show_all', action='store_true', help='List passing cells too')

    dims_cmd = sub.add_parser('dims', parents=[common], help='Dimension table of a basis')
    dims_cmd.add_argument('--kind', choices=['unary', 'free', 'bm', 'slinear', 'e2'], default='free')
    dims_cmd.add_argument('-j', type=int, default=0, help='Source degree (unary, slinear, e2)')
    dims_cmd.add_argument('--gens', type=_int_list, default=[1], help='Generator degrees (free, bm)')
    dims_cmd.add_argument('--pivot', action='store_true', help='Degree by weight table')
    return parser


def make_config(args: argparse.Namespace, weight_cap_default: int = 4) -> Config:
    lo, hi = args.window if args.window is not None else (None, None)
    if args.min_degree is not None:
        lo = args.min_degree
    if args.max_degree is not None:
        hi = args.max_degree
    # an open end falls back to the default window, widened to stay non-empty
    if lo is None:
        lo = DEFAULT_WINDOW[0] if hi is None else min(DEFAULT_WINDOW[0], hi)
    if hi is None:
        hi = max(DEFAULT_WINDOW[1], lo)
    weight_cap = args.weight_cap
    if weight_cap is None:
        weight_cap = max(args.weights) if args.weights else weight_cap_default
    return Config(p=args.p, grading='cohomological' if args.cohomological else 'homotopy',
                  window=(lo, hi), weight_cap=weight_cap, output_format=args.output_format,
                  seed=args.seed, jobs=args.jobs)


def _window_given(args: argparse.Namespace) -> bool:
    return any(v is not None for v in (args.window, args.min_degree, args.max_degree))


def _select_weights(rows: List[Dict], weights: Optional[List[int]]) -> List[Dict]:
    return rows if not weights else [row for row in rows if row["weight"] in weights]


def _weight_exponent_cap(p: int, weight_cap: int) -> int:
    k = 0
    while p ** (k + 1) <= weight_cap:
        k += 1
    return k


def _sorted_rows(rows: List[Dict]) -> List[Dict]:
    return sorted(rows, key=lambda row: (row["weight"], row["degree"], row["word"]))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _unary_rows(config: Config, j: int) -> List[Dict]:
    words = op_basis(j, _weight_exponent_cap(config.p, config.weight_cap), config.window, config.p)
    return [{"word": str(w), "degree": w.target(j), "weight": w.weight}
            for w in words if w.weight <= config.weight_cap]


def cmd_basis(args: argparse.Namespace) -> int:
    config = make_config(args)
    if args.kind == 'unary':
        rows = _unary_rows(config, args.j)
        title = f"Admissible operations on degree {args.j} (p={config.p})"
    elif args.kind == 'free':
        algebra = FreePartitionLie(config.p, tuple(args.gens))
        rows = algebra.rows(algebra.basis(config.window, config.weight_cap))
        title = f"Free algebra on generators of degrees {args.gens} (p={config.p})"
    else:
        _, elements = slinear_op_basis(args.j, config.window, config.weight_cap, config.p)
        rows = [{"word": str(e.word), "degree": e.degree, "weight": e.weight} for e in elements]
        title = f"S-linear operations on degree {args.j} (p={config.p})"
    rows = _sorted_rows(_select_weights(rows, args.weights))
    write_rows(rows, config, sys.stdout, title)
    return 0


def operation(p: int, word: RWord, source: int) -> PowerOp:
    """An R-word on degree ``source``, every letter checked against its existence bound."""
    total = 2 * source - 1 if word.bracket else source
    for letter in reversed(word.letters):
        if not r_letter_exists(p, letter, total):
            raise DegreeMismatchError(f"{word} is not defined on degree {source}")
        total -= r_letter_drop(p, letter)
    return normalize_rword(p, word, source)


def _power_op_rows(op: PowerOp) -> List[Dict]:
    return [{"word": str(word), "degree": op.target, "weight": word.weight, "coeff": coeff}
            for word, coeff in sorted(op.as_rwords().items(), key=lambda kv: kv[0].letters)]


def cmd_compose(args: argparse.Namespace) -> int:
    config = make_config(args)
    inner = operation(config.p, parse_rword(args.inner, config.p), args.j)
    outer = operation(config.p, parse_rword(args.outer, config.p), inner.target)
    result = compose(outer, inner)
    rows = _power_op_rows(result)
    if config.output_format == 'text' and not rows:
        print("0")
        return 0
    write_rows(rows, config, sys.stdout, f"{args.outer} ∘ {args.inner} on degree {args.j}")
    return 0


def cmd_rewrite(args: argparse.Namespace) -> int:
    config = make_config(args)
    p = config.p
    if args.kind == 'primal':
        terms = primal_adem_rewrite(parse_primal(args.word, p))
        rows = [{"word": str(w), "degree": w.degree, "weight": w.weight, "coeff": c} for w, c in terms.items()]
    elif args.kind == 'dual':
        normal = normal_form_word(parse_dual(args.word, p, args.j, args.variant))
        rows = [{"word": str(w), "degree": w.target_total, "weight": w.weight, "coeff": c}
                for w, c in normal.words()]
    elif args.kind == 'r':
        rows = _power_op_rows(operation(p, parse_rword(args.word, p), args.j))
    elif args.kind == 'mixed':
        degrees = {PLACEHOLDER: args.j}
        terms = canonicalize(parse_mixed(args.word, p), args.j)
        rows = [{"word": str(w), "degree": w.degree(degrees), "weight": w.weight, "coeff": c}
                for w, c in terms.items()]
    else:
        terms = steenrod_adem_rewrite(parse_steenrod(args.word, p))
        rows = [{"word": str(w), "degree": w.degree, "weight": 1, "coeff": c} for w, c in terms.items()]
    rows = _sorted_rows(rows)
    if config.output_format == 'text' and not rows:
        print("0")
        return 0
    write_rows(rows, config, sys.stdout, f"normal form of {args.word}")
    return 0


def run_check(args: argparse.Namespace, config: Config) -> checks.CheckReport:
    p, jobs, progress = config.p, config.jobs, config.output_format == 'text'
    window = config.window if _window_given(args) else None
    name = args.name
    if name == 'bm':
        return checks.check_bm(p, args.gens or [[1]], config.window, config.weight_cap, jobs, progress)
    if name == 'bar':
        if p != 2:
            raise ValueError("the bar oracle runs at p = 2 only")
        return checks.check_bar(args.j, args.bar_weight or config.weight_cap, window, jobs, progress)
    if name == 'adem':
        return checks.check_adem(p, args.index_window or 8, args.source_window, args.index_cap or 12,
                                 jobs=jobs, progress=progress)
    if name == 'lie':
        return checks.check_lie(p, args.gens or [[1, 2], [1, 1, 3]], config.weight_cap, jobs, progress)
    if name == 'nishida':
        classes = args.classes or list(range(-4, 13))
        return checks.check_nishida(p, classes, args.index_cap or 8, config.seed, args.samples, jobs, progress)
    if name == 'koszul':
        return checks.check_koszul(p, args.index_window or 6, jobs=jobs, progress=progress)
    if name == 'e2':
        return checks.check_e2(p, args.j, config.window, config.weight_cap, jobs, progress)
    return checks.check_stability(p, args.j, _weight_exponent_cap(p, config.weight_cap), config.window,
                                  args.index_cap or 6, jobs, progress)


def cmd_check(args: argparse.Namespace) -> int:
    config = make_config(args, WEIGHT_CAP_DEFAULTS.get(args.name, 4))
    report = run_check(args, config)
    write_report(report, config, sys.stdout, args.show_all)
    return 0 if report.ok else 1


def dims_table(args: argparse.Namespace, config: Config) -> DimTable:
    p = config.p
    if args.kind == 'unary':
        rows = _unary_rows(config, args.j)
        return DimTable(dict(Counter((r["degree"], r["weight"]) for r in rows)))
    if args.kind == 'free':
        return dims(FreePartitionLie(p, tuple(args.gens)).basis(config.window, config.weight_cap))
    if args.kind == 'bm':
        return dims(bm_basis(tuple(args.gens), p, config.window, config.weight_cap))
    if args.kind == 'slinear':
        table, _ = slinear_op_basis(args.j, config.window, config.weight_cap, p)
        return table
    return checks.e2_table(args.j, p, config.window, config.weight_cap)


def cmd_dims(args: argparse.Namespace) -> int:
    config = make_config(args)
    table = dims_table(args, config)
    if args.weights:
        table = DimTable({cell: n for cell, n in table.nonzero().items() if cell[1] in args.weights})
    write_table(table, config, sys.stdout, pivot=args.pivot, title=f"dimensions ({args.kind}, p={config.p})")
    return 0


COMMANDS = {'basis': cmd_basis, 'compose': cmd_compose, 'rewrite': cmd_rewrite,
            'check': cmd_check, 'dims': cmd_dims}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    level = logging.DEBUG if args.verbose else get_settings().log_level
    logging.basicConfig(level=level, format='%(asctime)s %(name)s %(levelname)s %(message)s',
                        stream=sys.stderr)

    try:
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"Error: invalid options: {exc.errors()[0]['msg']}", file=sys.stderr)
        return 2
    except WordSyntaxError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return 2
    except (PartitionOpsError, ValueError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
