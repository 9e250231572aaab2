"""Command-line driver.

Exit codes: 0 success / valid, 1 checked and invalid, 2 malformed input,
3 resource guard exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import balance, cube, instance, setfam, table
from .errors import InvalidInputError, NrdError, SizeLimitError
from .predicates import SymmetricPredicate, parse_weights

EXIT_OK, EXIT_INVALID, EXIT_MALFORMED, EXIT_GUARD = 0, 1, 2, 3
MAX_CLASSIFY_ARITY = 6
PUBLISHED_ARITY = 5


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(obj, out: str | None = None) -> None:
    _emit(json.dumps(obj, indent=2) + "\n", out)


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc


def _predicate(args) -> SymmetricPredicate:
    pred = SymmetricPredicate(args.arity, parse_weights(args.weights))
    pred.require_nontrivial()
    return pred


def cmd_classify(args) -> int:
    if not 1 <= args.arity <= MAX_CLASSIFY_ARITY:
        raise InvalidInputError(f"--arity must lie in [1, {MAX_CLASSIFY_ARITY}]")
    if args.arity > PUBLISHED_ARITY:
        print(f"# arity {args.arity}: beyond published tables", file=sys.stderr)
    records = table.classify(args.arity, parallel=args.parallel)
    _emit(table.render(records, args.format, args.arity), args.out)
    return EXIT_OK


def cmd_balance(args) -> int:
    pred = _predicate(args)
    if not 1 <= args.t <= pred.arity:
        raise InvalidInputError(f"--t must lie in [1, {pred.arity}]")
    report = balance.is_t_balanced(pred, args.t)
    out = report.to_json()
    if args.witness and report.balanced:
        rejected = [f for f in range(1 << pred.arity) if not pred.accepts(f)]
        out["certificates"] = [
            balance.find_capturing_polynomial(pred, f, args.t).to_json() for f in rejected
        ]
    _dump(out)
    return EXIT_OK


def cmd_cube(args) -> int:
    pred = _predicate(args)
    if not 2 <= args.k <= pred.arity:
        raise InvalidInputError(f"--k must lie in [2, {pred.arity}]")
    failure = cube.preserves_symmetric(pred, args.k)
    if failure is None:
        print("preserved")
    else:
        _dump(failure.to_json())
    return EXIT_OK


def cmd_check_instance(args) -> int:
    inst = instance.Instance.from_json(_load_json(args.file))
    if args.relaxed_weights is not None:
        relaxed = SymmetricPredicate(inst.predicate.arity, parse_weights(args.relaxed_weights))
        report = instance.conditional_witnesses(inst, relaxed)
    else:
        report = instance.non_redundancy_witnesses(inst)
    _dump(report.to_json())
    if not report.non_redundant:
        print(f"constraint {report.first_missing} has no witness", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def cmd_family_search(args) -> int:
    allowed = parse_weights(args.allowed)
    if args.mode == "exact":
        result = setfam.exact_max_family(args.n, args.block_size, allowed, args.budget)
        if not result.exact:
            print(f"# node budget exhausted after {result.nodes} nodes: lower bound only",
                  file=sys.stderr)
        fam = result.family
    else:
        fam = setfam.greedy_family(args.n, args.block_size, allowed, args.seed)
    _dump(fam.to_json(), args.out)
    return EXIT_OK


def cmd_family_check(args) -> int:
    fam = setfam.Family.from_json(_load_json(args.file))
    weights = parse_weights(args.weights)
    allowed = parse_weights(args.allowed) if args.allowed is not None else weights
    target = setfam.OUTSIDE_W if args.target is None else parse_weights(args.target)
    pair = setfam.check_pairwise(fam, allowed)
    report = setfam.check_witness_family(fam, weights, target)
    out = {"pairwise_violation": None if pair is None else [list(fam.sets[i]) for i in pair]}
    out.update(report.to_json())
    _dump(out)
    return EXIT_OK if pair is None and report.valid else EXIT_INVALID


def cmd_convert(args) -> int:
    lit = instance.LiteralInstance.from_json(_load_json(args.file))
    _dump(instance.desugar_literals(lit).to_json(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nrdsym",
        description="Non-redundancy exponents of symmetric Boolean predicates.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classification table for one arity")
    p.add_argument("--arity", type=int, required=True)
    p.add_argument("--format", choices=table.FORMATS, default="csv")
    p.add_argument("--out")
    p.add_argument("--parallel", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("balance", help="t-balancedness test with optional certificates")
    p.add_argument("--arity", type=int, required=True)
    p.add_argument("--weights", required=True, help="comma list, e.g. 1,2")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--witness", action="store_true")
    p.set_defaults(func=cmd_balance)

    p = sub.add_parser("cube", help="universal k-cube preservation test")
    p.add_argument("--arity", type=int, required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_cube)

    p = sub.add_parser("check-instance", help="exhaustive (conditional) non-redundancy check")
    p.add_argument("file")
    p.add_argument("--relaxed-weights")
    p.set_defaults(func=cmd_check_instance)

    p = sub.add_parser("family", help="restricted-intersection set families")
    fsub = p.add_subparsers(dest="family_command", required=True)
    s = fsub.add_parser("search")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--allowed", required=True)
    s.add_argument("--block-size", type=int, default=5)
    s.add_argument("--mode", choices=("greedy", "exact"), default="greedy")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--budget", type=int, default=setfam.DEFAULT_NODE_BUDGET)
    s.add_argument("--out")
    s.set_defaults(func=cmd_family_search)
    c = fsub.add_parser("check")
    c.add_argument("file")
    c.add_argument("--weights", required=True, help="W: sizes allowed for B != A")
    c.add_argument("--target", help="explicit sizes T for |A & X_A| (default: outside W)")
    c.add_argument("--allowed", help="pairwise intersection sizes (default: W)")
    c.set_defaults(func=cmd_family_check)

    p = sub.add_parser("convert", help="desugar a literal-model instance")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SizeLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except NrdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
