"""The ``fvkit`` command line.

Exit codes: 0 success, 1 bad input (parse, sort or usage errors), 2 a failed
``--check`` or self-test, 3 an internal disagreement between the decision
procedure and the witness search or the powerset oracle.
"""

from __future__ import annotations

import argparse
import random
import sys
from typing import List, Optional

from .ba import (
    BAError, DEFAULT_BUDGET, POWERSET_CAP, check_abai, decide, eval_powerset, parse_theory,
)
from .epset import EPError, EPSet, parse_ep, render_ep
from .evaluate import EvalError, Evaluator
from .fv import TranslateError, render_fv, slot, translate
from .imaginaries import CapExceeded, DefinableSet, automorphisms, render_code, weak_ei_code
from .library import SweepFamily, random_family, sweep_products
from .logic import BVal, Signature, Var, free_vars
from .sexp import SexpError
from .structures import (
    PowersetAlgebra, StructureError, load_product, parse_structure, render_structure,
)
from .syntax import FormulaError, parse_formula_file, parse_signature

INPUT_ERRORS = (FormulaError, SexpError, StructureError, EvalError, BAError, EPError,
                TranslateError, CapExceeded, OSError, ValueError)


class CheckFailed(Exception):
    """A --check sweep found a counterexample (exit 2)."""


class Disagreement(Exception):
    """Two independent procedures disagree (exit 3)."""


def _read(path):
    with open(path) as fh:
        return fh.read()


def _signature(path):
    return parse_signature(_read(path))


def _format_value(v):
    if isinstance(v, tuple):
        return "(" + " ".join(_format_value(x) for x in v) + ")"
    if isinstance(v, EPSet):
        return render_ep(v)
    if isinstance(v, int):
        return "{" + ",".join(str(i) for i in range(v.bit_length()) if v >> i & 1) + "}"
    return str(v)


def _format_assignment(asg):
    return " ".join(f"{k}={_format_value(v)}" for k, v in asg.items()) or "(empty)"


def _write(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- translate

def _check_pool(args, sig):
    rng = random.Random(f"{args.seed}:check")
    if args.factor:
        pool = tuple(parse_structure(_read(p), sig, name=p) for p in args.factor)
        return SweepFamily("given", sig, pool)
    return random_family(sig, rng, count=3, max_size=max(args.max_size, len(sig.sorts)))


def run_translate(args) -> int:
    sig = _signature(args.signature)
    f, free = parse_formula_file(_read(args.formula), sig)
    nf = translate(f)
    if args.check:
        family = _check_pool(args, sig)
        variables = [Var(n, s) for n, s in free.items()]
        variables += [v for n, v in free_vars(f).items() if n not in free]
        for p in sweep_products(family, args.max_factors, args.max_size):
            ev = Evaluator(p)
            cells = [ev.compile_term(BVal(c)) for c in nf.cells]
            beta = ev.compile(nf.boolean_part)
            fc = ev.compile(f)
            for asg in ev.assignments(variables):
                env = dict(asg)
                want = fc(dict(env))
                for j, c in enumerate(cells):
                    env[slot(j).name] = c(env)
                if beta(env) != want:
                    factors = "\n".join(render_structure(m) for m in p.factors)
                    raise CheckFailed(
                        f"translation disagrees on the product {p!r} with J atoms "
                        f"{list(p.j_atoms)}\nfactors:\n{factors}\n"
                        f"assignment: {_format_assignment(asg)}\n"
                        f"formula: {want}, normal form: {not want}")
    _write(render_fv(nf) + "\n", args.output)
    return 0


# ---------------------------------------------------------------- decide

def _constants(args):
    out = {}
    for item in args.const or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"--const expects name=value, got {item}")
        value = value.strip()
        if value == "?":
            out[name] = None
        elif value.startswith("("):
            out[name] = parse_ep(value)
        else:
            out[name] = int(value, 0)
    return out


def run_decide(args) -> int:
    theory = parse_theory(args.theory)
    sig = _signature(args.signature) if args.signature else Signature(())
    f, free = parse_formula_file(_read(args.sentence), sig)
    constants = _constants(args)
    missing = [n for n in free_vars(f) if n not in constants]
    if missing:
        raise BAError(f"open sentence: free variable {missing[0]} has no value (use --const)")
    if args.witness:
        if str(theory) != "ABAI:inf":
            raise BAError("--witness applies to ABAI:inf")
        params = {}
        for n, v in constants.items():
            if v is None:
                raise BAError("--witness needs concrete parameter values")
            params[n] = v if isinstance(v, EPSet) else EPSet.finite(
                i for i in range(v.bit_length()) if v >> i & 1)
        check = check_abai(f, params, budget=args.budget)
        if check.flagged:
            found = _format_assignment(check.witness) if check.witness else "nothing"
            raise Disagreement(f"decide says {check.decision} but the witness search found {found}")
        line = str(check.decision)
        if check.witness:
            line += " " + " ".join(render_ep(v) for v in check.witness.values())
        print(line)
        return 0
    d = decide(theory, f, constants)
    if args.check and isinstance(theory.size, int) and theory.size <= args.powerset_cap \
            and theory.kind == "ABA":
        if None not in constants.values():
            want = eval_powerset(theory.size, f, constants, cap=args.powerset_cap)
            if (str(d) == "TRUE") != want:
                raise Disagreement(f"decide says {d} but P({theory.size}) says {want}")
    print(d)
    return 0


# ---------------------------------------------------------------- eval

def run_eval(args) -> int:
    if args.powerset is not None:
        if len(args.files) != 1:
            raise ValueError("with --powerset give only the formula file")
        if args.powerset > args.powerset_cap:
            raise BAError(f"P({args.powerset}) exceeds the powerset cap {args.powerset_cap}")
        f, free = parse_formula_file(_read(args.files[0]), Signature(()))
        ev = Evaluator(PowersetAlgebra(args.powerset))
        variables = list(free_vars(f).values())
    else:
        if len(args.files) != 3:
            raise ValueError("expected SIGNATURE PRODUCT FORMULA")
        sig = _signature(args.files[0])
        p = load_product(args.files[1], sig)
        f, free = parse_formula_file(_read(args.files[2]), sig)
        ev = Evaluator(p)
        variables = [Var(n, s) for n, s in free.items()]
        variables += [v for n, v in free_vars(f).items() if n not in free]
    if not variables:
        print("TRUE" if ev.truth(f) else "FALSE")
        return 0
    lines = []
    for asg in ev.assignments(variables):
        if ev.truth(f, asg):
            lines.append(_format_assignment(asg))
    print(f"satisfying assignments: {len(lines)}")
    for line in lines:
        print(line)
    return 0


# ---------------------------------------------------------------- code

def run_code(args) -> int:
    sig = _signature(args.signature)
    p = load_product(args.product, sig)
    f, free = parse_formula_file(_read(args.formula), sig)
    variables = [Var(n, s) for n, s in free.items()]
    variables += [v for n, v in free_vars(f).items() if n not in free]
    if not variables or any(v.sort not in sig.sorts for v in variables):
        raise ValueError("the formula must have free variables of home sorts only")
    Z = DefinableSet.from_formula(p, f, variables)
    code = weak_ei_code(Z)
    if args.check:
        if code.reconstruct(Z.domain()) != Z.extension:
            raise CheckFailed("the code does not reconstruct the set")
        sorts = Z.sorts
        for g in automorphisms(p).elements:
            if weak_ei_code(g.act_set(Z)) != g.act_code(code, sorts):
                raise CheckFailed("the code is not equivariant")
    _write(render_code(code) + "\n", args.output)
    return 0


# ---------------------------------------------------------------- selftest

def run_selftest(args) -> int:
    from .selftest import SelftestConfig, run

    cfg = SelftestConfig(seed=args.seed, max_factors=args.max_factors, max_size=args.max_size,
                         max_depth=args.max_depth, powerset_cap=args.powerset_cap,
                         budget=args.budget)
    progress = (lambda msg: print(f"[selftest] {msg}", file=sys.stderr)) if args.verbose else None
    result = run(cfg, progress)
    _write(result.report(), args.output)
    if args.figures:
        from .plots import render_figures

        for path in render_figures(result, args.figures):
            print(f"wrote {path}", file=sys.stderr)
    return 0 if result.passed else 2


# ---------------------------------------------------------------- parser

def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fvkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def caps(p):
        p.add_argument("--max-factors", type=_positive, default=3)
        p.add_argument("--max-size", type=_positive, default=3)
        p.add_argument("--max-depth", type=_positive, default=3)
        p.add_argument("--powerset-cap", type=_positive, default=POWERSET_CAP)
        p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("translate", help="compile a formula into its normal form")
    p.add_argument("signature")
    p.add_argument("formula")
    p.add_argument("-o", "--output")
    p.add_argument("--check", action="store_true",
                   help="compare with the source formula on small products")
    p.add_argument("--factor", action="append",
                   help="structure file for the --check pool (repeatable)")
    caps(p)
    p.set_defaults(func=run_translate)

    p = sub.add_parser("decide", help="decide a Boolean-algebra sentence")
    p.add_argument("theory", help="ABA, ABA:n, ABA:inf, ATOMLESS, ABAI:inf or ABAI:n")
    p.add_argument("sentence")
    p.add_argument("--signature", help="only needed for files that name one")
    p.add_argument("--const", action="append", metavar="NAME=VALUE",
                   help="value of a free variable: a mask, (ep ...) or ? for symbolic")
    p.add_argument("--witness", action="store_true", help="search for an EPSet witness")
    p.add_argument("--check", action="store_true", help="cross-check ABA:n with P(n)")
    caps(p)
    p.set_defaults(func=run_decide)

    p = sub.add_parser("eval", help="evaluate a formula in a product or in P(n)")
    p.add_argument("files", nargs="+", metavar="FILE",
                   help="SIGNATURE PRODUCT FORMULA, or FORMULA with --powerset")
    p.add_argument("--powerset", type=_positive, metavar="N")
    caps(p)
    p.set_defaults(func=run_eval)

    p = sub.add_parser("code", help="canonical code of a definable set")
    p.add_argument("signature")
    p.add_argument("product")
    p.add_argument("formula")
    p.add_argument("-o", "--output")
    p.add_argument("--check", action="store_true",
                   help="verify reconstruction and equivariance")
    caps(p)
    p.set_defaults(func=run_code)

    p = sub.add_parser("selftest", help="run the acceptance sweeps")
    p.add_argument("-o", "--output")
    p.add_argument("--figures", metavar="DIR", help="also write PNG figures to DIR")
    p.add_argument("-v", "--verbose", action="store_true")
    caps(p)
    p.set_defaults(func=run_selftest)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CheckFailed as e:
        print(f"check failed: {e}", file=sys.stderr)
        return 2
    except Disagreement as e:
        print(f"flagged: {e}", file=sys.stderr)
        return 3
    except INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
