"""The acceptance sweeps behind ``fvkit selftest``.

Every suite is driven by ``random.Random`` instances derived from one seed and
reports only counts, so two runs with the same configuration produce the same
report byte for byte.  The report is tab-delimited: one line per criterion,
followed by per-family or per-product detail lines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import axioms
from .ba import INF, check_abai, decide, eval_powerset, qe, stabilization_point
from .curated import ABA_SENTENCES, ABAI_SENTENCES
from .evaluate import Evaluator
from .fv import is_propositional_partition, slot, translate
from .imaginaries import (
    CapExceeded, DefinableSet, automorphisms, is_union_of_classes, rectangle_code, weak_ei_code,
)
from .library import families, sweep_products
from .logic import At, BConst, BVal, Signature, Var, free_vars, B
from .randgen import BooleanSentenceGen, FormulaGen, seeded
from .syntax import parse


@dataclass
class SelftestConfig:
    seed: int = 0
    max_factors: int = 3
    max_size: int = 3
    max_depth: int = 3
    powerset_cap: int = 6
    budget: int = 3
    formulas: int = 1000
    random_sentences: int = 200
    max_exhaustive: int = 12
    samples: int = 48

    def __post_init__(self):
        for name in ("max_factors", "max_size", "max_depth", "powerset_cap", "budget",
                     "formulas", "max_exhaustive", "samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


@dataclass
class SuiteResult:
    number: int
    name: str
    passed: bool
    metrics: List[Tuple[str, object]]
    details: List[str] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)

    def line(self):
        m = " ".join(f"{k}={v}" for k, v in self.metrics)
        return f"{self.number}\t{self.name}\t{'PASS' if self.passed else 'FAIL'}\t{m}"


@dataclass
class SelftestRun:
    config: SelftestConfig
    results: List[SuiteResult]
    figures: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    def report(self) -> str:
        c = self.config
        lines = [
            "# fvkit selftest",
            f"seed\t{c.seed}",
            f"caps\tmax_factors={c.max_factors} max_size={c.max_size} max_depth={c.max_depth}"
            f" powerset_cap={c.powerset_cap} budget={c.budget}",
            "criterion\tsuite\tstatus\tmetrics",
        ]
        lines += [r.line() for r in self.results]
        for r in self.results:
            lines += [f"{r.number}.detail\t{d}" for d in r.details]
            lines += [f"{r.number}.failure\t{f}" for f in r.failures[:20]]
        lines.append(f"overall\t{'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- criteria 1 and 2

def _fv_agrees(ev, f, nf, free):
    """Count assignments where f and its normal form disagree.

    The normal form is evaluated by computing the slot values [cell_j] in the
    product and then beta in B; this is exactly the meaning of embed().
    """
    fc = ev.compile(f)
    cells = [ev.compile_term(BVal(c)) for c in nf.cells]
    beta = ev.compile(nf.boolean_part)
    names = [slot(j).name for j in range(nf.k)]
    n = bad = 0
    first = None
    for asg in ev.assignments(free):
        env = dict(asg)
        want = fc(dict(env))
        for name, c in zip(names, cells):
            env[name] = c(env)
        n += 1
        if beta(env) != want:
            bad += 1
            if first is None:
                first = asg
    return n, bad, first


def suite_fv(cfg: SelftestConfig):
    fams = families()
    per_family = [cfg.formulas // len(fams) + (i < cfg.formulas % len(fams))
                  for i in range(len(fams))]
    total = asg_total = mismatches = partition_ok = embed_checked = embed_bad = 0
    details, fails, cell_counts = [], [], []
    prop_details, prop_fails = [], []
    for fam, count in zip(fams, per_family):
        rng = seeded(cfg.seed, f"fv:{fam.name}")
        gen = FormulaGen(fam.signature, rng, max_depth=cfg.max_depth)
        prods = sweep_products(fam, cfg.max_factors, cfg.max_size)
        evs = [Evaluator(p) for p in prods]
        fam_asg = fam_bad = fam_part = 0
        for k in range(count):
            free = gen.free_variables()
            f = gen.formula(free)
            nf = translate(f)
            total += 1
            cell_counts.append(nf.k)
            if is_propositional_partition(nf.cells):
                fam_part += 1
            else:
                prop_fails.append(f"{fam.name}#{k}: cells are not a propositional partition")
            for p, ev in zip(prods, evs):
                n, bad, first = _fv_agrees(ev, f, nf, free)
                fam_asg += n
                fam_bad += bad
                if bad:
                    fails.append(f"{fam.name}#{k} on {p!r} at {first}")
            if k % 25 == 0:
                # cross-check the slot evaluation against the embedded formula
                emb = nf.embed()
                for ev in evs[:4]:
                    for asg in ev.assignments(free):
                        embed_checked += 1
                        if ev.truth(emb, asg) != ev.truth(f, asg):
                            embed_bad += 1
                            fails.append(f"{fam.name}#{k}: embed() disagrees at {asg}")
        asg_total += fam_asg
        mismatches += fam_bad
        partition_ok += fam_part
        details.append(f"{fam.name}\tformulas={count} products={len(prods)}"
                       f" assignments={fam_asg} mismatches={fam_bad}")
        prop_details.append(f"{fam.name}\tformulas={count} partitions={fam_part}")
    r1 = SuiteResult(1, "fv-equivalence",
                     not fails and total >= 1000 and len(fams) >= 3,
                     [("formulas", total), ("signatures", len(fams)),
                      ("assignments", asg_total), ("embed_checks", embed_checked),
                      ("mismatches", mismatches + embed_bad)],
                     details, fails)
    r2 = SuiteResult(2, "partition-tautology", partition_ok == total,
                     [("outputs", total), ("verified", partition_ok),
                      ("max_cells", max(cell_counts, default=0))],
                     prop_details, prop_fails)
    return r1, r2, cell_counts


# ---------------------------------------------------------------- criterion 3

def _base_free(sig: Signature) -> List[Var]:
    """A fixed declaration so that the test formulas agree on sorts."""
    return [Var("x1", sig.sorts[0]), Var("x2", sig.sorts[-1])]


def suite_axioms(cfg: SelftestConfig):
    rep = axioms.AxiomReport()
    details = []
    for fam in families():
        rng = seeded(cfg.seed, f"axioms:{fam.name}")
        gen = FormulaGen(fam.signature, rng, max_depth=cfg.max_depth, mixed=False,
                         boolean_quantifiers=False)
        declared = _base_free(fam.signature)
        phis = []
        for _ in range(6):
            chosen = [v for v in declared if rng.random() < 0.6]
            phis.append(gen.formula(chosen or declared[:1]))
        before = rep.checks
        prods = sweep_products(fam, cfg.max_factors, cfg.max_size)
        for p in prods:
            rep.add(*axioms.check_boolean_algebra(p))
            rep.add(*axioms.check_glue(p, rng))
            for i, phi in enumerate(phis):
                rep.add(*axioms.check_transfer(p, phi))
                rep.add(*axioms.check_homomorphism(p, phi, phis[(i + 1) % len(phis)]))
                rep.add(*axioms.check_quotient(p, phi))
                x = next(iter(free_vars(phi).values()), declared[0])
                partner = phis[(i + 2) % len(phis)]
                rep.add(*axioms.check_axiom4(p, [phi, partner], x, rng))
        for m in fam.pool:
            for phi in phis:
                x = next(iter(free_vars(phi).values()), declared[0])
                rep.add(*axioms.check_counting(m, phi, x))
        details.append(f"{fam.name}\tproducts={len(prods)} checks={rep.checks - before}")
    return SuiteResult(3, "axioms", rep.ok,
                       [("checks", rep.checks), ("failures", len(rep.failures))],
                       details, rep.failures)


# ---------------------------------------------------------------- criterion 4

def _observed_stabilization(truths: List[bool]) -> int:
    n0 = len(truths)
    while n0 > 1 and truths[n0 - 2] == truths[-1]:
        n0 -= 1
    return n0


def suite_ba(cfg: SelftestConfig):
    sig = Signature(())
    curated = [parse(s, sig) for s in ABA_SENTENCES]
    rng = seeded(cfg.seed, "ba")
    gen = BooleanSentenceGen(rng)
    randoms = [gen.sentence() for _ in range(cfg.random_sentences)]
    fails, details, heat = [], [], []
    comparisons = 0
    sizes = range(1, cfg.powerset_cap + 1)
    for label, group in (("curated", curated), ("random", randoms)):
        agree = 0
        for k, s in enumerate(group):
            truths = []
            for n in sizes:
                got = decide(f"ABA:{n}", s)
                want = eval_powerset(n, s, cap=cfg.powerset_cap)
                truths.append(want)
                comparisons += 1
                if (str(got) == "TRUE") != want:
                    fails.append(f"{label}#{k} in P({n}): decide says {got}")
                else:
                    agree += 1
            n0, stable = stabilization_point(s)
            if n0 <= cfg.powerset_cap and any(t != stable for t in truths[n0 - 1:]):
                fails.append(f"{label}#{k}: truth in P(n) not constant from {n0}")
            if n0 <= cfg.powerset_cap and _observed_stabilization(truths) > n0:
                fails.append(f"{label}#{k}: observed stabilization exceeds {n0}")
            if label == "curated":
                heat.append(truths)
        details.append(f"{label}\tsentences={len(group)} agreements={agree}")
    # quantifier elimination against P(n) for formulas in one free variable
    v = Var("v", B)
    qe_checks = 0
    for k in range(40):
        f = gen.sentence(free=[v])
        g = qe(f, "ABA")
        if free_vars(g).keys() - {"v"}:
            fails.append(f"qe#{k}: output has extra free variables")
            continue
        for n in range(1, min(cfg.powerset_cap, 4) + 1):
            for mask in range(1 << n):
                qe_checks += 1
                if eval_powerset(n, f, {"v": mask}) != eval_powerset(n, g, {"v": mask}):
                    fails.append(f"qe#{k} in P({n}) at v={mask}")
    details.append(f"qe\tformulas=40 checks={qe_checks}")
    at3 = str(decide("ABA", At(3, BConst(1))))
    if not at3.startswith("INDEPENDENT"):
        fails.append(f"AT3(1) over ABA: {at3}")
    details.append(f"ABA AT3(1)\t{at3}")
    inf_false = 0
    for k in range(7):
        verdict = str(decide(f"ABA:{INF}", At(k, BConst(1))))
        inf_false += verdict == "FALSE"
        if verdict != "FALSE":
            fails.append(f"AT{k}(1) over ABA:inf: {verdict}")
    details.append(f"ABA:inf AT_k(1)\tk=0..6 false={inf_false}")
    stab = [stabilization_point(s)[0] for s in curated]
    details.append(f"stabilization\tmax={max(stab)} cap={cfg.powerset_cap}"
                   f" within_cap={sum(n <= cfg.powerset_cap for n in stab)}/{len(stab)}")
    r = SuiteResult(4, "ba-decision", not fails,
                    [("sentences", len(curated) + len(randoms)), ("comparisons", comparisons),
                     ("qe_checks", qe_checks), ("disagreements", len(fails))],
                    details, fails)
    return r, heat


# ---------------------------------------------------------------- criterion 5

def suite_abai(cfg: SelftestConfig):
    sig = Signature(())
    fails, details = [], []
    found = trues = 0
    for k, (text, params) in enumerate(ABAI_SENTENCES):
        s = parse(text, sig, {name: B for name in params})
        check = check_abai(s, params, budget=cfg.budget)
        verdict = str(check.decision)
        trues += verdict == "TRUE"
        found += check.witness is not None
        if check.flagged:
            fails.append(f"#{k}: decide says {verdict} but the witness search "
                         f"{'found' if check.witness else 'found nothing'}")
        details.append(f"#{k}\t{verdict}\twitness={'yes' if check.witness else 'no'}")
    return SuiteResult(5, "abai-witness", not fails,
                       [("sentences", len(ABAI_SENTENCES)), ("true", trues),
                        ("witnessed", found), ("flagged", len(fails))],
                       details, fails)


# ---------------------------------------------------------------- criterion 6

def _domain_sorts(sig: Signature):
    if len(sig.sorts) > 1:
        return [(sig.sorts[0],), tuple(sig.sorts)]
    return [(sig.sorts[0],), (sig.sorts[0],) * 2]


def _check_set(Z, group, sorts, codes=None):
    """Failures for one Z; codes caches weak codes by extension."""
    out = []
    n = Z.ambient.n
    for side in ([0], list(range(1, n))) if n > 1 else ([0],):
        if rectangle_code(Z, side).reconstruct(n) != Z.extension:
            out.append(f"rectangle reconstruction fails for side {side}")
    if not is_union_of_classes(Z):
        out.append("Z is not a union of E^Z-classes")
    code = codes[Z.extension] if codes is not None else weak_ei_code(Z)
    if code.reconstruct(Z.domain()) != Z.extension:
        out.append("weak code does not reconstruct Z")
    for g in group.elements:
        moved = g.act_set(Z)
        other = codes[moved.extension] if codes is not None else weak_ei_code(moved)
        if other != g.act_code(code, sorts):
            out.append("weak code is not equivariant")
            break
    return out


def suite_imaginaries(cfg: SelftestConfig):
    fails, details = [], []
    sets = exhaustive = sampled = skipped = 0
    aut_checks = max_classes = 0
    for fam in families():
        rng = seeded(cfg.seed, f"imaginaries:{fam.name}")
        for p in sweep_products(fam, cfg.max_factors, cfg.max_size):
            try:
                group = automorphisms(p)
            except CapExceeded:
                skipped += 1
                continue
            for sorts in _domain_sorts(fam.signature):
                empty = DefinableSet(p, sorts, frozenset())
                dom = empty.domain()
                if len(dom) <= cfg.max_exhaustive:
                    exts = [frozenset(d for j, d in enumerate(dom) if bits >> j & 1)
                            for bits in range(1 << len(dom))]
                    codes = {e: weak_ei_code(empty.with_extension(e)) for e in exts}
                    exhaustive += 1
                else:
                    exts = []
                    for _ in range(cfg.samples):
                        density = rng.choice((0.1, 0.3, 0.5, 0.7, 0.9))
                        exts.append(frozenset(d for d in dom if rng.random() < density))
                    codes = None
                    sampled += 1
                bad = 0
                for e in exts:
                    Z = empty.with_extension(e)
                    problems = _check_set(Z, group, sorts, codes)
                    code = codes[e] if codes is not None else weak_ei_code(Z)
                    max_classes = max(max_classes, *(len(part) for part in code.gamma))
                    sets += 1
                    aut_checks += group.order
                    if problems:
                        bad += 1
                        fails.append(f"{p!r} {sorts}: {problems[0]}")
                details.append(f"{fam.name}\t{p!r}\tsorts={','.join(sorts)} points={len(dom)}"
                               f" sets={len(exts)} aut={group.order} failures={bad}")
    fails += _presentation_checks(cfg)
    return SuiteResult(6, "imaginaries", not fails,
                       [("sets", sets), ("exhaustive_domains", exhaustive),
                        ("sampled_domains", sampled), ("aut_checks", aut_checks),
                        ("max_classes", max_classes),
                        ("skipped", skipped), ("failures", len(fails))],
                       details, fails)


def _presentation_checks(cfg: SelftestConfig):
    """A formula and its normal form define the same set, hence the same code."""
    fails = []
    for fam in families():
        rng = seeded(cfg.seed, f"presentation:{fam.name}")
        gen = FormulaGen(fam.signature, rng, max_depth=cfg.max_depth)
        x = Var("x1", fam.signature.sorts[0])
        prods = [p for p in sweep_products(fam, min(cfg.max_factors, 2), cfg.max_size)]
        for k in range(5):
            f = gen.formula([x])
            g = translate(f).embed()
            for p in prods:
                a = weak_ei_code(DefinableSet.from_formula(p, f, [x]))
                b = weak_ei_code(DefinableSet.from_formula(p, g, [x]))
                if a != b:
                    fails.append(f"{fam.name}#{k} on {p!r}: code depends on the presentation")
    return fails


# ---------------------------------------------------------------- driver

def run(cfg: Optional[SelftestConfig] = None, progress=None) -> SelftestRun:
    cfg = cfg or SelftestConfig()
    say = progress or (lambda msg: None)
    results = []
    say("fv equivalence and partition checks")
    r1, r2, cell_counts = suite_fv(cfg)
    results += [r1, r2]
    say("axiom suite")
    results.append(suite_axioms(cfg))
    say("Boolean algebra decisions")
    r4, heat = suite_ba(cfg)
    results.append(r4)
    say("ABAI witnesses")
    results.append(suite_abai(cfg))
    say("imaginaries")
    results.append(suite_imaginaries(cfg))
    return SelftestRun(cfg, results, {"cell_counts": cell_counts, "stabilization": heat})


__all__ = ["SelftestConfig", "SelftestRun", "SuiteResult", "run"]
