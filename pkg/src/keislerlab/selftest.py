"""Per-module invariant suites behind the CLI --selftest flag.

Each suite returns (name, ok, detail) triples and is deliberately small:
these are smoke-level re-checks of the central invariants, not the full
test suite (run pytest for that).
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from .approx import certificate_check, exact_average_points, find_approximation, sup_error, vc_dimension
from .defnlab import definability_table, integrate_table, level_buckets, random_convex_measure, rounding_bucket
from .engine import backend_name, have_native, satisfaction_rows
from .fol import evaluate, parse_formula, parse_raw_formula, formula_to_text
from .groups import classify_idempotent, convolution_powers, haar, is_idempotent, subgroups
from .measures import convex, convolution, counting, dirac, measure_of, morley, morley_measure, product, tv_distance
from .seqlab import CountingDensity, coin_flip_target, empirical_pattern_density, evaluate_along, tail_stable
from .structures import FiniteStructure, cyclic_group, dihedral_group, extension_property, paley, paley_sequence

Check = tuple[str, bool, str]


def _check(name: str, fn: Callable[[], bool]) -> Check:
    try:
        ok = fn()
        return (name, bool(ok), "" if ok else "assertion false")
    except Exception as exc:  # surface the failure, don't crash the report
        return (name, False, f"{type(exc).__name__}: {exc}")


def _random_structure(rng: random.Random, size: int | None = None) -> FiniteStructure:
    from .fol.syntax import Signature

    n = size or rng.randint(2, 6)
    sig = Signature.make(relations={"R": 2})
    edges = {(a, b) for a in range(n) for b in range(n) if rng.random() < 0.4}
    return FiniteStructure(sig, n, relations={"R": edges})


def selftest_fol() -> list[Check]:
    checks = []
    g = paley(5)
    pf = parse_formula("x ; y :: R(x,y)", g.signature)
    checks.append(_check("parse/print round-trip", lambda: parse_raw_formula(formula_to_text(pf.formula), g.signature) == pf.formula))
    checks.append(_check("evaluate R(1,2) on paley(5)", lambda: evaluate(g, pf.formula, {"x": 1, "y": 2})))
    sentence = parse_formula("forall x. exists y. R(x,y)", g.signature)
    checks.append(_check("5-cycle has no isolated vertex", lambda: evaluate(g, sentence.formula)))
    rng = random.Random(7)

    def de_morgan() -> bool:
        for _ in range(20):
            m = _random_structure(rng)
            a, b = rng.randrange(m.universe_size), rng.randrange(m.universe_size)
            phi = parse_raw_formula("!(R(x,y) & R(y,x))", m.signature)
            psi = parse_raw_formula("!R(x,y) | !R(y,x)", m.signature)
            if evaluate(m, phi, {"x": a, "y": b}) != evaluate(m, psi, {"x": a, "y": b}):
                return False
        return True

    checks.append(_check("De Morgan pointwise", de_morgan))
    return checks


def selftest_structures() -> list[Check]:
    checks = []

    def regular() -> bool:
        for q in (5, 13, 17, 29):
            g = paley(q)
            degs = {sum(1 for b in range(q) if (a, b) in g.relations["R"]) for a in range(q)}
            if degs != {(q - 1) // 2}:
                return False
        return True

    checks.append(_check("paley regularity", regular))
    checks.append(_check("paley symmetry/irreflexivity", lambda: all((b, a) in paley(13).relations["R"] and a != b for a, b in paley(13).relations["R"])))
    checks.append(_check("group laws hold for D4", lambda: dihedral_group(4).universe_size == 8))
    checks.append(_check("K4 fails (0,1)-extension", lambda: not extension_property(
        FiniteStructure(paley(5).signature, 4, relations={"R": {(a, b) for a in range(4) for b in range(4) if a != b}}), 0, 1)))
    return checks


def selftest_measures() -> list[Check]:
    checks = []
    g = paley(13)
    mu = counting(g, ("x",))
    nu = counting(g, ("y",))
    pf = parse_formula("x ; y :: R(x,y)", g.signature)
    checks.append(_check("counting edge value 6/13", lambda: measure_of(mu, pf, (0,)) == Fraction(6, 13)))
    checks.append(_check("morley = product value", lambda: morley(mu, nu, pf) == Fraction(6, 13)))
    checks.append(_check("morley_measure = product table", lambda: morley_measure(mu, nu) == product(mu, nu)))
    rng = random.Random(3)

    def additivity() -> bool:
        for _ in range(10):
            m = _random_structure(rng)
            meas = random_convex_measure(m, rng)
            phi = parse_formula("x ; y :: R(x,y)", m.signature)
            neg = parse_formula("x ; y :: !R(x,y)", m.signature)
            b = (rng.randrange(m.universe_size),)
            if measure_of(meas, phi, b) + measure_of(meas, neg, b) != 1:
                return False
        return True

    checks.append(_check("mu(phi) + mu(!phi) = 1", additivity))
    z4 = cyclic_group(4)
    h = haar([s for s in subgroups(z4) if s.order == 2][0])
    checks.append(_check("haar({0,2}) * itself = itself", lambda: convolution(h, h) == h))
    checks.append(_check("tv(delta_0, delta_1) = 1", lambda: tv_distance(dirac(z4, (0,)), dirac(z4, (1,))) == 1))
    return checks


def selftest_defnlab() -> list[Check]:
    checks = []
    g = paley(13)
    mu = counting(g, ("x",))
    pf = parse_formula("x ; y :: R(x,y)", g.signature)
    table = definability_table(mu, pf)
    checks.append(_check("paley(13) table constant 6/13", lambda: table.is_constant() and table.values[(0,)] == Fraction(6, 13)))
    checks.append(_check("buckets at n=4 verify", lambda: level_buckets(table, 4) is not None))
    checks.append(_check("buckets 1 and 2 full at n=4", lambda: [len(b) for b in level_buckets(table, 4).buckets] == [0, 13, 13, 0, 0]))
    checks.append(_check("rounding fact example", lambda: "floor" in rounding_bucket(Fraction(3, 10), Fraction(6, 5), 4)))
    nu = counting(g, ("y",))
    checks.append(_check("integral of table = slice product", lambda: integrate_table(table, nu) == morley(mu, nu, pf)))
    return checks


def selftest_approx() -> list[Check]:
    checks = []
    g = paley(13)
    mu = counting(g, ("x",))
    pf = parse_formula("x ; y :: R(x,y)", g.signature)
    pts = exact_average_points(mu)
    checks.append(_check("replicated support has sup-error 0", lambda: pts is not None and sup_error(mu, pf, pts) == 0))
    res = find_approximation(mu, pf, Fraction(1, 4), strategy="exchange", seed=1)
    checks.append(_check("exchange meets eps=1/4", lambda: res.meets(Fraction(1, 4))))
    checks.append(_check("vc(paley(5), R) = 2", lambda: vc_dimension(paley(5), parse_formula("x ; y :: R(x,y)", paley(5).signature), 3).vc_dimension == 2))
    table = definability_table(mu, pf)
    buckets = level_buckets(table, 4)
    cert = certificate_check(mu, pf, pts, buckets, 4)
    checks.append(_check("exact points certify buckets", lambda: cert.passed))
    bad = certificate_check(mu, pf, [(0,)], buckets, 4)
    checks.append(_check("single point fails with counterexample", lambda: not bad.passed and bad.counterexample is not None))
    return checks


def selftest_groups() -> list[Check]:
    checks = []
    z6 = cyclic_group(6)
    checks.append(_check("Z6 has 4 subgroups", lambda: len(subgroups(z6)) == 4))
    checks.append(_check("all Z6 haar measures idempotent", lambda: all(is_idempotent(haar(h)) for h in subgroups(z6))))
    checks.append(_check("classification round-trips", lambda: all(classify_idempotent(haar(h)).elements == h.elements for h in subgroups(z6))))
    skew = convex([Fraction(2, 3), Fraction(1, 3)], [dirac(cyclic_group(2), (0,)), dirac(cyclic_group(2), (1,))])
    checks.append(_check("skewed coin not idempotent", lambda: not is_idempotent(skew)))
    z3 = cyclic_group(3)
    orbit = convolution_powers(dirac(z3, (1,)), 50)
    checks.append(_check("delta_1 on Z3 periodic with period 3", lambda: orbit.status == "periodic" and orbit.period == 3))
    checks.append(_check("cycle average is haar(Z3)", lambda: orbit.cesaro_limit == haar(subgroups(z3)[-1])))
    return checks


def selftest_seqlab() -> list[Check]:
    checks = []
    seq = paley_sequence([5, 13, 17])
    pf = parse_formula("x ; y :: R(x,y)", seq.signature)
    report = evaluate_along(seq, CountingDensity(pf), epsilons=[Fraction(1, 10)])
    checks.append(_check("densities (q-1)/(2q)", lambda: list(report.values) == [Fraction(2, 5), Fraction(6, 13), Fraction(8, 17)]))
    checks.append(_check("tail stable at 1/10 from 0", lambda: tail_stable(report, Fraction(1, 10)) == 0))
    checks.append(_check("coin flip target 3/10,1,1", lambda: coin_flip_target(Fraction(3, 10), 1, 1) == Fraction(21, 100)))
    checks.append(_check("pattern density n=1 on paley(13)", lambda: empirical_pattern_density(paley(13), [0], []) == Fraction(6, 13)))
    return checks


def selftest_engine() -> list[Check]:
    checks = []
    checks.append((f"active backend: {backend_name()}", True, ""))
    if have_native():
        g = paley(13)
        pf = parse_formula("x ; y :: R(x,y) & (exists u. R(x,u) & R(u,y))", g.signature)
        xs = list(g.tuples(1))
        ys = list(g.tuples(1))
        pure = satisfaction_rows(g, pf.formula, pf.obj_vars, pf.param_vars, xs, ys, backend="pure")
        native = satisfaction_rows(g, pf.formula, pf.obj_vars, pf.param_vars, xs, ys, backend="native")
        checks.append(("native and pure backends agree", pure == native, ""))
    return checks


SUITES: dict[str, Callable[[], list[Check]]] = {
    "fol": selftest_fol,
    "structures": selftest_structures,
    "measures": selftest_measures,
    "defnlab": selftest_defnlab,
    "approx": selftest_approx,
    "groups": selftest_groups,
    "seqlab": selftest_seqlab,
    "engine": selftest_engine,
}


def run_suites(names: list[str]) -> tuple[list[tuple[str, Check]], bool]:
    results = []
    all_ok = True
    for name in names:
        for check in SUITES[name]():
            results.append((name, check))
            all_ok = all_ok and check[1]
    return results, all_ok
