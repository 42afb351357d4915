"""Shared generators and independent oracles for the test suite.

The oracles here deliberately avoid the library's computation paths: they
recount edges, re-enumerate subsets, and re-expand convolutions from raw
tables so that agreement with the library is evidence, not tautology.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from keislerlab.fol.syntax import (
    And,
    Eq,
    Exists,
    ForAll,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    PartitionedFormula,
    Rel,
    Signature,
    Var,
)
from keislerlab.measures import Measure
from keislerlab.structures import FiniteStructure

GRAPH_SIG = Signature.make(relations={"R": 2})


def random_digraph(rng: random.Random, min_size: int = 2, max_size: int = 8) -> FiniteStructure:
    """Structure with one binary relation and random edges (loops allowed)."""
    n = rng.randint(min_size, max_size)
    density = rng.uniform(0.2, 0.7)
    edges = {(a, b) for a in range(n) for b in range(n) if rng.random() < density}
    return FiniteStructure(GRAPH_SIG, n, relations={"R": edges})


def all_digraphs(n: int):
    """Every structure with one binary relation on n elements (2^(n^2) of them)."""
    pairs = list(itertools.product(range(n), repeat=2))
    for bits in itertools.product((False, True), repeat=len(pairs)):
        edges = {p for p, keep in zip(pairs, bits) if keep}
        yield FiniteStructure(GRAPH_SIG, n, relations={"R": edges})


def random_formula(
    rng: random.Random,
    obj_vars: tuple[str, ...],
    param_vars: tuple[str, ...],
    depth: int = 3,
    quantifiers: bool = True,
) -> PartitionedFormula:
    """Random partitioned formula over the one-binary-relation signature."""
    bound_pool = ["u", "v", "w"]

    def term(scope):
        return Var(rng.choice(scope))

    def atom(scope):
        if rng.random() < 0.8:
            return Rel("R", (term(scope), term(scope)))
        return Eq(term(scope), term(scope))

    def build(d, scope) -> Formula:
        if d <= 0 or rng.random() < 0.25:
            return atom(scope)
        roll = rng.random()
        if roll < 0.2:
            return Not(build(d - 1, scope))
        if quantifiers and roll < 0.35:
            fresh = next((b for b in bound_pool if b not in scope), None)
            if fresh is not None:
                cls = ForAll if rng.random() < 0.5 else Exists
                return cls(fresh, build(d - 1, scope + [fresh]))
        cls = rng.choice([And, Or, Implies, Iff])
        return cls(build(d - 1, scope), build(d - 1, scope))

    scope = list(obj_vars) + list(param_vars)
    return PartitionedFormula(build(depth, scope), obj_vars, param_vars)


def random_convex(rng: random.Random, structure: FiniteStructure, vars=("x",), max_atoms: int = 4) -> Measure:
    k = len(vars)
    atoms = rng.randint(1, max_atoms)
    points = [tuple(rng.randrange(structure.universe_size) for _ in range(k)) for _ in range(atoms)]
    raw = [rng.randint(1, 12) for _ in range(atoms)]
    total = sum(raw)
    weights: dict[tuple[int, ...], Fraction] = {}
    for p, r in zip(points, raw):
        weights[p] = weights.get(p, Fraction(0)) + Fraction(r, total)
    return Measure(structure, vars, weights)


# ---------------------------------------------------------------------------
# independent oracles


def oracle_degrees(structure: FiniteStructure) -> dict[int, int]:
    edges = structure.relations["R"]
    return {a: sum(1 for b in range(structure.universe_size) if (a, b) in edges) for a in range(structure.universe_size)}


def oracle_neighbors(structure: FiniteStructure, v: int) -> set[int]:
    edges = structure.relations["R"]
    return {b for b in range(structure.universe_size) if (v, b) in edges}


def oracle_extension(structure: FiniteStructure, s: int, t: int) -> bool:
    """Triple-loop (s,t)-extension check straight off the edge set."""
    n = structure.universe_size
    edges = structure.relations["R"]
    for a_set in itertools.combinations(range(n), s):
        for b_set in itertools.combinations([v for v in range(n) if v not in a_set], t):
            witness = False
            for x in range(n):
                if x in a_set or x in b_set:
                    continue
                if all((x, a) in edges for a in a_set) and all((x, b) not in edges for b in b_set):
                    witness = True
                    break
            if not witness:
                return False
    return True


def oracle_shatter(structure: FiniteStructure, d: int) -> int:
    """Max trace count of the neighborhood family on any d vertices, by raw enumeration."""
    n = structure.universe_size
    families = [frozenset(oracle_neighbors(structure, b)) for b in range(n)]
    best = 0
    for points in itertools.combinations(range(n), d):
        traces = {tuple(p in fam for p in points) for fam in families}
        best = max(best, len(traces))
    return best


def oracle_convolution_table(group, mu: Measure, nu: Measure) -> dict[tuple[int, ...], Fraction]:
    """Expand the product over the full group table, then push forward."""
    out: dict[tuple[int, ...], Fraction] = {}
    for a in range(group.universe_size):
        for b in range(group.universe_size):
            w = mu.weight((a,)) * nu.weight((b,))
            if w:
                c = (group.functions["mul"][(a, b)],)
                out[c] = out.get(c, Fraction(0)) + w
    return out


def oracle_measure_of(mu: Measure, pf: PartitionedFormula, params: tuple[int, ...]) -> Fraction:
    """Weighted satisfaction sum through the reference evaluator only."""
    from keislerlab.fol.semantics import evaluate

    total = Fraction(0)
    env_base = dict(zip(pf.param_vars, params))
    for point in mu.support:
        env = dict(env_base)
        env.update(zip(pf.obj_vars, point))
        if evaluate(mu.structure, pf.formula, env):
            total += mu.weight(point)
    return total
