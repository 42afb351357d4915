"""Instance-value tables, level-set buckets, and the two-sided product obstruction.

A definability table realizes the map b -> mu(phi(x, b)) exactly, over every
parameter tuple of the structure. Level buckets sort parameters by how close
that value sits to the grid i/n; their three defining conditions are
re-verified after construction, not assumed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .engine import satisfaction_rows
from .errors import InvariantViolation, MeasureError
from .fol.syntax import PartitionedFormula
from .measures import Measure, convex, counting, dirac, fraction_str, morley
from .structures import FiniteStructure, paley

__all__ = [
    "DefinabilityTable",
    "definability_table",
    "LevelBuckets",
    "level_buckets",
    "rounding_bucket",
    "integrate_table",
    "ObstructionReport",
    "paley_obstruction_report",
    "random_convex_measure",
]

ZERO = Fraction(0)


@dataclass(frozen=True)
class DefinabilityTable:
    """Exact values mu(phi(x, b)) for every parameter tuple b."""

    structure: FiniteStructure
    pf: PartitionedFormula
    values: Mapping[tuple[int, ...], Fraction]

    @property
    def param_arity(self) -> int:
        return len(self.pf.param_vars)

    def __getitem__(self, b: tuple[int, ...]) -> Fraction:
        return self.values[tuple(b)]

    def is_constant(self) -> bool:
        vals = set(self.values.values())
        return len(vals) <= 1

    def value_range(self) -> tuple[Fraction, Fraction]:
        vals = list(self.values.values())
        return min(vals), max(vals)


def definability_table(mu: Measure, pf: PartitionedFormula) -> DefinabilityTable:
    """Tabulate mu(phi(x, b)) over all parameter tuples b."""
    if pf.obj_vars != mu.vars:
        raise MeasureError(f"formula object variables {pf.obj_vars} do not match measure variables {mu.vars}")
    structure = mu.structure
    support = mu.support
    params = list(structure.tuples(len(pf.param_vars)))
    rows = satisfaction_rows(structure, pf.formula, mu.vars, pf.param_vars, support, params)
    weights = [mu.weight(p) for p in support]
    values = {}
    for b, row in zip(params, rows):
        values[b] = sum((w for w, hit in zip(weights, row) if hit), ZERO)
    return DefinabilityTable(structure, pf, values)


@dataclass(frozen=True)
class LevelBuckets:
    """Parameter tuples grouped by proximity of their table value to i/n.

    Bucket i holds exactly the parameters b with |table[b] - i/n| < 1/n
    (strict). Buckets overlap; a value exactly on a grid point i/n lies
    only in bucket i.
    """

    table: DefinabilityTable
    granularity: int
    buckets: tuple[frozenset[tuple[int, ...]], ...]

    def membership(self, b: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(i for i, bucket in enumerate(self.buckets) if b in bucket)

    def verify_conditions(self) -> None:
        """Re-check the three bucket conditions; raises on any failure."""
        n = self.granularity
        for b, value in self.table.values.items():
            members = self.membership(b)
            if not members:
                raise InvariantViolation(f"cover fails: {b} (value {value}) is in no bucket")
            for i in members:
                if not abs(value - Fraction(i, n)) < Fraction(1, n):
                    raise InvariantViolation(f"membership accuracy fails: {b} in bucket {i} but value {value}")
            for k in range(n + 1):
                if abs(value - Fraction(k, n)) < Fraction(1, n):
                    if not any(j in members for j in (k - 1, k, k + 1)):
                        raise InvariantViolation(f"near-membership fails: {b} close to {k}/{n} but in {members}")


def level_buckets(table: DefinabilityTable, n: int) -> LevelBuckets:
    """Bucket parameters by strict 1/n proximity to the value grid."""
    if n < 1:
        raise MeasureError("granularity must be >= 1")
    eps = Fraction(1, n)
    buckets = []
    for i in range(n + 1):
        center = Fraction(i, n)
        buckets.append(frozenset(b for b, v in table.values.items() if abs(v - center) < eps))
    result = LevelBuckets(table, n, tuple(buckets))
    result.verify_conditions()
    return result


def rounding_bucket(q: Fraction, r: Fraction, m: int) -> frozenset[str]:
    """Which of floor(r)/m, ceil(r)/m lies strictly within 1/m of q.

    Requires |q - r/m| < 1/m; the returned set is then guaranteed nonempty
    (an elementary fact, still re-checked here rather than trusted).
    """
    if m < 1:
        raise MeasureError("m must be >= 1")
    q = Fraction(q)
    r = Fraction(r)
    if not abs(q - r / m) < Fraction(1, m):
        raise MeasureError(f"precondition fails: |{q} - {r}/{m}| >= 1/{m}")
    out = set()
    if abs(q - Fraction(math.floor(r), m)) < Fraction(1, m):
        out.add("floor")
    if abs(q - Fraction(math.ceil(r), m)) < Fraction(1, m):
        out.add("ceil")
    if not out:
        raise InvariantViolation(f"rounding fact falsified at q={q}, r={r}, m={m}")
    return frozenset(out)


def integrate_table(table: DefinabilityTable, nu: Measure) -> Fraction:
    """Integrate a parameter-value table against a measure on the parameters."""
    if nu.arity != table.param_arity:
        raise MeasureError(f"measure arity {nu.arity} does not match parameter arity {table.param_arity}")
    if nu.structure is not table.structure and nu.structure != table.structure:
        raise MeasureError("integrate_table requires the table's structure")
    return sum((w * table.values[b] for b, w in nu.items()), ZERO)


# ---------------------------------------------------------------------------
# the Paley two-sided-product obstruction


def random_convex_measure(
    structure: FiniteStructure,
    rng: random.Random,
    vars: tuple[str, ...] = ("x",),
    max_atoms: int = 4,
    max_weight: int = 20,
) -> Measure:
    """Seeded random convex combination of point masses (exact weights)."""
    k = len(vars)
    n_atoms = rng.randint(1, max_atoms)
    points = [tuple(rng.randrange(structure.universe_size) for _ in range(k)) for _ in range(n_atoms)]
    raw = [rng.randint(1, max_weight) for _ in range(n_atoms)]
    total = sum(raw)
    weights = [Fraction(r, total) for r in raw]
    return convex(weights, [dirac(structure, p, vars) for p in points])


@dataclass(frozen=True)
class ObstructionReport:
    """Exact two-sided product computations on one Paley graph.

    ``constant_value`` is the common value (q-1)/(2q) of the counting
    measure's edge table; ``samples`` lists, per random convex measure, the
    values of both product orders against the counting measure (all equal
    to the constant); ``gap`` is |p - 1/2| - 1/(2q), positive exactly when
    the target edge density p is distinguishable from the counting value at
    this scale, which is what blocks a sequence of convex measures from
    producing a limit with constant edge value p.
    """

    q: int
    target: Fraction
    seed: int
    constant_value: Fraction
    samples: tuple[tuple[Fraction, Fraction], ...]
    gap: Fraction

    @property
    def obstructed(self) -> bool:
        return self.gap > 0

    def to_json_dict(self) -> dict:
        def frac(x: Fraction) -> dict:
            return {"exact": fraction_str(x), "decimal": float(x)}

        return {
            "q": self.q,
            "target": frac(self.target),
            "seed": self.seed,
            "edge_table_constant": frac(self.constant_value),
            "samples": [
                {"left_product": frac(left), "right_product": frac(right)} for left, right in self.samples
            ],
            "gap": frac(self.gap),
            "obstructed": self.obstructed,
        }

    def to_text(self) -> str:
        lines = [
            f"paley({self.q}) two-sided product report (seed {self.seed})",
            f"  counting edge value: {fraction_str(self.constant_value)} = {float(self.constant_value):.6f}",
            f"  target density p = {fraction_str(self.target)}",
            f"  gap |p - 1/2| - 1/(2q) = {fraction_str(self.gap)} = {float(self.gap):.6f}"
            + ("  (obstructed)" if self.obstructed else "  (not obstructed)"),
            f"  {len(self.samples)} random convex measures, products both orders:",
        ]
        for i, (left, right) in enumerate(self.samples):
            lines.append(f"    #{i}: left {fraction_str(left)}  right {fraction_str(right)}")
        return "\n".join(lines)


def paley_obstruction_report(q: int, target: Fraction, samples: int = 20, seed: int = 0) -> ObstructionReport:
    """Check that both orders of the counting-measure product pin the edge value.

    For each seeded random convex measure nu, computes the exact values of
    counting (x) nu and nu (x) counting on the edge relation; both must equal
    (q-1)/(2q), and the report aborts loudly if they do not. The gap field
    quantifies the obstruction against a constant target density p != 1/2.
    """
    from .fol.parser import parse_formula

    target = Fraction(target)
    if not 0 <= target <= 1:
        raise MeasureError(f"target density {target} outside [0, 1]")
    graph = paley(q)
    edge_xy = parse_formula("x ; y :: R(x,y)", graph.signature)
    mu_x = counting(graph, ("x",))
    mu_y = counting(graph, ("y",))

    table = definability_table(mu_x, edge_xy)
    if not table.is_constant():
        raise InvariantViolation(f"paley({q}) counting edge table is not constant")
    constant = table.values[(0,)]
    expected = Fraction(q - 1, 2 * q)
    if constant != expected:
        raise InvariantViolation(f"paley({q}) edge value {constant} != (q-1)/(2q) = {expected}")

    rng = random.Random(seed)
    rows: list[tuple[Fraction, Fraction]] = []
    for _ in range(samples):
        nu_y = random_convex_measure(graph, rng, vars=("y",))
        nu_x = nu_y.rename(("x",))
        left = morley(mu_x, nu_y, edge_xy)  # counting first
        right = morley(nu_x, mu_y, edge_xy)  # counting second
        if left != expected or right != expected:
            raise InvariantViolation(
                f"two-sided product value drifted: left {left}, right {right}, expected {expected}"
            )
        rows.append((left, right))

    gap = abs(target - Fraction(1, 2)) - Fraction(1, 2 * q)
    return ObstructionReport(q, target, seed, constant, tuple(rows), gap)
