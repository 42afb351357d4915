"""Tail-stability diagnostics along sequences of finite structures.

A genuine limit along a non-principal ultrafilter is not computable from
finitely many structures, so these reports use an explicit proxy: a
quantity is tail-stable at epsilon from index N when all later values lie
within epsilon of each other, and the stable band is the interval of values
r with |v_i - r| <= epsilon for all i >= N. A limit along any ultrafilter
concentrating on the tail would land in that band.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from .defnlab import definability_table, random_convex_measure
from .errors import MeasureError, StructureError
from .fol.semantics import evaluate
from .fol.syntax import PartitionedFormula
from .measures import counting, fraction_str, morley
from .structures import FiniteStructure, StructureSequence, extension_property, load_structure, paley

__all__ = [
    "SequenceReport",
    "StabilityResult",
    "evaluate_along",
    "tail_stable",
    "stable_band",
    "coin_flip_target",
    "empirical_pattern_density",
    "coin_flip_annotation",
    "SentenceTruth",
    "CountingDensity",
    "MorleyDensity",
    "ExtensionTruth",
    "PatternDensity",
    "two_sided_morley_reports",
    "load_sequence_manifest",
]

ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# quantities


@dataclass(frozen=True)
class SentenceTruth:
    """Truth value (0 or 1) of a sentence in each structure."""

    pf: PartitionedFormula

    @property
    def label(self) -> str:
        from .fol.parser import formula_to_text

        return f"sentence[{formula_to_text(self.pf.formula)}]"

    def evaluate(self, structure: FiniteStructure) -> tuple[Fraction, dict]:
        if not self.pf.is_sentence():
            raise MeasureError("sentence quantity requires a formula with no free variables")
        return (ONE if evaluate(structure, self.pf.formula) else ZERO), {}


@dataclass(frozen=True)
class CountingDensity:
    """Counting-measure value of an instance at the canonical parameters.

    Canonical parameters are all 0. A regularity pre-check tabulates the
    value at every parameter tuple; when the table is not constant the
    report entry carries the min/max over parameters as a note.
    """

    pf: PartitionedFormula

    @property
    def label(self) -> str:
        from .fol.parser import partitioned_to_text

        return f"counting-density[{partitioned_to_text(self.pf)}]"

    def evaluate(self, structure: FiniteStructure) -> tuple[Fraction, dict]:
        mu = counting(structure, self.pf.obj_vars)
        table = definability_table(mu, self.pf)
        canonical = tuple(0 for _ in self.pf.param_vars)
        value = table.values[canonical]
        notes: dict = {}
        if not table.is_constant():
            lo, hi = table.value_range()
            notes["constant"] = False
            notes["min"] = fraction_str(lo)
            notes["max"] = fraction_str(hi)
        return value, notes


@dataclass(frozen=True)
class MorleyDensity:
    """One order of the product of counting with a seeded convex measure.

    ``order='left'`` integrates the counting measure's instance values
    against the random measure; ``order='right'`` the reverse. The random
    measure is drawn per structure from the given seed, identically for
    both orders, so paired reports are directly comparable.
    """

    pf: PartitionedFormula
    order: str = "left"
    seed: int = 0
    max_atoms: int = 4

    @property
    def label(self) -> str:
        from .fol.parser import partitioned_to_text

        return f"morley-{self.order}[{partitioned_to_text(self.pf)}; seed {self.seed}]"

    def evaluate(self, structure: FiniteStructure) -> tuple[Fraction, dict]:
        if self.order not in ("left", "right"):
            raise MeasureError(f"order must be 'left' or 'right', got {self.order!r}")
        if len(self.pf.obj_vars) != 1 or len(self.pf.param_vars) != 1:
            raise MeasureError("morley density quantity expects one object and one parameter variable")
        x = self.pf.obj_vars
        y = self.pf.param_vars
        rng = random.Random(self.seed * 1_000_003 + structure.universe_size)
        nu = random_convex_measure(structure, rng, vars=y, max_atoms=self.max_atoms)
        if self.order == "left":
            return morley(counting(structure, x), nu, self.pf), {}
        return morley(nu.rename(x), counting(structure, y), self.pf), {}


@dataclass(frozen=True)
class ExtensionTruth:
    """Truth (0 or 1) of the (s, t) extension property."""

    s: int
    t: int

    @property
    def label(self) -> str:
        return f"extension({self.s},{self.t})"

    def evaluate(self, structure: FiniteStructure) -> tuple[Fraction, dict]:
        return (ONE if extension_property(structure, self.s, self.t) else ZERO), {}


@dataclass(frozen=True)
class PatternDensity:
    """Density of one adjacency/non-adjacency pattern at canonical parameters.

    Uses the first ``n_adjacent`` vertices as required neighbors and the
    next ``n_nonadjacent`` as required non-neighbors; on vertex-transitive
    graphs the choice is immaterial up to isomorphism.
    """

    n_adjacent: int
    n_nonadjacent: int

    @property
    def label(self) -> str:
        return f"pattern-density[{self.n_adjacent} edges, {self.n_nonadjacent} non-edges]"

    def evaluate(self, structure: FiniteStructure) -> tuple[Fraction, dict]:
        n, m = self.n_adjacent, self.n_nonadjacent
        if n + m > structure.universe_size:
            raise MeasureError(f"pattern needs {n + m} distinct parameters, universe has {structure.universe_size}")
        a_list = list(range(n))
        b_list = list(range(n, n + m))
        return empirical_pattern_density(structure, a_list, b_list), {}


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class StabilityResult:
    epsilon: Fraction
    index: int | None  # None = unstable at this horizon
    band: tuple[Fraction, Fraction] | None  # candidate limits [lo, hi]


@dataclass(frozen=True)
class SequenceReport:
    """Per-index exact values of one quantity along a structure sequence."""

    quantity_label: str
    labels: tuple[int, ...]
    values: tuple[Fraction, ...]
    notes: tuple[Mapping, ...]
    stability: tuple[StabilityResult, ...] = ()

    @property
    def final_value(self) -> Fraction:
        return self.values[-1]

    def to_json_dict(self) -> dict:
        return {
            "quantity": self.quantity_label,
            "entries": [
                {
                    "label": lab,
                    "value": {"exact": fraction_str(v), "decimal": float(v)},
                    **({"notes": dict(n)} if n else {}),
                }
                for lab, v, n in zip(self.labels, self.values, self.notes)
            ],
            "final_value_decimal": float(self.final_value),
            "stability": [
                {
                    "epsilon": fraction_str(s.epsilon),
                    "stable_from_index": s.index,
                    "band": None
                    if s.band is None
                    else {
                        "low": {"exact": fraction_str(s.band[0]), "decimal": float(s.band[0])},
                        "high": {"exact": fraction_str(s.band[1]), "decimal": float(s.band[1])},
                    },
                }
                for s in self.stability
            ],
            "proxy_note": (
                "limit along a non-principal ultrafilter agrees with the stable band "
                "whenever the tail stabilizes"
            ),
        }

    def to_text(self) -> str:
        width = max(len(str(lab)) for lab in self.labels)
        lines = [f"sequence report: {self.quantity_label}"]
        for lab, v, n in zip(self.labels, self.values, self.notes):
            note = f"  {dict(n)}" if n else ""
            lines.append(f"  {str(lab).rjust(width)}  {fraction_str(v):>12}  {float(v):.6f}{note}")
        for s in self.stability:
            if s.index is None:
                lines.append(f"  eps {fraction_str(s.epsilon)}: unstable at this horizon")
            else:
                lo, hi = s.band
                lines.append(
                    f"  eps {fraction_str(s.epsilon)}: stable from index {s.index}, "
                    f"band [{fraction_str(lo)}, {fraction_str(hi)}]"
                )
        lines.append("  (ultralimit proxy: any tail-concentrated limit lies in the stable band)")
        return "\n".join(lines)


def evaluate_along(seq: StructureSequence, quantity, epsilons: Sequence[Fraction] = ()) -> SequenceReport:
    """Evaluate a quantity on every structure; optionally analyze tail stability."""
    values: list[Fraction] = []
    notes: list[Mapping] = []
    for _, structure in seq.entries:
        v, n = quantity.evaluate(structure)
        values.append(v)
        notes.append(n)
    report = SequenceReport(quantity.label, seq.labels, tuple(values), tuple(notes))
    if epsilons:
        stability = []
        for eps in epsilons:
            eps = Fraction(eps)
            idx = tail_stable(report, eps)
            stability.append(StabilityResult(eps, idx, stable_band(report, eps, idx)))
        report = SequenceReport(report.quantity_label, report.labels, report.values, report.notes, tuple(stability))
    return report


def tail_stable(report: SequenceReport, epsilon: Fraction) -> int | None:
    """Least index past which all pairwise value differences are < epsilon.

    A singleton tail carries no evidence, so a qualifying index must leave
    at least two values (the whole sequence counts if it has only one
    entry). Returns None when the report is unstable at this horizon.
    Pairwise closeness is equivalent to (max - min) < epsilon on the tail.
    """
    epsilon = Fraction(epsilon)
    values = report.values
    if not values:
        raise MeasureError("empty report")
    if len(values) == 1:
        return 0
    best: int | None = None
    hi = lo = values[-1]
    for start in range(len(values) - 2, -1, -1):
        hi = max(hi, values[start])
        lo = min(lo, values[start])
        if hi - lo < epsilon:
            best = start
        else:
            break
    return best


def stable_band(report: SequenceReport, epsilon: Fraction, index: int | None) -> tuple[Fraction, Fraction] | None:
    """Candidate limits: all r with |v_i - r| <= epsilon for every tail value."""
    if index is None:
        return None
    tail = report.values[index:]
    lo = max(tail) - epsilon
    hi = min(tail) + epsilon
    return (lo, hi)


# ---------------------------------------------------------------------------
# coin-flipping targets and pattern densities


def coin_flip_target(p: Fraction, n: int, m: int) -> Fraction:
    """Probability p^n (1-p)^m of one adjacency/non-adjacency pattern.

    This is the probabilistically coherent reading of the biased
    coin-flipping measure on adjacency patterns (values in [0, 1]); some
    sources display the reciprocal form (1/p)^n (1/(1-p))^m instead, which
    exceeds 1 -- see :func:`coin_flip_annotation` for the report note.
    """
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise MeasureError(f"p = {p} outside [0, 1]")
    if n < 0 or m < 0:
        raise MeasureError("pattern sizes must be nonnegative")
    return p**n * (1 - p) ** m


def coin_flip_annotation(p: Fraction, n: int, m: int) -> dict:
    """Exact target value plus the display-convention note reports carry."""
    p = Fraction(p)
    value = coin_flip_target(p, n, m)
    out = {
        "bias": fraction_str(p),
        "unfair": p != Fraction(1, 2),
        "target": {"exact": fraction_str(value), "decimal": float(value)},
        "note": "computed as p^n (1-p)^m; the reciprocal display (1/p)^n (1/(1-p))^m exceeds 1 and is not used",
    }
    if 0 < p < 1:
        reciprocal = (1 / p) ** n * (1 / (1 - p)) ** m
        out["reciprocal_display"] = {"exact": fraction_str(reciprocal), "decimal": float(reciprocal)}
    return out


def empirical_pattern_density(structure: FiniteStructure, a_list: Sequence[int], b_list: Sequence[int]) -> Fraction:
    """Fraction of vertices adjacent to all of a_list and none of b_list."""
    params = list(a_list) + list(b_list)
    if len(set(params)) != len(params):
        raise MeasureError(f"repeated parameters in {a_list} + {b_list}")
    binary = [name for name, arity in structure.signature.relations if arity == 2]
    if len(binary) != 1:
        raise StructureError("pattern density needs exactly one binary relation symbol")
    edges = structure.relations[binary[0]]
    n = structure.universe_size
    count = sum(
        1
        for x in range(n)
        if all((x, a) in edges for a in a_list) and not any((x, b) in edges for b in b_list)
    )
    return Fraction(count, n)


def two_sided_morley_reports(
    seq: StructureSequence,
    pf: PartitionedFormula,
    seed: int = 0,
    epsilons: Sequence[Fraction] = (),
) -> tuple[SequenceReport, SequenceReport]:
    """Paired reports for both orders of the counting-vs-random product."""
    left = evaluate_along(seq, MorleyDensity(pf, "left", seed), epsilons)
    right = evaluate_along(seq, MorleyDensity(pf, "right", seed), epsilons)
    return left, right


# ---------------------------------------------------------------------------
# sequence manifests


def load_sequence_manifest(path: str | Path) -> StructureSequence:
    """Load a JSON manifest: {"sequence": [{"paley": 13}, {"file": "...", "label": 9}, ...]}."""
    path = Path(path)
    with open(path) as fh:
        data = json.load(fh)
    try:
        specs = data["sequence"]
    except (KeyError, TypeError) as exc:
        raise StructureError(f"malformed sequence manifest: {exc}") from None
    entries = []
    for pos, spec in enumerate(specs, start=1):
        if "paley" in spec:
            q = int(spec["paley"])
            entries.append((int(spec.get("label", q)), paley(q)))
        elif "file" in spec:
            file_path = Path(spec["file"])
            if not file_path.is_absolute():
                file_path = path.parent / file_path
            entries.append((int(spec.get("label", pos)), load_structure(file_path)))
        else:
            raise StructureError(f"manifest entry {pos} needs 'paley' or 'file'")
    return StructureSequence(tuple(entries))
