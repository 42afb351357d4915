"""Exact finitely-supported measures and their products.

Weights are nonnegative ``fractions.Fraction`` values summing to exactly 1;
no floating point enters any stored weight or any product/idempotence
check. Floats appear only in human-facing renderings.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from .engine import satisfaction_rows
from .errors import MeasureError
from .fol.syntax import PartitionedFormula
from .structures import FiniteStructure, GroupTable

__all__ = [
    "Measure",
    "dirac",
    "average",
    "convex",
    "counting",
    "measure_of",
    "product",
    "morley",
    "morley_measure",
    "convolution",
    "tv_distance",
    "measure_to_json_dict",
    "measure_from_json_dict",
    "load_measure",
    "save_measure",
    "parse_fraction",
    "fraction_str",
]

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_fraction(text: str | int | Fraction) -> Fraction:
    """Accepts 'p/q', 'p', or numeric values; always exact."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(text.strip())


def fraction_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


class Measure:
    """A probability assignment on k-tuples of one structure's universe.

    ``vars`` names the k coordinates; formulas evaluated against this
    measure must use exactly these as their object variables, in order.
    """

    def __init__(
        self,
        structure: FiniteStructure,
        vars: tuple[str, ...],
        weights: Mapping[tuple[int, ...], Fraction | int | str],
    ):
        if not vars:
            raise MeasureError("a measure needs at least one variable")
        if len(set(vars)) != len(vars):
            raise MeasureError(f"duplicate variable in {vars}")
        k = len(vars)
        n = structure.universe_size
        cleaned: dict[tuple[int, ...], Fraction] = {}
        for point, w in weights.items():
            point = tuple(point)
            w = parse_fraction(w)
            if len(point) != k:
                raise MeasureError(f"support point {point} has arity {len(point)}, expected {k}")
            if not all(0 <= v < n for v in point):
                raise MeasureError(f"support point {point} outside universe 0..{n - 1}")
            if w < 0:
                raise MeasureError(f"negative weight {w} at {point}")
            if w > 0:
                cleaned[point] = cleaned.get(point, ZERO) + w
        total = sum(cleaned.values(), ZERO)
        if total != 1:
            raise MeasureError(f"weights sum to {total}, not 1")
        self.structure = structure
        self.vars = tuple(vars)
        self._weights: dict[tuple[int, ...], Fraction] = cleaned

    @property
    def arity(self) -> int:
        return len(self.vars)

    @property
    def support(self) -> tuple[tuple[int, ...], ...]:
        return tuple(sorted(self._weights))

    def weight(self, point: tuple[int, ...]) -> Fraction:
        return self._weights.get(tuple(point), ZERO)

    def items(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return sorted(self._weights.items())

    def rename(self, new_vars: Sequence[str]) -> "Measure":
        return Measure(self.structure, tuple(new_vars), self._weights)

    def reorder(self, new_vars: Sequence[str]) -> "Measure":
        """Permute coordinates to match a reordering of the variable tuple."""
        new_vars = tuple(new_vars)
        if sorted(new_vars) != sorted(self.vars):
            raise MeasureError(f"{new_vars} is not a permutation of {self.vars}")
        perm = [self.vars.index(v) for v in new_vars]
        weights = {tuple(p[i] for i in perm): w for p, w in self._weights.items()}
        return Measure(self.structure, new_vars, weights)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Measure):
            return NotImplemented
        return (
            self.structure is other.structure or self.structure == other.structure
        ) and self.vars == other.vars and self._weights == other._weights

    def __hash__(self):
        return hash((self.vars, tuple(sorted(self._weights.items()))))

    def table_key(self) -> tuple:
        """Hashable exact weight table (used for orbit recurrence detection)."""
        return tuple(sorted(self._weights.items()))

    def __repr__(self) -> str:
        atoms = ", ".join(f"{p}:{w}" for p, w in self.items())
        return f"Measure({self.vars} on {self.structure.name}; {atoms})"


# ---------------------------------------------------------------------------
# constructors


def dirac(structure: FiniteStructure, point: Sequence[int], vars: tuple[str, ...] = ("x",)) -> Measure:
    """Point mass at one tuple."""
    return Measure(structure, vars, {tuple(point): ONE})


def average(structure: FiniteStructure, points: Sequence[Sequence[int]], vars: tuple[str, ...] = ("x",)) -> Measure:
    """Uniform measure on a nonempty point list; repeats add multiplicity."""
    if not points:
        raise MeasureError("average requires a nonempty point list")
    n = len(points)
    weights: dict[tuple[int, ...], Fraction] = {}
    share = Fraction(1, n)
    for p in points:
        p = tuple(p)
        weights[p] = weights.get(p, ZERO) + share
    return Measure(structure, vars, weights)


def convex(weights: Sequence[Fraction | int | str], measures: Sequence[Measure]) -> Measure:
    """Convex combination sum r_i * mu_i with positive exact coefficients."""
    if len(weights) != len(measures) or not measures:
        raise MeasureError("need equally many (and at least one) weights and measures")
    coeffs = [parse_fraction(w) for w in weights]
    if any(r <= 0 for r in coeffs):
        raise MeasureError("convex coefficients must be positive")
    if sum(coeffs) != 1:
        raise MeasureError(f"convex coefficients sum to {sum(coeffs)}, not 1")
    first = measures[0]
    combined: dict[tuple[int, ...], Fraction] = {}
    for r, mu in zip(coeffs, measures):
        if mu.structure is not first.structure and mu.structure != first.structure:
            raise MeasureError("convex combination across different structures")
        if mu.vars != first.vars:
            raise MeasureError(f"variable mismatch: {mu.vars} vs {first.vars}")
        for p, w in mu._weights.items():
            combined[p] = combined.get(p, ZERO) + r * w
    return Measure(first.structure, first.vars, combined)


def counting(structure: FiniteStructure, vars: tuple[str, ...] = ("x",)) -> Measure:
    """Uniform measure on all k-tuples (the normalized counting measure)."""
    k = len(vars)
    share = Fraction(1, structure.universe_size**k)
    return Measure(structure, vars, {t: share for t in structure.tuples(k)})


# ---------------------------------------------------------------------------
# evaluation


def _params_assignment(pf: PartitionedFormula, params) -> tuple[int, ...]:
    if params is None:
        params = ()
    if isinstance(params, Mapping):
        try:
            return tuple(params[v] for v in pf.param_vars)
        except KeyError as exc:
            raise MeasureError(f"missing parameter for variable {exc}") from None
    params = tuple(params)
    if len(params) != len(pf.param_vars):
        raise MeasureError(f"got {len(params)} parameters for variables {pf.param_vars}")
    return params


def measure_of(mu: Measure, pf: PartitionedFormula, params=None) -> Fraction:
    """The measure of the instance phi(x, b): total weight of satisfying tuples."""
    if pf.obj_vars != mu.vars:
        raise MeasureError(f"formula object variables {pf.obj_vars} do not match measure variables {mu.vars}")
    b = _params_assignment(pf, params)
    support = mu.support
    row = satisfaction_rows(mu.structure, pf.formula, mu.vars, pf.param_vars, support, [b])[0]
    return sum((mu._weights[p] for p, hit in zip(support, row) if hit), ZERO)


# ---------------------------------------------------------------------------
# products


def product(mu: Measure, nu: Measure) -> Measure:
    """Product measure on the concatenated tuple: weight(a, b) = mu(a) * nu(b)."""
    if mu.structure is not nu.structure and mu.structure != nu.structure:
        raise MeasureError("product requires measures on the same structure")
    if set(mu.vars) & set(nu.vars):
        raise MeasureError(f"variable tuples overlap: {mu.vars} and {nu.vars}")
    weights = {a + b: wa * wb for a, wa in mu._weights.items() for b, wb in nu._weights.items()}
    return Measure(mu.structure, mu.vars + nu.vars, weights)


def morley(mu: Measure, nu: Measure, pf: PartitionedFormula, params=None) -> Fraction:
    """Integral of mu's instance values against nu.

    The formula must be partitioned with object variables mu.vars and
    parameter variables starting with nu.vars (extra parameter variables are
    filled from ``params``). Computed slice-by-slice: for each b in nu's
    support, the exact value mu(phi(x, b, c)), summed with weight nu(b) --
    deliberately not via the joint product measure, so agreement with it is
    a meaningful test.
    """
    if mu.structure is not nu.structure and mu.structure != nu.structure:
        raise MeasureError("morley requires measures on the same structure")
    if pf.obj_vars != mu.vars:
        raise MeasureError(f"formula object variables {pf.obj_vars} do not match left measure variables {mu.vars}")
    if pf.param_vars[: nu.arity] != nu.vars:
        raise MeasureError(f"parameter variables {pf.param_vars} do not start with right measure variables {nu.vars}")
    extra = _params_assignment(
        PartitionedFormula(pf.formula, pf.obj_vars + pf.param_vars[: nu.arity], pf.param_vars[nu.arity :]),
        params,
    )
    mu_support = mu.support
    nu_support = nu.support
    rows = satisfaction_rows(
        mu.structure,
        pf.formula,
        mu.vars,
        pf.param_vars,
        mu_support,
        [b + extra for b in nu_support],
    )
    total = ZERO
    for b, row in zip(nu_support, rows):
        slice_value = sum((mu._weights[a] for a, hit in zip(mu_support, row) if hit), ZERO)
        total += nu._weights[b] * slice_value
    return total


def morley_measure(mu: Measure, nu: Measure) -> Measure:
    """The integral-of-fibers measure on the concatenated tuple.

    Built by integrating the x-fiber copies of mu against nu (outer loop
    over nu, accumulation), not by pointwise weight multiplication; over a
    finite structure it must coincide with :func:`product` exactly, and the
    test suite asserts that it does.
    """
    if mu.structure is not nu.structure and mu.structure != nu.structure:
        raise MeasureError("morley_measure requires measures on the same structure")
    if set(mu.vars) & set(nu.vars):
        raise MeasureError(f"variable tuples overlap: {mu.vars} and {nu.vars}")
    weights: dict[tuple[int, ...], Fraction] = {}
    for b, wb in nu.items():
        for a, wa in mu.items():
            key = a + b
            weights[key] = weights.get(key, ZERO) + wb * wa
    return Measure(mu.structure, mu.vars + nu.vars, weights)


def convolution(mu: Measure, nu: Measure) -> Measure:
    """Push the product forward through group multiplication."""
    if not isinstance(mu.structure, GroupTable):
        raise MeasureError("convolution requires measures on a group table")
    if mu.structure is not nu.structure and mu.structure != nu.structure:
        raise MeasureError("convolution requires measures on the same group")
    if mu.arity != 1 or nu.arity != 1:
        raise MeasureError("convolution is defined for single-variable measures")
    g = mu.structure
    weights: dict[tuple[int, ...], Fraction] = {}
    for (a,), wa in mu._weights.items():
        for (b,), wb in nu._weights.items():
            c = (g.mul(a, b),)
            weights[c] = weights.get(c, ZERO) + wa * wb
    return Measure(g, mu.vars, weights)


def tv_distance(mu: Measure, nu: Measure) -> Fraction:
    """Total variation distance: half the L1 distance between weight tables."""
    if mu.structure is not nu.structure and mu.structure != nu.structure:
        raise MeasureError("tv_distance requires measures on the same structure")
    if mu.arity != nu.arity:
        raise MeasureError(f"arity mismatch: {mu.arity} vs {nu.arity}")
    points = set(mu._weights) | set(nu._weights)
    return sum((abs(mu.weight(p) - nu.weight(p)) for p in points), ZERO) / 2


# ---------------------------------------------------------------------------
# JSON measure files


def measure_to_json_dict(mu: Measure) -> dict:
    return {
        "variable_arity": mu.arity,
        "atoms": [{"point": list(p), "weight": fraction_str(w)} for p, w in mu.items()],
    }


def measure_from_json_dict(data: Mapping, structure: FiniteStructure, vars: tuple[str, ...] | None = None) -> Measure:
    try:
        k = int(data["variable_arity"])
        atoms = data["atoms"]
        weights = {tuple(atom["point"]): parse_fraction(atom["weight"]) for atom in atoms}
    except (KeyError, TypeError, ValueError) as exc:
        raise MeasureError(f"malformed measure file: {exc}") from None
    if vars is None:
        vars = ("x",) if k == 1 else tuple(f"x{i + 1}" for i in range(k))
    if len(vars) != k:
        raise MeasureError(f"variable_arity {k} does not match variables {vars}")
    return Measure(structure, vars, weights)


def load_measure(path: str | Path, structure: FiniteStructure, vars: tuple[str, ...] | None = None) -> Measure:
    with open(path) as fh:
        return measure_from_json_dict(json.load(fh), structure, vars)


def save_measure(mu: Measure, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(measure_to_json_dict(mu), fh, indent=2, sort_keys=True)
        fh.write("\n")
