"""Average-measure approximation, VC diagnostics, and bucket certificates.

Searches are heuristic but acceptance never is: any returned witness has its
sup-error recomputed exhaustively over every parameter tuple before the
result is handed back.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .defnlab import LevelBuckets, definability_table
from .engine import satisfaction_rows
from .errors import MeasureError
from .fol.syntax import PartitionedFormula
from .fol.transforms import encode_selector
from .measures import Measure

__all__ = [
    "ApproxResult",
    "UniformApproxResult",
    "sup_error",
    "find_approximation",
    "find_uniform_approximation",
    "exact_average_points",
    "ShatterReport",
    "vc_dimension",
    "Certificate",
    "certificate_check",
    "SAMPLE_CONSTANT",
]

ZERO = Fraction(0)
SAMPLE_CONSTANT = 8  # initial i.i.d. sample size is ceil(SAMPLE_CONSTANT / eps^2)


@dataclass(frozen=True)
class ApproxResult:
    """A candidate point list with its exhaustively verified sup-error."""

    points: tuple[tuple[int, ...], ...]
    error: Fraction
    verified: bool
    strategy: str
    seed: int

    def meets(self, eps: Fraction) -> bool:
        return self.verified and self.error < eps

    @property
    def size(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class UniformApproxResult:
    """A single point list serving several formulas at once."""

    points: tuple[tuple[int, ...], ...]
    per_formula_errors: tuple[Fraction, ...]
    error: Fraction
    verified: bool
    route: str
    seed: int

    def meets(self, eps: Fraction) -> bool:
        return self.verified and self.error < eps

    @property
    def size(self) -> int:
        return len(self.points)


def _av_counts(structure, pf: PartitionedFormula, points, params) -> list[int]:
    rows = satisfaction_rows(structure, pf.formula, pf.obj_vars, pf.param_vars, points, params)
    return [sum(row) for row in rows]


def sup_error(mu: Measure, pf: PartitionedFormula, points: Sequence[tuple[int, ...]]) -> Fraction:
    """Worst instance gap between mu and the average over the points.

    max over all parameter tuples b of |mu(phi(x,b)) - Av(points)(phi(x,b))|,
    computed exhaustively and exactly.
    """
    if not points:
        raise MeasureError("sup_error requires a nonempty point list")
    if pf.obj_vars != mu.vars:
        raise MeasureError(f"formula object variables {pf.obj_vars} do not match measure variables {mu.vars}")
    table = definability_table(mu, pf)
    params = list(mu.structure.tuples(len(pf.param_vars)))
    counts = _av_counts(mu.structure, pf, list(points), params)
    r = len(points)
    worst = ZERO
    for b, c in zip(params, counts):
        gap = abs(table.values[b] - Fraction(c, r))
        if gap > worst:
            worst = gap
    return worst


def exact_average_points(mu: Measure, cap: int = 512) -> list[tuple[int, ...]] | None:
    """Point multiset whose average reproduces mu exactly, or None if too big.

    Every weight is m_i / D for the common denominator D; repeating each
    support point m_i times yields D points with Av = mu and sup-error 0.
    """
    items = mu.items()
    denom = 1
    for _, w in items:
        denom = denom * w.denominator // math.gcd(denom, w.denominator)
    if denom > cap:
        return None
    points: list[tuple[int, ...]] = []
    for p, w in items:
        points.extend([p] * int(w * denom))
    return points


def _sample_points(mu: Measure, rng: random.Random, count: int) -> list[tuple[int, ...]]:
    support = mu.support
    cumulative: list[float] = []
    acc = 0.0
    for p in support:
        acc += float(mu.weight(p))
        cumulative.append(acc)
    out = []
    for _ in range(count):
        u = rng.random()
        lo, hi = 0, len(support) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if u <= cumulative[mid]:
                hi = mid
            else:
                lo = mid + 1
        out.append(support[lo])
    return out


def find_approximation(
    mu: Measure,
    pf: PartitionedFormula,
    eps: Fraction,
    strategy: str = "sample",
    seed: int = 0,
    budget: int = 8,
    initial_size: int | None = None,
) -> ApproxResult:
    """Search for a point list whose average tracks mu within eps, everywhere.

    Strategies:

    * ``sample``   -- i.i.d. draws from mu, ceil(8/eps^2) points to start,
      doubling after each failed exhaustive verification, up to ``budget``
      attempts.
    * ``exchange`` -- greedy descent on the exact sup-error: start from the
      exact-average multiset when its size is within the replication cap
      (otherwise an i.i.d. sample) and repeatedly apply the
      lexicographically smallest improving single-point swap.

    Whatever happens, the returned error is recomputed exhaustively; if the
    budget runs out the best verified candidate is returned and the caller
    decides (``meets(eps)`` is then False).
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise MeasureError("eps must be positive")
    rng = random.Random(seed)
    if strategy == "sample":
        size = initial_size or math.ceil(SAMPLE_CONSTANT / (eps * eps))
        best_points: tuple[tuple[int, ...], ...] = ()
        best_error: Fraction | None = None
        for _ in range(max(1, budget)):
            points = _sample_points(mu, rng, size)
            err = sup_error(mu, pf, points)
            if best_error is None or err < best_error:
                best_points, best_error = tuple(points), err
            if err < eps:
                break
            size *= 2
        assert best_error is not None
        return ApproxResult(best_points, best_error, True, "sample", seed)

    if strategy == "exchange":
        replication_cap = initial_size or 512
        start = exact_average_points(mu, cap=replication_cap)
        if start is None:
            start = _sample_points(mu, rng, initial_size or math.ceil(SAMPLE_CONSTANT / (eps * eps)))
        points, err = _exchange_descent(mu, pf, start, eps, rounds=max(1, budget))
        return ApproxResult(tuple(points), err, True, "exchange", seed)

    raise MeasureError(f"unknown strategy {strategy!r} (expected 'sample' or 'exchange')")


def _exchange_descent(mu, pf, points, eps, rounds):
    """Lexicographically smallest improving swap, repeated; exact arithmetic."""
    points = list(points)
    structure = mu.structure
    table = definability_table(mu, pf)
    params = list(structure.tuples(len(pf.param_vars)))
    k = mu.arity
    candidates = list(structure.tuples(k))
    # counts[j] = number of current points satisfying the instance at params[j]
    counts = _av_counts(structure, pf, points, params)
    # hit[c][j] for candidate replacement values
    cand_rows = satisfaction_rows(structure, pf.formula, pf.obj_vars, pf.param_vars, candidates, params)
    cand_index = {c: i for i, c in enumerate(candidates)}
    r = len(points)

    def error_of(cts) -> Fraction:
        worst = ZERO
        for b, c in zip(params, cts):
            gap = abs(table.values[b] - Fraction(c, r))
            if gap > worst:
                worst = gap
        return worst

    current = error_of(counts)
    for _ in range(rounds):
        if current < eps:
            break
        improved = False
        for i in sorted(range(r), key=lambda t: points[t]):
            old_row = [cand_rows[j][cand_index[points[i]]] for j in range(len(params))]
            for cand in candidates:
                if cand == points[i]:
                    continue
                new_counts = [
                    counts[j] - old_row[j] + cand_rows[j][cand_index[cand]] for j in range(len(params))
                ]
                err = error_of(new_counts)
                if err < current:
                    points[i] = cand
                    counts = new_counts
                    current = err
                    improved = True
                    break
            if improved:
                break
        if not improved:
            break
    return points, sup_error(mu, pf, points)


def find_uniform_approximation(
    mu: Measure,
    formulas: Sequence[PartitionedFormula],
    seed: int = 0,
    budget: int = 8,
    route: str = "direct",
) -> UniformApproxResult:
    """One point list achieving sup-error < 1/n for each of the n formulas.

    ``route='direct'`` verifies each formula separately; ``route='selector'``
    verifies the single packed selector formula over its combined parameter
    space instead (exhaustive in the packed parameters, so practical only on
    small structures). The two acceptance decisions agree by construction of
    the encoding, and the test suite checks that.
    """
    if not formulas:
        raise MeasureError("need at least one formula")
    n = len(formulas)
    target = Fraction(1, n)
    for pf in formulas:
        if pf.obj_vars != mu.vars:
            raise MeasureError(f"formula object variables {pf.obj_vars} do not match measure variables {mu.vars}")

    best: UniformApproxResult | None = None
    rng = random.Random(seed)
    for attempt in range(max(1, budget)):
        if attempt == 0:
            points = exact_average_points(mu)
            if points is None:
                points = _sample_points(mu, rng, math.ceil(SAMPLE_CONSTANT * n * n))
        else:
            points = _sample_points(mu, rng, math.ceil(SAMPLE_CONSTANT * n * n) * 2**attempt)
        per = tuple(sup_error(mu, pf, points) for pf in formulas)
        if route == "selector":
            worst = sup_error(mu, encode_selector(formulas), points)
        elif route == "direct":
            worst = max(per)
        else:
            raise MeasureError(f"unknown route {route!r} (expected 'direct' or 'selector')")
        result = UniformApproxResult(tuple(points), per, worst, True, route, seed)
        if best is None or result.error < best.error:
            best = result
        if result.error < target:
            break
    assert best is not None
    return best


# ---------------------------------------------------------------------------
# VC diagnostics


@dataclass(frozen=True)
class ShatterReport:
    """Shatter function values and the VC dimension they determine."""

    values: tuple[int, ...]  # pi(1), ..., pi(cap)
    cap: int

    @property
    def vc_dimension(self) -> int:
        vc = 0
        for d, v in enumerate(self.values, start=1):
            if v == 2**d:
                vc = d
        return vc

    @property
    def capped(self) -> bool:
        """True when the report only bounds the dimension from below."""
        return bool(self.values) and self.values[-1] == 2**self.cap

    def describe(self) -> str:
        if self.capped:
            return f">= {self.cap}"
        return str(self.vc_dimension)


def vc_dimension(structure, pf: PartitionedFormula, cap: int) -> ShatterReport:
    """Exact shatter function of the instance family, up to ``cap``.

    The family is { phi(M, b) : b } viewed as subsets of the object-tuple
    space; pi(d) is the largest number of traces on any d point tuples,
    found by exhaustive subset search (points with identical incidence
    columns are deduplicated first, which changes nothing).
    """
    if cap < 1:
        raise MeasureError("cap must be >= 1")
    if cap > 6:
        raise MeasureError("cap above 6 is not supported (combinatorial explosion guard)")
    domain = list(structure.tuples(len(pf.obj_vars)))
    params = list(structure.tuples(len(pf.param_vars)))
    rows = satisfaction_rows(structure, pf.formula, pf.obj_vars, pf.param_vars, domain, params)
    # column i = incidence pattern of domain point i across all parameters
    columns = {bytes(row[i] for row in rows) for i in range(len(domain))}
    distinct = sorted(columns)
    values = []
    for d in range(1, cap + 1):
        best = 0
        for combo in itertools.combinations(distinct, min(d, len(distinct))):
            traces = {tuple(col[j] for col in combo) for j in range(len(params))}
            best = max(best, len(traces))
            if best == 2 ** len(combo):
                break
        values.append(best)
    return ShatterReport(tuple(values), cap)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Certificate:
    """Outcome of checking that a point list certifies a bucket table.

    Passing means, for every parameter b: (i) whenever b lies in bucket j
    the average over the points is within 2/n of j/n; (ii) with A the set of
    points satisfying the instance at b and j_A = floor(|A| n / r), b lies
    in bucket j_A + t for some t in {-1, 0, 1, 2}. On failure the first
    offending parameter is recorded.
    """

    granularity: int
    points: tuple[tuple[int, ...], ...]
    passed: bool
    counterexample: tuple[int, ...] | None
    reason: str | None

    @property
    def point_count(self) -> int:
        return len(self.points)


def certificate_check(
    mu: Measure,
    pf: PartitionedFormula,
    points: Sequence[tuple[int, ...]],
    buckets: LevelBuckets,
    n: int,
) -> Certificate:
    """Extensional check that the points certify the level buckets."""
    if buckets.granularity != n:
        raise MeasureError(f"buckets built at granularity {buckets.granularity}, check requested at {n}")
    if buckets.table.pf != pf:
        raise MeasureError("buckets were built for a different formula")
    points = [tuple(p) for p in points]
    if not points:
        raise MeasureError("certificate needs a nonempty point list")
    structure = mu.structure
    params = list(structure.tuples(len(pf.param_vars)))
    counts = _av_counts(structure, pf, points, params)
    r = len(points)
    two_over_n = Fraction(2, n)
    for b, count in zip(params, counts):
        av = Fraction(count, r)
        members = buckets.membership(b)
        for j in members:
            if not abs(av - Fraction(j, n)) < two_over_n:
                return Certificate(
                    n, tuple(points), False, b, f"bucket {j}: |Av - {j}/{n}| = {abs(av - Fraction(j, n))} >= 2/{n}"
                )
        j_a = (count * n) // r
        if not any(j_a + t in members for t in (-1, 0, 1, 2)):
            return Certificate(
                n, tuple(points), False, b, f"index {j_a}: parameter lies in buckets {members}, none of j_A-1..j_A+2"
            )
    return Certificate(n, tuple(points), True, None, None)
