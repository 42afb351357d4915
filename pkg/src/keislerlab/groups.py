"""Subgroups, Haar measures, idempotent classification, convolution orbits.

All weights stay exact rationals; convergence thresholds are exact-rational
comparisons, so slow convergence and genuine periodicity are never confused
by rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InvariantViolation, MeasureError, StructureError
from .measures import Measure, convolution, tv_distance
from .structures import GroupTable

__all__ = [
    "Subgroup",
    "subgroups",
    "subgroup_generated",
    "haar",
    "is_idempotent",
    "classify_idempotent",
    "ConvolutionOrbit",
    "convolution_powers",
]

ZERO = Fraction(0)
SUBGROUP_SIZE_GUARD = 64


@dataclass(frozen=True)
class Subgroup:
    """A verified subgroup of a group table."""

    group: GroupTable
    elements: frozenset[int]

    def __post_init__(self) -> None:
        g = self.group
        if g.identity not in self.elements:
            raise StructureError("subgroup must contain the identity")
        for a in self.elements:
            if g.inv(a) not in self.elements:
                raise StructureError(f"subgroup not closed under inverse at {a}")
            for b in self.elements:
                if g.mul(a, b) not in self.elements:
                    raise StructureError(f"subgroup not closed under product at ({a},{b})")

    @property
    def order(self) -> int:
        return len(self.elements)

    def sorted_elements(self) -> tuple[int, ...]:
        return tuple(sorted(self.elements))


def _closure(g: GroupTable, seed: frozenset[int]) -> frozenset[int]:
    closed = set(seed) | {g.identity}
    frontier = list(closed)
    while frontier:
        a = frontier.pop()
        for b in list(closed):
            for c in (g.mul(a, b), g.mul(b, a), g.inv(a)):
                if c not in closed:
                    closed.add(c)
                    frontier.append(c)
    return frozenset(closed)


def subgroup_generated(g: GroupTable, elements) -> Subgroup:
    """The smallest subgroup containing the given elements."""
    return Subgroup(g, _closure(g, frozenset(elements)))


def subgroups(g: GroupTable) -> list[Subgroup]:
    """All subgroups, by closing 1- and 2-generated subgroups under joins.

    Complete: any subgroup is the join of the cyclic subgroups of its
    elements, and joins of already-found subgroups are added until nothing
    new appears.
    """
    if g.universe_size > SUBGROUP_SIZE_GUARD:
        raise StructureError(f"subgroup enumeration limited to order <= {SUBGROUP_SIZE_GUARD}")
    found: set[frozenset[int]] = {frozenset({g.identity})}
    for a in g.universe:
        found.add(_closure(g, frozenset({a})))
    for a in g.universe:
        for b in g.universe:
            if a < b:
                found.add(_closure(g, frozenset({a, b})))
    changed = True
    while changed:
        changed = False
        current = sorted(found, key=lambda s: (len(s), sorted(s)))
        for i, h1 in enumerate(current):
            for h2 in current[i + 1 :]:
                if h1 <= h2 or h2 <= h1:
                    continue
                join = _closure(g, h1 | h2)
                if join not in found:
                    found.add(join)
                    changed = True
    return [Subgroup(g, h) for h in sorted(found, key=lambda s: (len(s), sorted(s)))]


def haar(h: Subgroup) -> Measure:
    """Uniform probability on the subgroup (zero elsewhere)."""
    share = Fraction(1, h.order)
    return Measure(h.group, ("x",), {(a,): share for a in h.elements})


def is_idempotent(mu: Measure) -> bool:
    """Exact test of mu * mu = mu (no tolerance)."""
    if not isinstance(mu.structure, GroupTable):
        raise MeasureError("idempotence is defined on group tables")
    return convolution(mu, mu) == mu


def classify_idempotent(mu: Measure) -> Subgroup | None:
    """The subgroup H with mu = haar(H), or None when mu is not idempotent.

    When mu is idempotent, its support must be a subgroup carrying uniform
    weights; each piece of that is verified independently rather than
    assumed, and a failure raises InvariantViolation (it would falsify the
    classical classification of idempotents or reveal a bug here).
    """
    if not is_idempotent(mu):
        return None
    g = mu.structure
    support = frozenset(p[0] for p in mu.support)
    expected = Fraction(1, len(support))
    for p in mu.support:
        if mu.weight(p) != expected:
            raise InvariantViolation(f"idempotent measure is not uniform on its support at {p}")
    try:
        h = Subgroup(g, support)
    except StructureError as exc:
        raise InvariantViolation(f"idempotent measure's support is not a subgroup: {exc}") from None
    return h


@dataclass(frozen=True)
class ConvolutionOrbit:
    """Convolution powers of a measure with detected limiting behavior.

    ``status`` is one of ``converged``, ``periodic``, ``exhausted``. For a
    converged orbit ``limit`` holds the verified idempotent limit and
    ``limit_gap`` the exact tv distance from the last iterate to it. For a
    periodic orbit ``period``/``preperiod`` describe the cycle and
    ``cesaro_limit`` holds the exact cycle average (an idempotent). Cesaro
    running averages are recorded when requested.
    """

    base: Measure
    iterates: tuple[Measure, ...]
    status: str
    limit: Measure | None = None
    limit_index: int | None = None
    limit_gap: Fraction | None = None
    period: int | None = None
    preperiod: int | None = None
    cesaro_averages: tuple[Measure, ...] | None = None
    cesaro_limit: Measure | None = None
    classified: Subgroup | None = None

    @property
    def steps(self) -> int:
        return len(self.iterates)


def _cesaro_averages(iterates: Sequence[Measure]) -> tuple[Measure, ...]:
    out = []
    running: dict[tuple[int, ...], Fraction] = {}
    for n, mu in enumerate(iterates, start=1):
        for p, w in mu.items():
            running[p] = running.get(p, ZERO) + w
        out.append(Measure(mu.structure, mu.vars, {p: w / n for p, w in running.items()}))
    return tuple(out)


def convolution_powers(
    mu: Measure,
    max_n: int,
    tol: Fraction = Fraction(1, 10**9),
    cesaro: bool = False,
) -> ConvolutionOrbit:
    """Iterate mu, mu*mu, mu*mu*mu, ... and detect the limiting behavior.

    Detection order at each new power: exact recurrence first (a repeat of
    the previous iterate is an exact fixed point, hence converged; a repeat
    of an earlier one is a genuine cycle), then the tv-threshold test. A
    threshold-converged orbit proposes the uniform measure on the subgroup
    generated by the support as its limit; either way the limit is verified
    idempotent via classify_idempotent before being reported.
    """
    if max_n < 1:
        raise MeasureError("max_n must be >= 1")
    if not isinstance(mu.structure, GroupTable):
        raise MeasureError("convolution powers require a group table")
    tol = Fraction(tol)
    g = mu.structure
    iterates = [mu]
    seen = {mu.table_key(): 0}

    def finish(status: str, **kw) -> ConvolutionOrbit:
        averages = _cesaro_averages(iterates) if cesaro else None
        return ConvolutionOrbit(mu, tuple(iterates), status, cesaro_averages=averages, **kw)

    for _ in range(max_n - 1):
        nxt = convolution(iterates[-1], mu)
        key = nxt.table_key()
        if key in seen:
            j = seen[key]
            if j == len(iterates) - 1:
                # exact fixed point: nxt == last iterate, so the last iterate
                # is idempotent (repeated convolution reproduces it)
                limit = iterates[-1]
                h = classify_idempotent(limit)
                if h is None:
                    raise InvariantViolation("exact convolution fixed point failed the idempotence test")
                return finish(
                    "converged",
                    limit=limit,
                    limit_index=len(iterates),
                    limit_gap=ZERO,
                    cesaro_limit=limit,
                    classified=h,
                )
            period = len(iterates) - j
            cycle = iterates[j:]
            acc: dict[tuple[int, ...], Fraction] = {}
            for m in cycle:
                for p, w in m.items():
                    acc[p] = acc.get(p, ZERO) + w
            cycle_avg = Measure(g, mu.vars, {p: w / period for p, w in acc.items()})
            h = classify_idempotent(cycle_avg)
            if h is None:
                raise InvariantViolation("cycle average of a periodic orbit failed the idempotence test")
            return finish("periodic", period=period, preperiod=j, cesaro_limit=cycle_avg, classified=h)
        gap = tv_distance(nxt, iterates[-1])
        iterates.append(nxt)
        seen[key] = len(iterates) - 1
        if gap < tol:
            candidate = haar(subgroup_generated(g, [p[0] for p in mu.support]))
            h = classify_idempotent(candidate)
            if h is None:
                raise InvariantViolation("proposed orbit limit failed the idempotence test")
            return finish(
                "converged",
                limit=candidate,
                limit_index=len(iterates),
                limit_gap=tv_distance(nxt, candidate),
                cesaro_limit=candidate,
                classified=h,
            )
    return finish("exhausted")
