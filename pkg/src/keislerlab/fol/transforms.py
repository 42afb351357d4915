"""Formula transformations: partition swap, substitution, selector encoding."""

from __future__ import annotations

from typing import Mapping, Sequence

from ..errors import ParseError
from .syntax import (
    And,
    Eq,
    Formula,
    Func,
    Iff,
    Implies,
    Not,
    Or,
    PartitionedFormula,
    Rel,
    Term,
    Var,
    all_vars,
    conjoin,
)

__all__ = ["swap_partition", "substitute", "encode_selector", "fresh_names"]


def swap_partition(pf: PartitionedFormula) -> PartitionedFormula:
    """Exchange the roles of object and parameter variables; same tree."""
    return pf.swapped()


def _subst_term(t: Term, mapping: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, Func):
        return Func(t.name, tuple(_subst_term(a, mapping) for a in t.args))
    return t


def substitute(f: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Replace free variables by terms.

    Raises ParseError if a substituted term would be captured by a
    quantifier; callers are expected to pick capture-free replacements.
    """
    if not mapping:
        return f

    def walk(g: Formula, active: dict[str, Term]) -> Formula:
        if isinstance(g, Rel):
            return Rel(g.name, tuple(_subst_term(a, active) for a in g.args))
        if isinstance(g, Eq):
            return Eq(_subst_term(g.left, active), _subst_term(g.right, active))
        if isinstance(g, Not):
            return Not(walk(g.body, active))
        if isinstance(g, (And, Or, Implies, Iff)):
            return type(g)(walk(g.left, active), walk(g.right, active))
        inner = {k: v for k, v in active.items() if k != g.var}
        for k, v in inner.items():
            replaced: set[str] = set()
            _collect_term_vars(v, replaced)
            if g.var in replaced:
                raise ParseError(f"substituting {k!r} under 'for {g.var}' would capture it")
        return type(g)(g.var, walk(g.body, inner))

    return walk(f, dict(mapping))


def _collect_term_vars(t: Term, acc: set[str]) -> None:
    if isinstance(t, Var):
        acc.add(t.name)
    elif isinstance(t, Func):
        for a in t.args:
            _collect_term_vars(a, acc)


def fresh_names(base: str, count: int, avoid: frozenset[str] | set[str]) -> list[str]:
    """Deterministic fresh variable names base1, base2, ... avoiding a set."""
    out: list[str] = []
    taken = set(avoid)
    i = 1
    while len(out) < count:
        cand = f"{base}{i}"
        if cand not in taken:
            out.append(cand)
            taken.add(cand)
        i += 1
    return out


def encode_selector(thetas: Sequence[PartitionedFormula]) -> PartitionedFormula:
    """Pack several formulas with shared object variables into one.

    Given theta_1(x, y_1), ..., theta_n(x, y_n), builds the single formula

        AND_i ( (sel = s_i  &  AND_{j != i} !(s_j = sel))  ->  theta_i(x, y_i) )

    over fresh selector variables sel, s_1, ..., s_n. When the selector
    values pick out exactly index i (s_i = sel and s_j != sel for j != i)
    the formula is equivalent to theta_i; when no index is picked out it is
    true. Parameter variables of the inputs are renamed apart if they clash.
    """
    if not thetas:
        raise ParseError("encode_selector requires at least one formula")
    obj = thetas[0].obj_vars
    for pf in thetas:
        if pf.obj_vars != obj:
            raise ParseError("all formulas must share the same object variable tuple")

    used: set[str] = set(obj)
    for pf in thetas:
        used |= all_vars(pf.formula)
        used |= set(pf.param_vars)

    # Rename parameter variables apart where they collide across formulas.
    renamed: list[PartitionedFormula] = []
    seen_params: set[str] = set()
    for pf in thetas:
        clashes = [v for v in pf.param_vars if v in seen_params]
        if clashes:
            new = fresh_names("p", len(clashes), frozenset(used))
            used.update(new)
            table = dict(zip(clashes, new))
            mapping = {old: Var(new_name) for old, new_name in table.items()}
            pf = PartitionedFormula(
                substitute(pf.formula, mapping),
                pf.obj_vars,
                tuple(table.get(v, v) for v in pf.param_vars),
            )
        seen_params.update(pf.param_vars)
        renamed.append(pf)

    n = len(renamed)
    sel = fresh_names("sel", 1, frozenset(used))[0]
    used.add(sel)
    slots = fresh_names("s", n, frozenset(used))

    clauses: list[Formula] = []
    for i, pf in enumerate(renamed):
        guards: list[Formula] = [Eq(Var(sel), Var(slots[i]))]
        guards.extend(Not(Eq(Var(slots[j]), Var(sel))) for j in range(n) if j != i)
        clauses.append(Implies(conjoin(guards), pf.formula))

    params: tuple[str, ...] = ()
    for pf in renamed:
        params += pf.param_vars
    params += (sel,) + tuple(slots)
    return PartitionedFormula(conjoin(clauses), obj, params)
