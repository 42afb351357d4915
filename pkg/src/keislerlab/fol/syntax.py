"""Terms, formulas, signatures, and variable partitions.

Formulas are immutable trees. The split of free variables into object
variables (the ones a measure lives on) and parameter variables is not part
of the syntax; it is carried by :class:`PartitionedFormula` so the same tree
can be re-partitioned freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..errors import ParseError, SignatureError

__all__ = [
    "Var",
    "Const",
    "Func",
    "Term",
    "Rel",
    "Eq",
    "Not",
    "And",
    "Or",
    "Implies",
    "Iff",
    "ForAll",
    "Exists",
    "Formula",
    "Signature",
    "PartitionedFormula",
    "free_vars",
    "bound_vars",
    "all_vars",
    "validate_formula",
    "conjoin",
]


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Func:
    name: str
    args: tuple["Term", ...]


Term = Union[Var, Const, Func]


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ForAll:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Rel, Eq, Not, And, Or, Implies, Iff, ForAll, Exists]

_BINARY = (And, Or, Implies, Iff)
_QUANT = (ForAll, Exists)


def conjoin(formulas: list[Formula]) -> Formula:
    """Left fold of a nonempty list under conjunction."""
    if not formulas:
        raise ValueError("conjoin requires at least one formula")
    out = formulas[0]
    for f in formulas[1:]:
        out = And(out, f)
    return out


def _term_vars(t: Term, acc: set[str]) -> None:
    if isinstance(t, Var):
        acc.add(t.name)
    elif isinstance(t, Func):
        for a in t.args:
            _term_vars(a, acc)


def free_vars(f: Formula) -> frozenset[str]:
    """Free variables of a formula."""
    acc: set[str] = set()

    def walk(g: Formula, bound: frozenset[str]) -> None:
        if isinstance(g, Rel):
            local: set[str] = set()
            for a in g.args:
                _term_vars(a, local)
            acc.update(local - bound)
        elif isinstance(g, Eq):
            local = set()
            _term_vars(g.left, local)
            _term_vars(g.right, local)
            acc.update(local - bound)
        elif isinstance(g, Not):
            walk(g.body, bound)
        elif isinstance(g, _BINARY):
            walk(g.left, bound)
            walk(g.right, bound)
        else:
            walk(g.body, bound | {g.var})

    walk(f, frozenset())
    return frozenset(acc)


def bound_vars(f: Formula) -> frozenset[str]:
    acc: set[str] = set()

    def walk(g: Formula) -> None:
        if isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, _BINARY):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, _QUANT):
            acc.add(g.var)
            walk(g.body)

    walk(f)
    return frozenset(acc)


def all_vars(f: Formula) -> frozenset[str]:
    acc: set[str] = set(bound_vars(f))

    def walk_term(t: Term) -> None:
        _term_vars(t, acc)

    def walk(g: Formula) -> None:
        if isinstance(g, Rel):
            for a in g.args:
                walk_term(a)
        elif isinstance(g, Eq):
            walk_term(g.left)
            walk_term(g.right)
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, _BINARY):
            walk(g.left)
            walk(g.right)
        else:
            walk(g.body)

    walk(f)
    return frozenset(acc)


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True)
class Signature:
    """Relation/function/constant symbols with arities.

    Symbol names must be pairwise distinct across the three kinds; relation
    and function arities are at least 1.
    """

    relations: tuple[tuple[str, int], ...] = ()
    functions: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        names = [n for n, _ in self.relations] + [n for n, _ in self.functions] + list(self.constants)
        if len(names) != len(set(names)):
            raise SignatureError("symbol names must be unique across relations, functions, constants")
        for name, arity in list(self.relations) + list(self.functions):
            if arity < 1:
                raise SignatureError(f"arity of {name!r} must be >= 1, got {arity}")
        for name in names:
            if not name or not (name[0].isalpha() and all(c.isalnum() or c == "_" for c in name)):
                raise SignatureError(f"invalid symbol name {name!r}")

    @classmethod
    def make(
        cls,
        relations: dict[str, int] | None = None,
        functions: dict[str, int] | None = None,
        constants: tuple[str, ...] | list[str] = (),
    ) -> "Signature":
        return cls(
            tuple(sorted((relations or {}).items())),
            tuple(sorted((functions or {}).items())),
            tuple(constants),
        )

    @property
    def relation_arities(self) -> dict[str, int]:
        return dict(self.relations)

    @property
    def function_arities(self) -> dict[str, int]:
        return dict(self.functions)

    def kind_of(self, name: str) -> str | None:
        if name in self.relation_arities:
            return "relation"
        if name in self.function_arities:
            return "function"
        if name in self.constants:
            return "constant"
        return None


def _validate_term(t: Term, sig: Signature, where: str) -> None:
    if isinstance(t, Var):
        if sig.kind_of(t.name) is not None:
            raise SignatureError(f"{where}: {t.name!r} is a declared symbol, not a variable")
    elif isinstance(t, Const):
        if t.name not in sig.constants:
            raise SignatureError(f"{where}: undeclared constant {t.name!r}")
    else:
        arity = sig.function_arities.get(t.name)
        if arity is None:
            raise SignatureError(f"{where}: undeclared function {t.name!r}")
        if len(t.args) != arity:
            raise SignatureError(f"{where}: function {t.name!r} expects {arity} arguments, got {len(t.args)}")
        for a in t.args:
            _validate_term(a, sig, where)


def validate_formula(f: Formula, sig: Signature) -> None:
    """Check that every atom is well-typed against the signature."""
    if isinstance(f, Rel):
        arity = sig.relation_arities.get(f.name)
        if arity is None:
            raise SignatureError(f"undeclared relation {f.name!r}")
        if len(f.args) != arity:
            raise SignatureError(f"relation {f.name!r} expects {arity} arguments, got {len(f.args)}")
        for a in f.args:
            _validate_term(a, sig, f"relation {f.name!r}")
    elif isinstance(f, Eq):
        _validate_term(f.left, sig, "equality")
        _validate_term(f.right, sig, "equality")
    elif isinstance(f, Not):
        validate_formula(f.body, sig)
    elif isinstance(f, _BINARY):
        validate_formula(f.left, sig)
        validate_formula(f.right, sig)
    else:
        if sig.kind_of(f.var) is not None:
            raise SignatureError(f"quantified variable {f.var!r} clashes with a declared symbol")
        validate_formula(f.body, sig)


# ---------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class PartitionedFormula:
    """A formula together with its object/parameter variable split.

    ``obj_vars`` are the variables a measure ranges over; ``param_vars`` are
    the slots that get filled with elements when taking the measure of an
    instance. Every free variable of the formula must appear on exactly one
    side; declared-but-unused variables are allowed (they fix tuple arity).
    """

    formula: Formula
    obj_vars: tuple[str, ...] = ()
    param_vars: tuple[str, ...] = ()
    _free: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        declared = self.obj_vars + self.param_vars
        if len(declared) != len(set(declared)):
            raise ParseError("partition declares a variable twice")
        fv = free_vars(self.formula)
        missing = fv - set(declared)
        if missing:
            raise ParseError(f"free variables not declared in the partition: {sorted(missing)}")
        object.__setattr__(self, "_free", fv)

    @property
    def free(self) -> frozenset[str]:
        return self._free

    def is_sentence(self) -> bool:
        return not self._free

    def swapped(self) -> "PartitionedFormula":
        return PartitionedFormula(self.formula, self.param_vars, self.obj_vars)

    def with_partition(self, obj_vars: tuple[str, ...], param_vars: tuple[str, ...]) -> "PartitionedFormula":
        return PartitionedFormula(self.formula, obj_vars, param_vars)
