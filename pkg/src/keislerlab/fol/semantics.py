"""Reference evaluator: standard satisfaction over a finite structure.

Quantifiers range over the whole universe with short-circuiting. This tree
walker is the semantic ground truth; the batch engine (keislerlab.engine)
must agree with it everywhere and is tested against it.
"""

from __future__ import annotations

from typing import Mapping

from ..errors import EvaluationError
from .syntax import And, Const, Eq, Exists, ForAll, Formula, Iff, Implies, Not, Or, Rel, Term, Var

__all__ = ["evaluate", "term_value"]


def term_value(structure, t: Term, env: dict[str, int]) -> int:
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise EvaluationError(f"unbound variable {t.name!r}") from None
    if isinstance(t, Const):
        try:
            return structure.constants[t.name]
        except KeyError:
            raise EvaluationError(f"structure does not interpret constant {t.name!r}") from None
    try:
        table = structure.functions[t.name]
    except KeyError:
        raise EvaluationError(f"structure does not interpret function {t.name!r}") from None
    args = tuple(term_value(structure, a, env) for a in t.args)
    return table[args]


def _eval(structure, f: Formula, env: dict[str, int]) -> bool:
    if isinstance(f, Rel):
        try:
            table = structure.relations[f.name]
        except KeyError:
            raise EvaluationError(f"structure does not interpret relation {f.name!r}") from None
        return tuple(term_value(structure, a, env) for a in f.args) in table
    if isinstance(f, Eq):
        return term_value(structure, f.left, env) == term_value(structure, f.right, env)
    if isinstance(f, Not):
        return not _eval(structure, f.body, env)
    if isinstance(f, And):
        return _eval(structure, f.left, env) and _eval(structure, f.right, env)
    if isinstance(f, Or):
        return _eval(structure, f.left, env) or _eval(structure, f.right, env)
    if isinstance(f, Implies):
        return (not _eval(structure, f.left, env)) or _eval(structure, f.right, env)
    if isinstance(f, Iff):
        return _eval(structure, f.left, env) == _eval(structure, f.right, env)
    if isinstance(f, (ForAll, Exists)):
        want = isinstance(f, Exists)
        name = f.var
        had = name in env
        old = env.get(name)
        try:
            for v in range(structure.universe_size):
                env[name] = v
                if _eval(structure, f.body, env) == want:
                    return want
        finally:
            if had:
                env[name] = old  # type: ignore[assignment]
            else:
                env.pop(name, None)
        return not want
    raise EvaluationError(f"not a formula node: {f!r}")


def evaluate(structure, f: Formula, assignment: Mapping[str, int] | None = None) -> bool:
    """Truth value of ``f`` in ``structure`` under ``assignment``.

    Pure: the assignment is copied before use. Raises EvaluationError if a
    free variable is missing or a symbol is not interpreted.
    """
    env = dict(assignment or {})
    for name, value in env.items():
        if not (0 <= value < structure.universe_size):
            raise EvaluationError(f"assignment {name}={value} outside universe 0..{structure.universe_size - 1}")
    return _eval(structure, f, env)
