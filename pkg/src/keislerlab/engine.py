"""Batch satisfaction engine with a compiled fast path.

Everything measure-valued in this package reduces to one primitive: given a
formula, a list of object tuples and a list of parameter tuples, decide
satisfaction for every (object, parameter) pair. That inner loop dominates
runtime for definability tables, sup-error verification, and certificates,
so it has two interchangeable backends:

* ``native`` -- a Cython kernel (keislerlab._satcore) interpreting a
  compiled form of the formula over flat integer tables;
* ``pure``   -- direct loops over the reference tree-walking evaluator.

The backend is chosen at import time; set ``KEISLERLAB_PURE=1`` to force the
interpreted path. Results are identical bit for bit (tested), and
``benchmarks/bench_engines.py`` compares their speed.
"""

from __future__ import annotations

import itertools
import os
from array import array
from typing import Iterable, Sequence

from .errors import EvaluationError
from .fol.semantics import _eval
from .fol.syntax import And, Const, Eq, ForAll, Formula, Iff, Implies, Not, Or, Rel, Var

try:  # compiled kernel is optional
    from . import _satcore as _native
except ImportError:  # pragma: no cover - depends on build environment
    _native = None

_FORCE_PURE = os.environ.get("KEISLERLAB_PURE", "") not in ("", "0")

__all__ = ["backend_name", "have_native", "satisfaction_rows", "truth_row"]


def have_native() -> bool:
    return _native is not None


def backend_name() -> str:
    return "pure" if (_FORCE_PURE or _native is None) else "native"


# ---------------------------------------------------------------------------
# program encoding (shared vocabulary with _satcore.pyx)

T_VAR, T_CONSTV, T_FUNC = 0, 1, 2
F_REL, F_EQ, F_NOT, F_AND, F_OR, F_IMP, F_IFF, F_ALL, F_EX = 10, 11, 12, 13, 14, 15, 16, 17, 18


class _Packed:
    """Flat integer tables for one structure, plus a program cache."""

    __slots__ = ("n", "rel_index", "rel_data", "rel_offsets", "func_index", "func_data", "func_offsets", "programs")

    def __init__(self, structure):
        n = structure.universe_size
        self.n = n
        self.rel_index = {}
        rel_data = bytearray()
        rel_offsets = []
        for name, arity in structure.signature.relations:
            self.rel_index[name] = len(rel_offsets)
            rel_offsets.append(len(rel_data))
            block = bytearray(n**arity)
            for t in structure.relations[name]:
                idx = 0
                for v in t:
                    idx = idx * n + v
                block[idx] = 1
            rel_data += block
        self.rel_data = bytes(rel_data)
        self.rel_offsets = array("i", rel_offsets)

        self.func_index = {}
        func_data = array("i")
        func_offsets = []
        for name, arity in structure.signature.functions:
            self.func_index[name] = len(func_offsets)
            func_offsets.append(len(func_data))
            table = structure.functions[name]
            for args in itertools.product(range(n), repeat=arity):
                func_data.append(table[args])
        self.func_data = func_data
        self.func_offsets = array("i", func_offsets)
        self.programs: dict = {}


def _packed_for(structure) -> _Packed:
    packed = structure._packed
    if packed is None:
        packed = _Packed(structure)
        structure._packed = packed
    return packed


class _Program:
    __slots__ = ("kind", "a", "b", "c", "pool", "root", "nslots")

    def __init__(self, kind, a, b, c, pool, root, nslots):
        self.kind = kind
        self.a = a
        self.b = b
        self.c = c
        self.pool = pool
        self.root = root
        self.nslots = nslots


def _compile(structure, packed: _Packed, formula: Formula, free_slots: dict[str, int]) -> _Program:
    kind: list[int] = []
    aa: list[int] = []
    bb: list[int] = []
    cc: list[int] = []
    pool: list[int] = []
    next_slot = [len(free_slots)]

    def emit(k: int, a: int = 0, b: int = 0, c: int = 0) -> int:
        kind.append(k)
        aa.append(a)
        bb.append(b)
        cc.append(c)
        return len(kind) - 1

    def term(t, scope: dict[str, int]) -> int:
        if isinstance(t, Var):
            slot = scope.get(t.name)
            if slot is None:
                raise EvaluationError(f"unbound variable {t.name!r}")
            return emit(T_VAR, slot)
        if isinstance(t, Const):
            try:
                return emit(T_CONSTV, structure.constants[t.name])
            except KeyError:
                raise EvaluationError(f"structure does not interpret constant {t.name!r}") from None
        children = [term(x, scope) for x in t.args]
        offset = len(pool)
        pool.extend(children)
        try:
            fidx = packed.func_index[t.name]
        except KeyError:
            raise EvaluationError(f"structure does not interpret function {t.name!r}") from None
        return emit(T_FUNC, fidx, offset, len(children))

    def walk(f: Formula, scope: dict[str, int]) -> int:
        if isinstance(f, Rel):
            children = [term(x, scope) for x in f.args]
            offset = len(pool)
            pool.extend(children)
            try:
                ridx = packed.rel_index[f.name]
            except KeyError:
                raise EvaluationError(f"structure does not interpret relation {f.name!r}") from None
            return emit(F_REL, ridx, offset, len(children))
        if isinstance(f, Eq):
            return emit(F_EQ, term(f.left, scope), term(f.right, scope))
        if isinstance(f, Not):
            return emit(F_NOT, walk(f.body, scope))
        if isinstance(f, (And, Or, Implies, Iff)):
            k = {And: F_AND, Or: F_OR, Implies: F_IMP, Iff: F_IFF}[type(f)]
            left = walk(f.left, scope)
            return emit(k, left, walk(f.right, scope))
        # quantifier: fresh slot, lexical shadowing
        slot = next_slot[0]
        next_slot[0] += 1
        inner = dict(scope)
        inner[f.var] = slot
        body = walk(f.body, inner)
        return emit(F_ALL if isinstance(f, ForAll) else F_EX, slot, body)

    root = walk(formula, dict(free_slots))
    return _Program(array("i", kind), array("i", aa), array("i", bb), array("i", cc), array("i", pool), root, next_slot[0])


def _program_for(structure, formula: Formula, var_order: tuple[str, ...]) -> _Program:
    packed = _packed_for(structure)
    key = (formula, var_order)
    prog = packed.programs.get(key)
    if prog is None:
        prog = _compile(structure, packed, formula, {v: i for i, v in enumerate(var_order)})
        packed.programs[key] = prog
    return prog


def _flatten(tuples: Sequence[tuple[int, ...]], arity: int) -> array:
    flat = array("i")
    for t in tuples:
        if len(t) != arity:
            raise EvaluationError(f"tuple {t} has arity {len(t)}, expected {arity}")
        flat.extend(t)
    return flat


def satisfaction_rows(
    structure,
    formula: Formula,
    x_vars: tuple[str, ...],
    y_vars: tuple[str, ...],
    x_tuples: Sequence[tuple[int, ...]],
    y_tuples: Iterable[tuple[int, ...]],
    backend: str | None = None,
) -> list[bytearray]:
    """Satisfaction matrix: rows indexed by parameter tuple, columns by object tuple.

    ``rows[j][i]`` is 1 iff the formula holds with ``x_vars`` bound to
    ``x_tuples[i]`` and ``y_vars`` bound to ``y_tuples[j]``.
    """
    if set(x_vars) & set(y_vars):
        raise EvaluationError("object and parameter variables overlap")
    x_list = list(x_tuples)
    y_list = list(y_tuples)
    mode = backend or backend_name()
    if mode == "native":
        if _native is None:
            raise EvaluationError("native backend requested but the compiled kernel is unavailable")
        return _native_rows(structure, formula, x_vars, y_vars, x_list, y_list)
    if mode != "pure":
        raise EvaluationError(f"unknown backend {mode!r}")
    return _pure_rows(structure, formula, x_vars, y_vars, x_list, y_list)


def _pure_rows(structure, formula, x_vars, y_vars, x_list, y_list) -> list[bytearray]:
    rows: list[bytearray] = []
    env: dict[str, int] = {}
    nx = len(x_list)
    for yt in y_list:
        env.update(zip(y_vars, yt))
        row = bytearray(nx)
        for i, xt in enumerate(x_list):
            env.update(zip(x_vars, xt))
            row[i] = _eval(structure, formula, env)
        rows.append(row)
    return rows


def _native_rows(structure, formula, x_vars, y_vars, x_list, y_list) -> list[bytearray]:
    packed = _packed_for(structure)
    prog = _program_for(structure, formula, x_vars + y_vars)
    x_arity = len(x_vars)
    y_arity = len(y_vars)
    x_flat = _flatten(x_list, x_arity)
    y_flat = _flatten(y_list, y_arity)
    nx, ny = len(x_list), len(y_list)
    out = bytearray(nx * ny)
    if nx and ny:
        _native.sat_rows(
            packed.n,
            packed.rel_data,
            packed.rel_offsets,
            packed.func_data,
            packed.func_offsets,
            prog.kind,
            prog.a,
            prog.b,
            prog.c,
            prog.pool,
            prog.root,
            prog.nslots,
            x_flat,
            x_arity,
            nx,
            y_flat,
            y_arity,
            ny,
            out,
        )
    return [out[j * nx : (j + 1) * nx] for j in range(ny)]


def truth_row(
    structure,
    formula: Formula,
    vars: tuple[str, ...],
    tuples: Sequence[tuple[int, ...]],
    backend: str | None = None,
) -> bytearray:
    """Satisfaction of a formula at each tuple, with no parameter side."""
    rows = satisfaction_rows(structure, formula, vars, (), tuples, [()], backend=backend)
    return rows[0]
