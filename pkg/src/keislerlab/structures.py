"""Finite structures, Paley graphs, group tables, and structure sequences.

Universe elements are always the integers 0..n-1. Structures are immutable
after construction and safe to share across threads.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import StructureError
from .fol.syntax import Signature

__all__ = [
    "FiniteStructure",
    "GroupTable",
    "StructureSequence",
    "paley",
    "is_prime",
    "cyclic_group",
    "dihedral_group",
    "symmetric_group",
    "quaternion_group",
    "group_from_table",
    "group_from_structure",
    "extension_property",
    "paley_sequence",
    "structure_to_json_dict",
    "structure_from_json_dict",
    "load_structure",
    "save_structure",
    "GRAPH_SIGNATURE",
    "GROUP_SIGNATURE",
]

GRAPH_SIGNATURE = Signature.make(relations={"R": 2})
GROUP_SIGNATURE = Signature.make(functions={"mul": 2, "inv": 1}, constants=("e",))


class FiniteStructure:
    """A finite relational/functional structure on universe {0, ..., n-1}."""

    def __init__(
        self,
        signature: Signature,
        universe_size: int,
        relations: Mapping[str, Iterable[tuple[int, ...]]] | None = None,
        functions: Mapping[str, Mapping[tuple[int, ...], int]] | None = None,
        constants: Mapping[str, int] | None = None,
        name: str | None = None,
    ):
        if universe_size < 1:
            raise StructureError("universe must be nonempty")
        self.signature = signature
        self.universe_size = universe_size
        self.name = name or f"structure(n={universe_size})"

        rels: dict[str, frozenset[tuple[int, ...]]] = {}
        given = dict(relations or {})
        for rel, arity in signature.relations:
            tuples = frozenset(tuple(t) for t in given.pop(rel, ()))
            for t in tuples:
                if len(t) != arity:
                    raise StructureError(f"relation {rel!r}: tuple {t} has wrong arity (expected {arity})")
                if not all(0 <= v < universe_size for v in t):
                    raise StructureError(f"relation {rel!r}: tuple {t} outside universe")
            rels[rel] = tuples
        if given:
            raise StructureError(f"relations not in signature: {sorted(given)}")

        funcs: dict[str, Mapping[tuple[int, ...], int]] = {}
        given_f = dict(functions or {})
        for func, arity in signature.functions:
            table = {tuple(k): v for k, v in dict(given_f.pop(func, {})).items()}
            expected = universe_size**arity
            if len(table) != expected:
                raise StructureError(f"function {func!r}: table has {len(table)} entries, needs {expected} (total)")
            for args, value in table.items():
                if len(args) != arity or not all(0 <= a < universe_size for a in args):
                    raise StructureError(f"function {func!r}: bad argument tuple {args}")
                if not 0 <= value < universe_size:
                    raise StructureError(f"function {func!r}: value {value} outside universe")
            funcs[func] = MappingProxyType(table)
        if given_f:
            raise StructureError(f"functions not in signature: {sorted(given_f)}")

        consts: dict[str, int] = {}
        given_c = dict(constants or {})
        for c in signature.constants:
            if c not in given_c:
                raise StructureError(f"constant {c!r} not interpreted")
            v = given_c.pop(c)
            if not 0 <= v < universe_size:
                raise StructureError(f"constant {c!r} = {v} outside universe")
            consts[c] = v
        if given_c:
            raise StructureError(f"constants not in signature: {sorted(given_c)}")

        self.relations: Mapping[str, frozenset[tuple[int, ...]]] = MappingProxyType(rels)
        self.functions: Mapping[str, Mapping[tuple[int, ...], int]] = MappingProxyType(funcs)
        self.constants: Mapping[str, int] = MappingProxyType(consts)
        self._packed = None  # lazy cache for the compiled engine

    @property
    def universe(self) -> range:
        return range(self.universe_size)

    def tuples(self, k: int) -> Iterator[tuple[int, ...]]:
        """All k-tuples of universe elements, lexicographic."""
        return itertools.product(self.universe, repeat=k)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, FiniteStructure):
            return NotImplemented
        return (
            self.signature == other.signature
            and self.universe_size == other.universe_size
            and dict(self.relations) == dict(other.relations)
            and {f: dict(t) for f, t in self.functions.items()} == {f: dict(t) for f, t in other.functions.items()}
            and dict(self.constants) == dict(other.constants)
        )

    def __hash__(self):  # identity hash: structures are compared rarely, shared widely
        return id(self)

    def __repr__(self) -> str:
        return f"<{self.name}>"


# ---------------------------------------------------------------------------
# Paley graphs


def is_prime(n: int) -> bool:
    """Deterministic trial division; inputs stay desk-scale."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def paley(q: int) -> FiniteStructure:
    """Graph on F_q joining a, b iff a - b is a nonzero square (q prime, q = 1 mod 4).

    The a != b requirement keeps the relation irreflexive; q = 1 mod 4 makes
    -1 a square, so the relation is symmetric.
    """
    if not is_prime(q):
        raise StructureError(f"q = {q} is not prime")
    if q % 4 != 1:
        raise StructureError(f"q = {q} is not congruent to 1 mod 4 (relation would not be symmetric)")
    residues = {(z * z) % q for z in range(1, q)}
    residues.discard(0)
    edges = {(a, b) for a in range(q) for b in range(q) if a != b and (a - b) % q in residues}
    return FiniteStructure(GRAPH_SIGNATURE, q, relations={"R": edges}, name=f"paley({q})")


# ---------------------------------------------------------------------------
# group tables


class GroupTable(FiniteStructure):
    """A finite group presented as a structure with mul, inv, and e.

    The group laws are verified exhaustively at construction (O(n^3) for
    associativity), so a GroupTable is a group, not just a magma.
    """

    def __init__(self, universe_size, mul_table, inv_table, identity, name=None):
        super().__init__(
            GROUP_SIGNATURE,
            universe_size,
            functions={"mul": mul_table, "inv": inv_table},
            constants={"e": identity},
            name=name or f"group(n={universe_size})",
        )
        self._validate_laws()
        mul = self.functions["mul"]
        self._mul_rows = tuple(tuple(mul[(a, b)] for b in self.universe) for a in self.universe)
        inv = self.functions["inv"]
        self._inv_row = tuple(inv[(a,)] for a in self.universe)

    def _validate_laws(self) -> None:
        mul = self.functions["mul"]
        inv = self.functions["inv"]
        e = self.constants["e"]
        n = self.universe_size
        for a in range(n):
            if mul[(e, a)] != a or mul[(a, e)] != a:
                raise StructureError(f"{self.name}: {e} is not a two-sided identity at {a}")
            if mul[(a, inv[(a,)])] != e or mul[(inv[(a,)], a)] != e:
                raise StructureError(f"{self.name}: inverse law fails at {a}")
        for a in range(n):
            for b in range(n):
                ab = mul[(a, b)]
                for c in range(n):
                    if mul[(ab, c)] != mul[(a, mul[(b, c)])]:
                        raise StructureError(f"{self.name}: associativity fails at ({a},{b},{c})")

    @property
    def identity(self) -> int:
        return self.constants["e"]

    def mul(self, a: int, b: int) -> int:
        return self._mul_rows[a][b]

    def inv(self, a: int) -> int:
        return self._inv_row[a]


def _finish_group(n: int, mul: dict[tuple[int, int], int], name: str) -> GroupTable:
    identity = None
    for e in range(n):
        if all(mul[(e, a)] == a and mul[(a, e)] == a for a in range(n)):
            identity = e
            break
    if identity is None:
        raise StructureError(f"{name}: no identity element")
    inv: dict[tuple[int, ...], int] = {}
    for a in range(n):
        b = next((b for b in range(n) if mul[(a, b)] == identity and mul[(b, a)] == identity), None)
        if b is None:
            raise StructureError(f"{name}: element {a} has no inverse")
        inv[(a,)] = b
    return GroupTable(n, mul, inv, identity, name=name)


def cyclic_group(n: int) -> GroupTable:
    """Integers mod n under addition."""
    if n < 1:
        raise StructureError("cyclic group order must be >= 1")
    mul = {(a, b): (a + b) % n for a in range(n) for b in range(n)}
    return _finish_group(n, mul, f"Z{n}")


def dihedral_group(k: int) -> GroupTable:
    """Symmetries of the regular k-gon, order 2k.

    Element f*k + r encodes x -> (-1)^f x + r mod k; multiplication is
    composition, so the construction is associative by design.
    """
    if k < 1:
        raise StructureError("dihedral parameter must be >= 1")
    n = 2 * k

    def compose(g1: int, g2: int) -> int:
        f1, r1 = divmod(g1, k)
        f2, r2 = divmod(g2, k)
        sign = -1 if f1 else 1
        return ((f1 + f2) % 2) * k + (sign * r2 + r1) % k

    mul = {(a, b): compose(a, b) for a in range(n) for b in range(n)}
    return _finish_group(n, mul, f"D{k}")


def symmetric_group(m: int) -> GroupTable:
    """All permutations of m points under composition."""
    if not 1 <= m <= 5:
        raise StructureError("symmetric group supported for 1 <= m <= 5")
    perms = sorted(itertools.permutations(range(m)))
    index = {p: i for i, p in enumerate(perms)}
    mul = {}
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            mul[(i, j)] = index[tuple(p[q[t]] for t in range(m))]
    return _finish_group(len(perms), mul, f"S{m}")


def quaternion_group() -> GroupTable:
    """The quaternion group Q8: elements +-1, +-i, +-j, +-k."""
    units = ["1", "i", "j", "k"]
    prod = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }
    elements = [(s, u) for u in units for s in (1, -1)]
    index = {el: i for i, el in enumerate(elements)}
    mul = {}
    for a, (sa, ua) in enumerate(elements):
        for b, (sb, ub) in enumerate(elements):
            sp, up = prod[(ua, ub)]
            mul[(a, b)] = index[(sa * sb * sp, up)]
    return _finish_group(8, mul, "Q8")


def group_from_table(table: Sequence[Sequence[int]], name: str | None = None) -> GroupTable:
    """Build a group from an n x n multiplication table (row op column)."""
    n = len(table)
    if any(len(row) != n for row in table):
        raise StructureError("multiplication table must be square")
    mul = {(a, b): table[a][b] for a in range(n) for b in range(n)}
    if any(not 0 <= v < n for v in mul.values()):
        raise StructureError("table entries must lie in 0..n-1")
    return _finish_group(n, mul, name or f"group(n={n})")


def group_from_structure(structure: FiniteStructure) -> GroupTable:
    """Reinterpret a structure with mul/inv/e as a validated group."""
    if isinstance(structure, GroupTable):
        return structure
    try:
        mul = dict(structure.functions["mul"])
        inv = dict(structure.functions["inv"])
        e = structure.constants["e"]
    except KeyError as exc:
        raise StructureError(f"not a group structure: missing {exc}") from None
    return GroupTable(structure.universe_size, mul, inv, e, name=structure.name)


# ---------------------------------------------------------------------------
# extension properties


def _adjacency(structure: FiniteStructure) -> list[set[int]]:
    binary = [name for name, arity in structure.signature.relations if arity == 2]
    if len(binary) != 1:
        raise StructureError("extension property needs exactly one binary relation symbol")
    edges = structure.relations[binary[0]]
    n = structure.universe_size
    for a, b in edges:
        if a == b:
            raise StructureError(f"relation is not irreflexive: loop at {a}")
        if (b, a) not in edges:
            raise StructureError(f"relation is not symmetric: ({a},{b}) without ({b},{a})")
    adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in edges:
        adj[a].add(b)
    return adj


def extension_property(structure: FiniteStructure, s: int, t: int) -> bool:
    """Whether every s-set has a common neighbor avoiding every disjoint t-set.

    True iff for all disjoint vertex sets A (|A| = s) and B (|B| = t) there
    is a vertex x outside both, adjacent to everything in A and nothing in
    B. Checked exhaustively.
    """
    if s < 0 or t < 0 or s + t < 1:
        raise StructureError("need s, t >= 0 and s + t >= 1")
    n = structure.universe_size
    if s + t > n:
        raise StructureError(f"s + t = {s + t} exceeds universe size {n}")
    adj = _adjacency(structure)
    vertices = range(n)
    for a_set in itertools.combinations(vertices, s):
        rest = [v for v in vertices if v not in a_set]
        for b_set in itertools.combinations(rest, t):
            forbidden = set(a_set) | set(b_set)
            if not any(
                x not in forbidden and all(a in adj[x] for a in a_set) and not any(b in adj[x] for b in b_set)
                for x in vertices
            ):
                return False
    return True


# ---------------------------------------------------------------------------
# sequences


@dataclass(frozen=True)
class StructureSequence:
    """An ordered list of (label, structure) pairs sharing one signature."""

    entries: tuple[tuple[int, FiniteStructure], ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise StructureError("sequence must be nonempty")
        labels = [lab for lab, _ in self.entries]
        if any(b <= a for a, b in zip(labels, labels[1:])):
            raise StructureError(f"labels must be strictly increasing, got {labels}")
        sig = self.entries[0][1].signature
        for lab, st in self.entries:
            if st.signature != sig:
                raise StructureError(f"structure at label {lab} has a different signature")

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(lab for lab, _ in self.entries)

    @property
    def structures(self) -> tuple[FiniteStructure, ...]:
        return tuple(st for _, st in self.entries)

    @property
    def signature(self) -> Signature:
        return self.entries[0][1].signature

    def __len__(self) -> int:
        return len(self.entries)


def paley_sequence(qs: Sequence[int]) -> StructureSequence:
    return StructureSequence(tuple((q, paley(q)) for q in qs))


# ---------------------------------------------------------------------------
# JSON structure files


def _nested_from_table(table: Mapping[tuple[int, ...], int], n: int, arity: int):
    if arity == 1:
        return [table[(i,)] for i in range(n)]
    return [_nested_from_table({k[1:]: v for k, v in table.items() if k[0] == i}, n, arity - 1) for i in range(n)]


def _table_from_nested(nested, n: int, arity: int, prefix: tuple[int, ...] = ()) -> dict[tuple[int, ...], int]:
    if not isinstance(nested, list) or len(nested) != n:
        raise StructureError(f"function table: expected a list of length {n} at {prefix}")
    out: dict[tuple[int, ...], int] = {}
    for i, sub in enumerate(nested):
        if arity == 1:
            if not isinstance(sub, int):
                raise StructureError(f"function table: expected an integer at {prefix + (i,)}")
            out[prefix + (i,)] = sub
        else:
            out.update(_table_from_nested(sub, n, arity - 1, prefix + (i,)))
    return out


def structure_to_json_dict(structure: FiniteStructure) -> dict:
    sig = structure.signature
    return {
        "signature": {
            "relations": dict(sig.relations),
            "functions": dict(sig.functions),
            "constants": list(sig.constants),
        },
        "universe": structure.universe_size,
        "relations": {
            rel: sorted(list(t) for t in structure.relations[rel]) for rel, _ in sig.relations
        },
        "functions": {
            func: _nested_from_table(structure.functions[func], structure.universe_size, arity)
            for func, arity in sig.functions
        },
        "constants": dict(structure.constants),
    }


def structure_from_json_dict(data: Mapping, name: str | None = None) -> FiniteStructure:
    try:
        sig_data = data["signature"]
        n = data["universe"]
        sig = Signature.make(
            relations=dict(sig_data.get("relations", {})),
            functions=dict(sig_data.get("functions", {})),
            constants=tuple(sig_data.get("constants", ())),
        )
        relations = {rel: [tuple(t) for t in tuples] for rel, tuples in data.get("relations", {}).items()}
        functions = {
            func: _table_from_nested(nested, n, sig.function_arities[func])
            for func, nested in data.get("functions", {}).items()
        }
        constants = dict(data.get("constants", {}))
    except (KeyError, TypeError, AttributeError) as exc:
        raise StructureError(f"malformed structure file: {exc}") from None
    return FiniteStructure(sig, n, relations=relations, functions=functions, constants=constants, name=name)


def load_structure(path: str | Path) -> FiniteStructure:
    path = Path(path)
    with open(path) as fh:
        data = json.load(fh)
    return structure_from_json_dict(data, name=path.stem)


def save_structure(structure: FiniteStructure, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(structure_to_json_dict(structure), fh, indent=2, sort_keys=True)
        fh.write("\n")
