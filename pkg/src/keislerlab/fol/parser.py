"""Text syntax for formulas.

Grammar (ASCII)::

    formula  := quant | iff
    quant    := ("forall" | "exists") VAR "." formula
    iff      := imp { "<->" imp }
    imp      := or { "->" or }
    or       := and { "|" and }
    and      := unary { "&" unary }
    unary    := "!" unary | "(" formula ")" | atom
    atom     := REL "(" term { "," term } ")" | term "=" term
    term     := VAR | CONST | FUNC "(" term { "," term } ")"

Identifiers are ``[A-Za-z][A-Za-z0-9_]*``; names declared in the signature
are relation/function/constant symbols, anything else is a variable. Binary
connective chains associate to the left.

A formula string may carry an optional partition annotation in front::

    x ; y :: R(x,y)        object variables x, parameter variables y

Without an annotation (and without explicit arguments) all free variables
become object variables, in lexicographic order.
"""

from __future__ import annotations

import re
from typing import Sequence

from ..errors import ParseError
from .syntax import (
    And,
    Const,
    Eq,
    Exists,
    ForAll,
    Formula,
    Func,
    Iff,
    Implies,
    Not,
    Or,
    PartitionedFormula,
    Rel,
    Signature,
    Term,
    Var,
    free_vars,
    validate_formula,
)

__all__ = ["parse_formula", "parse_raw_formula", "formula_to_text", "partitioned_to_text"]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<id>[A-Za-z][A-Za-z0-9_]*)|(?P<op><->|->|[()|&!,=.])|(?P<bad>\S))"
)


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break
        if m.group("bad"):
            raise ParseError(f"unexpected character {m.group('bad')!r} at position {m.start('bad')}")
        tokens.append(m.group("id") or m.group("op"))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str], sig: Signature):
        self.tokens = tokens
        self.pos = 0
        self.sig = sig

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            what = f" (expected {expected!r})" if expected is not None else ""
            raise ParseError(f"unexpected end of input{what}")
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}")
        self.pos += 1
        return tok

    def formula(self) -> Formula:
        tok = self.peek()
        if tok in ("forall", "exists"):
            self.take()
            var = self.take()
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", var):
                raise ParseError(f"expected a variable after quantifier, found {var!r}")
            if self.sig.kind_of(var) is not None:
                raise ParseError(f"cannot quantify over declared symbol {var!r}")
            self.take(".")
            body = self.formula()
            return ForAll(var, body) if tok == "forall" else Exists(var, body)
        return self.iff()

    def _chain(self, sub, ops: dict[str, type]) -> Formula:
        out = sub()
        while self.peek() in ops:
            cls = ops[self.take()]
            out = cls(out, sub())
        return out

    def iff(self) -> Formula:
        return self._chain(self.imp, {"<->": Iff})

    def imp(self) -> Formula:
        return self._chain(self.or_, {"->": Implies})

    def or_(self) -> Formula:
        return self._chain(self.and_, {"|": Or})

    def and_(self) -> Formula:
        return self._chain(self.unary, {"&": And})

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok == "(":
            # Unambiguous: atoms and terms always start with an identifier.
            self.take()
            f = self.formula()
            self.take(")")
            return f
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input (expected an atom)")
        if tok in self.sig.relation_arities:
            name = self.take()
            self.take("(")
            args = [self.term()]
            while self.peek() == ",":
                self.take()
                args.append(self.term())
            self.take(")")
            arity = self.sig.relation_arities[name]
            if len(args) != arity:
                raise ParseError(f"relation {name!r} expects {arity} arguments, got {len(args)}")
            return Rel(name, tuple(args))
        left = self.term()
        self.take("=")
        right = self.term()
        return Eq(left, right)

    def term(self) -> Term:
        tok = self.take()
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", tok):
            raise ParseError(f"expected a term, found {tok!r}")
        kind = self.sig.kind_of(tok)
        if kind == "relation":
            raise ParseError(f"relation symbol {tok!r} used as a term")
        if kind == "constant":
            return Const(tok)
        if kind == "function":
            self.take("(")
            args = [self.term()]
            while self.peek() == ",":
                self.take()
                args.append(self.term())
            self.take(")")
            arity = self.sig.function_arities[tok]
            if len(args) != arity:
                raise ParseError(f"function {tok!r} expects {arity} arguments, got {len(args)}")
            return Func(tok, tuple(args))
        if tok in ("forall", "exists"):
            raise ParseError(f"keyword {tok!r} used as a term")
        return Var(tok)


def parse_raw_formula(text: str, sig: Signature) -> Formula:
    """Parse a bare formula (no partition annotation)."""
    parser = _Parser(_tokenize(text), sig)
    f = parser.formula()
    if parser.peek() is not None:
        raise ParseError(f"trailing input starting at {parser.peek()!r}")
    validate_formula(f, sig)
    return f


def _split_annotation(text: str) -> tuple[str | None, str]:
    if "::" not in text:
        return None, text
    head, body = text.split("::", 1)
    return head, body


def _var_list(text: str) -> tuple[str, ...]:
    names = [t for t in re.split(r"[,\s]+", text.strip()) if t]
    for n in names:
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", n):
            raise ParseError(f"invalid variable name {n!r} in partition annotation")
    return tuple(names)


def parse_formula(
    text: str,
    sig: Signature,
    obj_vars: Sequence[str] | None = None,
    param_vars: Sequence[str] | None = None,
) -> PartitionedFormula:
    """Parse a formula and attach its object/parameter partition.

    The partition comes from, in order of precedence: the explicit
    arguments, an ``obj ; param ::`` annotation in the text, or the default
    (all free variables are object variables, sorted).
    """
    annotation, body = _split_annotation(text)
    f = parse_raw_formula(body, sig)
    if obj_vars is None and param_vars is None and annotation is not None:
        if ";" not in annotation:
            raise ParseError("partition annotation must have the form 'obj ; param ::'")
        obj_text, param_text = annotation.split(";", 1)
        obj_vars = _var_list(obj_text)
        param_vars = _var_list(param_text)
    if obj_vars is None and param_vars is None:
        obj_vars = tuple(sorted(free_vars(f)))
        param_vars = ()
    return PartitionedFormula(f, tuple(obj_vars or ()), tuple(param_vars or ()))


# ---------------------------------------------------------------------------
# printing

_LEVEL = {Iff: 1, Implies: 2, Or: 3, And: 4}
_SYMBOL = {Iff: "<->", Implies: "->", Or: "|", And: "&"}


def _term_text(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    return f"{t.name}({', '.join(_term_text(a) for a in t.args)})"


def formula_to_text(f: Formula) -> str:
    """Render a formula; ``parse_raw_formula`` inverts this exactly.

    ``level`` is the binding strength of the context: -1 at the top and
    inside quantifier bodies (where a bare quantifier is grammatical),
    ``lvl - 1`` / ``lvl`` for left/right operands of a level-``lvl``
    connective (left-associative chains stay unparenthesized), 5 under
    negation.
    """

    def walk(g: Formula, level: int) -> str:
        if isinstance(g, Rel):
            return f"{g.name}({', '.join(_term_text(a) for a in g.args)})"
        if isinstance(g, Eq):
            return f"{_term_text(g.left)} = {_term_text(g.right)}"
        if isinstance(g, Not):
            return "!" + walk(g.body, 5)
        if isinstance(g, (ForAll, Exists)):
            kw = "forall" if isinstance(g, ForAll) else "exists"
            text = f"{kw} {g.var}. {walk(g.body, -1)}"
            return f"({text})" if level >= 0 else text
        lvl = _LEVEL[type(g)]
        left = walk(g.left, lvl - 1)
        right = walk(g.right, lvl)
        text = f"{left} {_SYMBOL[type(g)]} {right}"
        return f"({text})" if level >= lvl else text

    return walk(f, -1)


def partitioned_to_text(pf: PartitionedFormula) -> str:
    body = formula_to_text(pf.formula)
    if not pf.param_vars and not pf.obj_vars:
        return body
    return f"{', '.join(pf.obj_vars)} ; {', '.join(pf.param_vars)} :: {body}"
