"""Parser, printer, evaluator, and transformation tests."""

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import all_digraphs, random_digraph
from keislerlab.errors import EvaluationError, ParseError, SignatureError
from keislerlab.fol import (
    And,
    Eq,
    Exists,
    ForAll,
    Iff,
    Implies,
    Not,
    Or,
    Rel,
    Signature,
    Var,
    encode_selector,
    evaluate,
    formula_to_text,
    free_vars,
    parse_formula,
    parse_raw_formula,
    substitute,
    swap_partition,
)
from keislerlab.structures import paley

SIG = Signature.make(relations={"R": 2, "P": 1}, functions={"f": 1, "g": 2}, constants=("c",))
GRAPH_SIG = Signature.make(relations={"R": 2})


class TestParser:
    def test_single_atom(self):
        pf = parse_formula("R(x,y)", GRAPH_SIG)
        assert pf.formula == Rel("R", (Var("x"), Var("y")))
        assert pf.free == {"x", "y"}

    def test_sentence_has_no_free_vars(self):
        pf = parse_formula("forall x. exists y. R(x,y)", GRAPH_SIG)
        assert pf.is_sentence()
        assert pf.formula == ForAll("x", Exists("y", Rel("R", (Var("x"), Var("y")))))

    def test_arity_mismatch(self):
        with pytest.raises(ParseError):
            parse_formula("R(x)", GRAPH_SIG)

    def test_function_terms_and_constants(self):
        pf = parse_formula("R(f(c), g(x, f(y)))", SIG)
        assert pf.free == {"x", "y"}

    def test_undeclared_symbol_in_relation_position(self):
        with pytest.raises(ParseError):
            parse_formula("Q(x)", GRAPH_SIG)

    def test_relation_used_as_term(self):
        with pytest.raises(ParseError):
            parse_formula("R(R(x,y), x)", GRAPH_SIG)

    def test_lexical_error(self):
        with pytest.raises(ParseError):
            parse_formula("R(x, y) #", GRAPH_SIG)

    def test_trailing_input(self):
        with pytest.raises(ParseError):
            parse_formula("R(x,y) R(y,x)", GRAPH_SIG)

    def test_left_associative_chains(self):
        pf = parse_formula("R(x,x) -> R(x,x) -> R(x,x)", GRAPH_SIG)
        assert isinstance(pf.formula, Implies)
        assert isinstance(pf.formula.left, Implies)

    def test_precedence(self):
        pf = parse_formula("R(x,x) | R(x,x) & R(x,x)", GRAPH_SIG)
        assert isinstance(pf.formula, Or)
        assert isinstance(pf.formula.right, And)

    def test_annotation_sets_partition(self):
        pf = parse_formula("x ; y :: R(x,y)", GRAPH_SIG)
        assert pf.obj_vars == ("x",) and pf.param_vars == ("y",)

    def test_explicit_arguments_beat_default(self):
        pf = parse_formula("R(x,y)", GRAPH_SIG, obj_vars=("y",), param_vars=("x",))
        assert pf.obj_vars == ("y",)

    def test_default_partition_all_object_sorted(self):
        pf = parse_formula("R(y,x)", GRAPH_SIG)
        assert pf.obj_vars == ("x", "y") and pf.param_vars == ()

    def test_undeclared_free_variable_in_partition(self):
        with pytest.raises(ParseError):
            parse_formula("R(x,y)", GRAPH_SIG, obj_vars=("x",), param_vars=())

    def test_quantifier_needs_parens_in_operand(self):
        with pytest.raises(ParseError):
            parse_formula("R(x,x) & forall y. R(x,y)", GRAPH_SIG)
        parse_formula("R(x,x) & (forall y. R(x,y))", GRAPH_SIG)


def formula_strategy():
    terms = st.sampled_from([Var("x"), Var("y"), Var("z")])
    atoms = st.one_of(
        st.tuples(terms, terms).map(lambda p: Rel("R", p)),
        st.tuples(terms, terms).map(lambda p: Eq(*p)),
    )

    def extend(children):
        unary = children.map(Not)
        binop = st.tuples(st.sampled_from([And, Or, Implies, Iff]), children, children).map(
            lambda t: t[0](t[1], t[2])
        )
        quant = st.tuples(st.sampled_from([ForAll, Exists]), st.sampled_from(["x", "y", "z", "w"]), children).map(
            lambda t: t[0](t[1], t[2])
        )
        return st.one_of(unary, binop, quant)

    return st.recursive(atoms, extend, max_leaves=25)


class TestPrinterRoundTrip:
    @settings(max_examples=300, deadline=None)
    @given(formula_strategy())
    def test_round_trip(self, formula):
        assert parse_raw_formula(formula_to_text(formula), GRAPH_SIG) == formula

    def test_examples(self):
        for text in [
            "!(R(x,y) & R(y,x)) | (forall u. u = x)",
            "R(x,y) <-> R(y,x) <-> R(x,x)",
            "forall x. (exists y. R(x,y)) -> R(x,x)",
        ]:
            f = parse_raw_formula(text, GRAPH_SIG)
            assert parse_raw_formula(formula_to_text(f), GRAPH_SIG) == f

    def test_partitioned_round_trip(self):
        from keislerlab.fol import partitioned_to_text

        pf = parse_formula("x ; y, z :: R(x,y) & !R(x,z)", GRAPH_SIG)
        assert parse_formula(partitioned_to_text(pf), GRAPH_SIG) == pf


class TestEvaluate:
    def test_paley5_edge(self):
        # 2 - 1 = 1 = 1^2 mod 5
        g = paley(5)
        assert evaluate(g, parse_raw_formula("R(x,y)", g.signature), {"x": 1, "y": 2})

    def test_reflexivity_of_equality(self):
        g = paley(5)
        for v in range(5):
            assert evaluate(g, parse_raw_formula("x = x", g.signature), {"x": v})

    def test_no_isolated_vertex(self):
        g = paley(5)
        assert evaluate(g, parse_raw_formula("forall x. exists y. R(x,y)", g.signature))

    def test_missing_assignment_is_error(self):
        g = paley(5)
        with pytest.raises(EvaluationError):
            evaluate(g, parse_raw_formula("R(x,y)", g.signature), {"x": 0})

    def test_out_of_range_assignment(self):
        g = paley(5)
        with pytest.raises(EvaluationError):
            evaluate(g, parse_raw_formula("x = x", g.signature), {"x": 9})

    def test_signature_mismatch(self):
        g = paley(5)
        other = parse_raw_formula("P(x)", SIG)
        with pytest.raises(EvaluationError):
            evaluate(g, other, {"x": 0})

    def test_connective_semantics_pointwise(self):
        rng = random.Random(11)
        for _ in range(30):
            m = random_digraph(rng, max_size=5)
            a = rng.randrange(m.universe_size)
            b = rng.randrange(m.universe_size)
            env = {"x": a, "y": b}
            p = evaluate(m, parse_raw_formula("R(x,y)", m.signature), env)
            q = evaluate(m, parse_raw_formula("R(y,x)", m.signature), env)
            assert evaluate(m, parse_raw_formula("!R(x,y)", m.signature), env) == (not p)
            assert evaluate(m, parse_raw_formula("R(x,y) & R(y,x)", m.signature), env) == (p and q)
            assert evaluate(m, parse_raw_formula("R(x,y) | R(y,x)", m.signature), env) == (p or q)
            assert evaluate(m, parse_raw_formula("R(x,y) -> R(y,x)", m.signature), env) == ((not p) or q)
            assert evaluate(m, parse_raw_formula("R(x,y) <-> R(y,x)", m.signature), env) == (p == q)
            # De Morgan
            assert evaluate(m, parse_raw_formula("!(R(x,y) & R(y,x))", m.signature), env) == evaluate(
                m, parse_raw_formula("!R(x,y) | !R(y,x)", m.signature), env
            )

    def test_quantifier_semantics_exhaustive(self):
        # evaluate(exists x. phi) must equal the OR of the body over the universe
        rng = random.Random(23)
        body = parse_raw_formula("R(x,y) & !R(y,x)", GRAPH_SIG)
        ex = parse_raw_formula("exists x. R(x,y) & !R(y,x)", GRAPH_SIG)
        fa = parse_raw_formula("forall x. R(x,y) & !R(y,x)", GRAPH_SIG)
        for _ in range(20):
            m = random_digraph(rng, max_size=6)
            for y in range(m.universe_size):
                values = [evaluate(m, body, {"x": x, "y": y}) for x in range(m.universe_size)]
                assert evaluate(m, ex, {"y": y}) == any(values)
                assert evaluate(m, fa, {"y": y}) == all(values)

    def test_shadowing(self):
        # inner quantifier shadows the outer binding of the same name
        g = paley(5)
        f = parse_raw_formula("exists x. (forall x. x = x) & R(x,y)", g.signature)
        for y in range(5):
            assert evaluate(g, f, {"y": y})


class TestSwapPartition:
    def test_definition(self):
        pf = parse_formula("x ; y :: R(x,y)", GRAPH_SIG)
        sw = swap_partition(pf)
        assert sw.formula == pf.formula
        assert sw.obj_vars == ("y",) and sw.param_vars == ("x",)

    def test_involution(self):
        pf = parse_formula("x ; y :: R(x,y) -> R(y,x)", GRAPH_SIG)
        assert swap_partition(swap_partition(pf)) == pf

    def test_evaluation_unchanged_exhaustively(self):
        g = paley(5)
        pf = parse_formula("x ; y :: R(x,y) & !(x = y)", g.signature)
        sw = swap_partition(pf)
        for x, y in itertools.product(range(5), repeat=2):
            env = {"x": x, "y": y}
            assert evaluate(g, pf.formula, env) == evaluate(g, sw.formula, env)


class TestSubstitute:
    def test_function_term_substitution(self):
        pf = parse_formula("R(x, y)", GRAPH_SIG)
        from keislerlab.fol import Func

        out = substitute(pf.formula, {"x": Func("f", (Var("y"),))})
        assert free_vars(out) == {"y"}

    def test_capture_is_an_error(self):
        f = parse_raw_formula("forall y. R(x,y)", GRAPH_SIG)
        with pytest.raises(ParseError):
            substitute(f, {"x": Var("y")})


class TestEncodeSelector:
    def _thetas(self, n):
        texts = ["R(x,p)", "!R(x,q)", "R(x,r) & R(r,x)"][:n]
        params = [("p",), ("q",), ("r",)][:n]
        return [
            parse_formula(t, GRAPH_SIG, obj_vars=("x",), param_vars=pv) for t, pv in zip(texts, params)
        ]

    def test_single_formula_shape(self):
        gamma = encode_selector(self._thetas(1))
        # one clause: (sel = s1) -> theta_1
        assert isinstance(gamma.formula, Implies)
        assert isinstance(gamma.formula.left, Eq)

    def test_rejects_empty(self):
        with pytest.raises(ParseError):
            encode_selector([])

    def test_rejects_mismatched_object_vars(self):
        thetas = self._thetas(1) + [parse_formula("R(y,p2)", GRAPH_SIG, obj_vars=("y",), param_vars=("p2",))]
        with pytest.raises(ParseError):
            encode_selector(thetas)

    def test_param_collision_renamed(self):
        a = parse_formula("R(x,p)", GRAPH_SIG, obj_vars=("x",), param_vars=("p",))
        b = parse_formula("!R(x,p)", GRAPH_SIG, obj_vars=("x",), param_vars=("p",))
        gamma = encode_selector([a, b])
        assert len(set(gamma.param_vars)) == len(gamma.param_vars)

    @pytest.mark.parametrize("n_thetas", [1, 2, 3])
    def test_selection_contract_brute_force(self, n_thetas):
        """Exhaustive over assignments: every 2-element digraph plus small samples."""
        rng = random.Random(5)
        structures = list(all_digraphs(2)) + [random_digraph(rng, 3, 3) for _ in range(4)]
        if n_thetas <= 2:
            structures += [random_digraph(rng, 4, 4) for _ in range(3)]
        thetas = self._thetas(n_thetas)
        gamma = encode_selector(thetas)
        n_params = sum(len(t.param_vars) for t in thetas)
        theta_params = gamma.param_vars[:n_params]
        sel = gamma.param_vars[n_params]
        slots = gamma.param_vars[n_params + 1 :]
        # the test thetas use distinct parameter names, so no renaming happened
        assert theta_params == sum((t.param_vars for t in thetas), ())
        for m in structures:
            universe = range(m.universe_size)
            for x in universe:
                for theta_vals in itertools.product(universe, repeat=n_params):
                    env_base = {"x": x, **dict(zip(theta_params, theta_vals))}
                    for zvals in itertools.product(universe, repeat=1 + len(slots)):
                        env = {**env_base, sel: zvals[0], **dict(zip(slots, zvals[1:]))}
                        got = evaluate(m, gamma.formula, env)
                        selected = [i for i in range(n_thetas) if zvals[1 + i] == zvals[0]]
                        if len(selected) == 1:
                            i = selected[0]
                            offset = sum(len(t.param_vars) for t in thetas[:i])
                            sub_env = {"x": x}
                            sub_env.update(
                                zip(thetas[i].param_vars,
                                    theta_vals[offset : offset + len(thetas[i].param_vars)])
                            )
                            assert got == evaluate(m, thetas[i].formula, sub_env)
                        else:
                            assert got is True


class TestSignature:
    def test_duplicate_names_rejected(self):
        with pytest.raises(SignatureError):
            Signature.make(relations={"R": 2}, constants=("R",))

    def test_zero_arity_rejected(self):
        with pytest.raises(SignatureError):
            Signature.make(relations={"R": 0})
