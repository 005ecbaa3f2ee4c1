import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catkit.generators import SUITE_VOCAB, FormulaGenerator
from catkit.syntax import (
    And, App, ArityError, Atom, Equals, Implies, ParseError, Quant, RelQuant, SchemaTemplate,
    UnboundVariableError, UnknownSymbolError, Var, Vocabulary, free_symbols, is_sentence,
    parse_formula, parse_sentence, render_formula, rename_bound, so_depth, substitute,
)

N2_VOCAB = Vocabulary((), (("s", 1), ("0", 0)))


def test_first_conjunct_of_dedekind_axioms():
    f = parse_formula("!x !y (s(x) = s(y) -> x = y)", N2_VOCAB)
    sx, sy = App("s", (Var("x"),)), App("s", (Var("y"),))
    assert f == Quant("!", "x", Quant("!", "y", Implies(Equals(sx, sy), Equals(Var("x"), Var("y")))))


def test_precedence_and_associativity():
    v = Vocabulary((("p", 1), ("q", 1), ("r", 1)), (("c", 0),))
    a = parse_formula("p(c) & q(c) | r(c) -> p(c) -> q(c)", v)
    b = parse_formula("((p(c) & q(c)) | r(c)) -> (p(c) -> q(c))", v)
    assert a == b
    assert parse_formula("~p(c) & q(c)", v) == parse_formula("(~p(c)) & q(c)", v)
    assert parse_formula("p(c) <-> q(c) -> r(c)", v) == parse_formula("p(c) <-> (q(c) -> r(c))", v)


def test_nary_conjunction_flattens():
    v = Vocabulary((("p", 1),), (("c", 0),))
    f = parse_formula("p(c) & p(c) & p(c)", v)
    assert isinstance(f, And) and len(f.items) == 3


def test_constants_without_parentheses():
    assert parse_formula("0 = 0()", N2_VOCAB) == Equals(App("0"), App("0"))


def test_second_order_quantifiers_carry_arity():
    f, vocab = parse_sentence("!X2 ?F1f !x X2(x, F1f(x))")
    assert isinstance(f, RelQuant) and f.arity == 2
    assert so_depth(f) == 2
    assert len(vocab) == 0


def test_errors():
    with pytest.raises(ParseError) as e:
        parse_formula("!x (s(x) = ", N2_VOCAB)
    assert e.value.line == 1
    with pytest.raises(ArityError):
        parse_formula("s(0, 0) = 0", N2_VOCAB)
    with pytest.raises(UnknownSymbolError):
        parse_formula("t(0) = 0", N2_VOCAB)
    with pytest.raises(UnboundVariableError):
        parse_formula("s(x) = 0", N2_VOCAB, free=())
    with pytest.raises(ArityError):
        parse_sentence("!X1 X1(0, 0)")


def test_comments_and_whitespace():
    f = parse_formula("!x # every element\n  ~(s(x) = 0)", N2_VOCAB)
    assert render_formula(f) == "(!x (~(s(x) = 0)))"


def test_free_symbols_and_sentences():
    f = parse_formula("!x (P(x) -> R(x, y))", SUITE_VOCAB)
    syms, fo, so = free_symbols(f)
    assert syms == {"P", "R"} and fo == {"y"} and not so
    assert not is_sentence(f)


def test_rename_bound_only_touches_bound_variables():
    f = parse_formula("!x (P(x) & ?x R(x, y))", SUITE_VOCAB)
    g = rename_bound(f, avoid={"y"})
    assert free_symbols(g)[1] == {"y"}
    assert substitute(g, {"y": App("c")}) == rename_bound(substitute(f, {"y": App("c")}), avoid={"y"})


def test_schema_template_instantiates_hole():
    v = Vocabulary((("P", 1),), (("c", 0),))
    t = SchemaTemplate("demo", parse_formula("!y (Q1(y) -> Q1(y))", v), "Q1", ("y",))
    inst = t.instantiate(parse_formula("P(y)", v))
    assert inst == parse_formula("!y (P(y) -> P(y))", v)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32))
def test_render_parse_round_trip(seed):
    f = FormulaGenerator(random.Random(seed)).sentence()
    text = render_formula(f)
    assert parse_formula(text, SUITE_VOCAB) == f
    g, inferred = parse_sentence(text)
    assert g == f
    assert inferred.issubset(SUITE_VOCAB)
    assert render_formula(g) == text
