import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catkit.generators import SUITE_VOCAB, FormulaGenerator, random_res_structure, random_structure
from catkit.semantics import (
    CapacityError, Evaluator, FiniteStructure, HenkinStructure, StructureError, all_functions,
    all_relations, bare_structure, check_closure, eval_full, eval_henkin, full_family,
    parse_structure, relativized_substructure, structure_to_text,
)
from catkit.syntax import Vocabulary, parse_formula, parse_sentence
from catkit.transforms import comprehension_instances, relativize

CYCLE = """domain 3
fun s 1
m 0 -> 1
m 1 -> 2
m 2 -> 0
fun 0 0
m -> 0
"""


def cycle():
    return parse_structure(CYCLE)


def test_structure_text_round_trip():
    M = cycle()
    assert structure_to_text(M) == CYCLE
    assert parse_structure(structure_to_text(M)) == M


def test_build_validates():
    with pytest.raises(StructureError):
        FiniteStructure.build(2, Vocabulary((("R", 2),)), {"R": [(0, 2)]})
    with pytest.raises(StructureError):
        FiniteStructure.build(2, Vocabulary((), (("f", 1),)), {}, {"f": {(0,): 1}})
    M = FiniteStructure.build(2, Vocabulary((), (("f", 1),)), {}, {"f": lambda a: 1 - a})
    assert M.apply("f", 0) == 1


def test_parse_structure_errors():
    with pytest.raises(StructureError):
        parse_structure("rel R 1\nt 0\n")
    with pytest.raises(StructureError):
        parse_structure("domain 2\nfun f 1\nm 0 -> 1\n")
    with pytest.raises(StructureError):
        parse_structure("domain 2\nrel P 1\nend\n")


def test_second_order_induction_on_a_cycle():
    f, _ = parse_sentence("!X1 ((X1(0) & !x (X1(x) -> X1(s(x)))) -> !x X1(x))")
    assert eval_full(cycle(), f)
    g, _ = parse_sentence("!x ~(s(x) = 0)")
    assert not eval_full(cycle(), g)


def test_function_quantifier_counts_permutations():
    # some function on three points is injective and moves everything
    f, _ = parse_sentence("?F1f (!x !y (F1f(x) = F1f(y) -> x = y) & !x ~(F1f(x) = x))")
    assert eval_full(bare_structure(3), f)
    assert not eval_full(bare_structure(1), f)


def test_range_sizes():
    assert len(all_relations(3, 2)) == 512
    assert len(all_functions(3, 1)) == 27
    assert len(all_functions(2, 0)) == 2


def test_capacity_guard():
    f, _ = parse_sentence("!X3 !x (X3(x, x, x) | ~X3(x, x, x))")
    with pytest.raises(CapacityError):
        eval_full(bare_structure(3), f, capacity=1000)


def test_relativized_substructure_requires_res():
    M = FiniteStructure.build(3, Vocabulary((("u0", 1),), (("f", 1),)), {"u0": [(0,)]},
                              {"f": (1, 1, 1)})
    with pytest.raises(StructureError, match="closed"):
        relativized_substructure(M, "u0")
    M = FiniteStructure.build(2, Vocabulary((("u0", 1),)), {"u0": []})
    with pytest.raises(StructureError, match="empty"):
        relativized_substructure(M, "u0")


def test_deficient_family_fails_universal_comprehension():
    base = bare_structure(2)
    H = HenkinStructure.build(base, {1: [frozenset()]})
    universal = comprehension_instances(Vocabulary(), [parse_formula("y1 = y1", Vocabulary())], 1)
    rep = check_closure(H, universal)
    assert not rep.ok
    (bad,) = rep.failures
    assert bad.missing == {(0,), (1,)}
    assert bad.missing not in H.relations[1]


def test_full_family_is_closed():
    M = random_structure(random.Random(3), SUITE_VOCAB, 2)
    H = HenkinStructure.full(M, (1,), ())
    pool = [parse_formula(t, SUITE_VOCAB) for t in ("P(y1)", "R(y1, x)", "f(y1) = c", "~P(f(y1))")]
    assert check_closure(H, comprehension_instances(SUITE_VOCAB, pool, 1)).ok


def test_henkin_quantifiers_range_over_family():
    H = HenkinStructure.build(bare_structure(2), {1: [frozenset()]})
    f, _ = parse_sentence("!X1 !x ~X1(x)")
    assert eval_henkin(H, f)
    assert not eval_full(H.base, f)


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32))
def test_relativization_law(seed):
    rng = random.Random(seed)
    f = FormulaGenerator(rng).sentence()
    M = random_res_structure(rng, SUITE_VOCAB, rng.randint(1, 3))
    assert eval_full(M, relativize(f, "u0")) == eval_full(relativized_substructure(M, "u0"), f)


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32))
def test_henkin_with_full_family_is_full_semantics(seed):
    rng = random.Random(seed)
    f = FormulaGenerator(rng).sentence()
    M = random_structure(rng, SUITE_VOCAB, rng.randint(1, 3))
    fam = full_family(M.size, (1, 2), (1,))
    H = HenkinStructure(M, dict(fam.relations), dict(fam.functions))
    assert eval_henkin(H, f) == eval_full(M, f)


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32))
def test_optimizations_preserve_truth(seed):
    rng = random.Random(seed)
    f = FormulaGenerator(rng).sentence()
    M = random_structure(rng, SUITE_VOCAB, rng.randint(1, 3))
    assert Evaluator(f, M.size)(M) == Evaluator(f, M.size, optimize=False)(M)
