import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catkit.categoricity import (
    NON_CATEGORICAL, VACUOUS, canonical_key, cat_plus_valid, cat_truth,
    categorical_up_to, count_isomorphisms, enumerate_structures, find_isomorphism, lemma_eq_check,
    permute, structure_count, unique_isomorphism, verify_isomorphism,
)
from catkit.corpus import LEMMA_CORPUS
from catkit.generators import random_structure
from catkit.semantics import eval_full, embed, merge_structures, parse_structure, rename_structure
from catkit.syntax import EXISTS, FunQuant, Vocabulary, parse_sentence
from catkit.transforms import iso_sentence, priming

DIGRAPH = Vocabulary((("R", 2),))
UNARY_FUN = Vocabulary((), (("f", 1),))


@pytest.mark.parametrize("vocab,n,total,classes", [
    (DIGRAPH, 2, 16, 10),
    (DIGRAPH, 3, 512, 104),
    (UNARY_FUN, 2, 4, 3),
    (UNARY_FUN, 3, 27, 7),
])
def test_enumeration_counts(vocab, n, total, classes):
    assert structure_count(vocab, n) == total
    assert len(list(enumerate_structures(vocab, n))) == total
    assert len(list(enumerate_structures(vocab, n, up_to_iso=True))) == classes


def test_canonical_key_is_invariant():
    rng = random.Random(5)
    M = random_structure(rng, Vocabulary((("P", 1), ("R", 2)), (("f", 1), ("c", 0))), 3)
    for perm in [(1, 2, 0), (2, 1, 0), (0, 2, 1)]:
        assert canonical_key(permute(M, perm)) == canonical_key(M)


def test_isomorphisms_of_directed_cycle():
    A = parse_structure("domain 3\nrel R 2\nt 0 1\nt 1 2\nt 2 0\n")
    B = parse_structure("domain 3\nrel R 2\nt 1 0\nt 0 2\nt 2 1\n")
    cert = find_isomorphism(A, B)
    assert cert is not None and cert.checked
    assert verify_isomorphism(A, B, cert.mapping)
    assert verify_isomorphism(B, A, cert.inverse().mapping)
    assert count_isomorphisms(A, A) == 3
    C = parse_structure("domain 3\nrel R 2\nt 0 1\nt 1 0\nt 2 0\n")
    assert find_isomorphism(A, C) is None


def test_vacuous_verdict_and_report():
    f, vocab = parse_sentence("!x !y (f(x) = f(y) -> x = y) & !x ~(f(x) = c) & "
                              "!X1 ((X1(c) & !x (X1(x) -> X1(f(x)))) -> !x X1(x))")
    rep = categorical_up_to(f, 3, vocab)
    assert rep.verdict == VACUOUS and rep.categorical
    assert rep.to_text().startswith("verdict vacuously-categorical\nkappa 3\nreason no models\n")


def test_non_categorical_witness():
    f, _ = parse_sentence("?x P(x)")
    rep = categorical_up_to(f, 2)
    assert rep.verdict == NON_CATEGORICAL
    assert rep.reason == "same-size-non-isomorphic"
    A, B = rep.witness
    assert find_isomorphism(A, B) is None
    assert "witness 1\ndomain 2\n" in rep.to_text()


def test_multiple_sizes_reason():
    f, _ = parse_sentence("!x x = x")
    rep = categorical_up_to(f, 2)
    assert rep.reason == "multiple-sizes"


def test_parallel_census_matches_serial():
    f, _ = parse_sentence("!x ~R(x, x)")
    assert categorical_up_to(f, 3, jobs=2).to_text() == categorical_up_to(f, 3).to_text()


@pytest.mark.parametrize("text,c1,c2,c3", LEMMA_CORPUS[::4])
def test_lemma_checks_agree_on_corpus_sample(text, c1, c2, c3):
    f, _ = parse_sentence(text)
    for kappa, expected in ((1, c1), (2, c2)):
        rep = lemma_eq_check(f, kappa)
        assert rep.agree and rep.c1 == expected


def test_literal_mode_breaks_the_equivalence_once_symbols_live_off_u():
    f, _ = parse_sentence("!x !y x = y")
    assert cat_truth(f, 2, "literal") and categorical_up_to(f, 2).categorical
    # the unguarded commutation clause also constrains f outside U
    g, _ = parse_sentence("!x f(x) = c & !x !y x = y")
    assert categorical_up_to(g, 2).categorical
    assert cat_truth(g, 2, "guarded")
    assert not cat_truth(g, 2, "literal")


def test_factored_and_direct_cat_plus_agree():
    for text in ("!x !y x = y", "?x P(x)", "!x x = c"):
        f, _ = parse_sentence(text)
        assert cat_plus_valid(f, 2, factored=True).valid == cat_plus_valid(f, 2, factored=False).valid


def test_unique_isomorphism():
    one, _ = parse_sentence("!x !y x = y")
    assert unique_isomorphism(one, 2).unique
    two, _ = parse_sentence("?x ?y ~(x = y) & !x !y !z (x = y | x = z | y = z)")
    rep = unique_isomorphism(two, 2)
    assert not rep.unique
    assert rep.to_text() == "kappa 2\nunique false\npair 2 0 0 isomorphisms 2\n"
    with pytest.raises(ValueError):
        unique_isomorphism(parse_sentence("!x x = x")[0], 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32))
def test_iso_sentence_matches_search(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    A = random_structure(rng, DIGRAPH, n)
    if rng.random() < 0.5:
        B = permute(A, tuple(rng.sample(range(n), n)))
    else:
        B = random_structure(rng, DIGRAPH, n)
    ren = priming(DIGRAPH)
    f = FunQuant(EXISTS, "F1f", 1, iso_sentence(DIGRAPH, ren))
    M = merge_structures(embed(A, n, "u0"), embed(rename_structure(B, ren.mapping), n, "u1"))
    assert eval_full(M, f) == (find_isomorphism(A, B) is not None)
