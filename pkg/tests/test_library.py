import pytest

from catkit.categoricity import count_models
from catkit.library import KEYS, UnknownEntry, entries, get
from catkit.syntax import (
    EXISTS, FunQuant, Quant, SchemaTemplate, Vocabulary, abstract_symbols, free_symbols, parse_formula,
    render_formula, rename_bound,
)
from catkit.transforms import TheoryInstanceSet, relativize


def test_keys():
    assert KEYS == ("N2", "I2", "P2", "R2", "ZFC2-templates", "PA-base", "PA-doubled-template")
    with pytest.raises(UnknownEntry):
        get("N3")


def test_n2_conjuncts():
    e = get("N2")
    assert e.vocab == Vocabulary((), (("s", 1), ("0", 0)))
    _, second, third = e.sentence.items
    assert render_formula(second) == "(!x (~(s(x) = 0)))"
    assert render_formula(third) == "(!X1 ((X1(0) & (!x (X1(x) -> X1(s(x))))) -> (!x X1(x))))"


def test_i2_quantifies_s_and_0():
    n2 = get("N2").sentence
    body = abstract_symbols(rename_bound(n2, avoid={"x"}), fun={"s": "F1f"}, const_to_var={"0": "x"})
    assert get("I2").sentence == FunQuant(EXISTS, "F1f", 1, Quant(EXISTS, "x", body))
    assert free_symbols(get("I2").sentence) == (frozenset(), frozenset(), frozenset())


def test_p2_structure():
    p2 = get("P2").sentence
    assert p2.items[0] == relativize(get("I2").sentence, "R")
    voc = get("P2").vocab
    ext = parse_formula("!x !y (!z (eps(z, x) <-> eps(z, y)) -> x = y)", voc)
    power = parse_formula("!X1 ?x !y (R(y) -> (X1(y) <-> eps(y, x)))", voc)
    assert ext in p2.items and power in p2.items


def test_r2_has_fifteen_field_axioms_and_lub():
    r2 = get("R2").sentence
    assert len(r2.items) == 16
    assert render_formula(r2.items[-1]).startswith("(!X1 ")


def test_template_entries():
    zfc = get("ZFC2-templates").content
    assert sum(isinstance(t, SchemaTemplate) for t in zfc) == 2
    pa = get("PA-doubled-template").content
    assert [t.name for t in pa if isinstance(t, SchemaTemplate)] == [
        "induction(add,mul)", "induction(add_p,mul_p)"]
    assert isinstance(get("PA-base").content, TheoryInstanceSet)
    with pytest.raises(TypeError):
        get("ZFC2-templates").sentence


@pytest.mark.parametrize("entry", entries(), ids=KEYS)
def test_entries_reparse_and_vocabulary_matches(entry):
    content = entry.content
    items = content.sentences if isinstance(content, TheoryInstanceSet) else (
        content if isinstance(content, tuple) else (content,))
    symbols = set()
    for item in items:
        if isinstance(item, SchemaTemplate):
            symbols |= free_symbols(item.template)[0] - {item.hole}
            continue
        assert parse_formula(render_formula(item), entry.vocab, free=()) == item
        symbols |= free_symbols(item)[0]
    assert symbols == set(entry.vocab.names)
    assert entry.to_text().startswith(f"entry {entry.key}\n")


@pytest.mark.parametrize("key,sizes", [("N2", (1, 2, 3)), ("I2", (1, 2, 3)), ("P2", (1, 2))])
def test_no_small_finite_models(key, sizes):
    e = get(key)
    for n in sizes:
        assert count_models(e.sentence, e.vocab, n) == 0
