"""Catalogue of the named sentences and theories, each built from the transforms."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .syntax import (
    EXISTS, And, Formula, FunQuant, Quant, SchemaTemplate, Vocabulary, abstract_symbols,
    parse_formula, render_formula, rename_bound,
)
from .transforms import (
    PLUS, PLUS_P, TIMES, TIMES_P, TheoryInstanceSet, induction_template, peano_base, relativize,
    zfc_base,
)

N2_VOCAB = Vocabulary((), (("s", 1), ("0", 0)))
P2_VOCAB = Vocabulary((("R", 1), ("eps", 2)), ())
R2_VOCAB = Vocabulary((("lt", 2),), (("add", 2), ("mul", 2), ("0", 0), ("1", 0)))


class UnknownEntry(KeyError):
    pass


@dataclass(frozen=True)
class CatalogueEntry:
    key: str
    content: Union[Formula, TheoryInstanceSet, tuple]
    vocab: Vocabulary
    note: str

    @property
    def sentence(self) -> Formula:
        if isinstance(self.content, TheoryInstanceSet):
            return And(self.content.sentences)
        if isinstance(self.content, tuple):
            raise TypeError(f"{self.key} is a set of templates, not a sentence")
        return self.content

    def to_text(self) -> str:
        lines = [f"entry {self.key}", f"note {self.note}"]
        lines += [f"vocab {line}" for line in self.vocab.to_text().splitlines()]
        if isinstance(self.content, TheoryInstanceSet):
            lines.append(self.content.to_text().rstrip("\n"))
        elif isinstance(self.content, tuple):
            for t in self.content:
                if isinstance(t, SchemaTemplate):
                    lines.append(f"template {t.name} hole {t.hole}({', '.join(t.hole_vars)}) "
                                 f"{render_formula(t.template)}")
                else:
                    lines.append(f"axiom {render_formula(t)}")
        else:
            lines.append(f"sentence {render_formula(self.content)}")
        return "\n".join(lines) + "\n"


def n2() -> Formula:
    """Injective successor, 0 not a successor, second-order induction."""
    return parse_formula(
        "!x !y (s(x) = s(y) -> x = y) & !x ~(s(x) = 0) & "
        "!X1 ((X1(0) & !x (X1(x) -> X1(s(x)))) -> !x X1(x))", N2_VOCAB, free=())


def i2() -> Formula:
    """``?F ?x N2(F, x)``: successor and zero quantified away."""
    body = rename_bound(n2(), avoid={"x"})
    body = abstract_symbols(body, fun={"s": "F1f"}, const_to_var={"0": "x"})
    return FunQuant(EXISTS, "F1f", 1, Quant(EXISTS, "x", body))


def p2() -> Formula:
    """``I2`` relativized to ``R``, membership into ``R``, extensionality, power set."""
    rest = parse_formula(
        "!x !y (eps(x, y) -> R(x)) & "
        "!x !y (!z (eps(z, x) <-> eps(z, y)) -> x = y) & "
        "!X1 ?x !y (R(y) -> (X1(y) <-> eps(y, x)))", P2_VOCAB, free=())
    return And((relativize(i2(), "R"),) + rest.items)


ORDERED_FIELD_AXIOMS = (
    "!x !y !z add(add(x, y), z) = add(x, add(y, z))",
    "!x !y add(x, y) = add(y, x)",
    "!x add(x, 0) = x",
    "!x ?y add(x, y) = 0",
    "!x !y !z mul(mul(x, y), z) = mul(x, mul(y, z))",
    "!x !y mul(x, y) = mul(y, x)",
    "!x mul(x, 1) = x",
    "!x (~(x = 0) -> ?y mul(x, y) = 1)",
    "!x !y !z mul(x, add(y, z)) = add(mul(x, y), mul(x, z))",
    "~(0 = 1)",
    "!x ~lt(x, x)",
    "!x !y !z ((lt(x, y) & lt(y, z)) -> lt(x, z))",
    "!x !y (lt(x, y) | x = y | lt(y, x))",
    "!x !y !z (lt(x, y) -> lt(add(x, z), add(y, z)))",
    "!x !y ((lt(0, x) & lt(0, y)) -> lt(0, mul(x, y)))",
)

LEAST_UPPER_BOUND = (
    "!X1 ((?x X1(x) & ?y !x (X1(x) -> lt(x, y))) -> "
    "?y (!x (X1(x) -> (lt(x, y) | x = y)) & "
    "!y1 (!x (X1(x) -> (lt(x, y1) | x = y1)) -> (lt(y, y1) | y = y1))))"
)


def r2() -> Formula:
    """The fifteen ordered-field axioms and the least-upper-bound principle."""
    parts = [parse_formula(t, R2_VOCAB, free=()) for t in ORDERED_FIELD_AXIOMS]
    parts.append(parse_formula(LEAST_UPPER_BOUND, R2_VOCAB, free=()))
    return And(tuple(parts))


ZFC_VOCAB = Vocabulary((("e1", 2),), ())

SEPARATION_2 = "!X1 !x ?y !a (e1(a, y) <-> (e1(a, x) & X1(a)))"
REPLACEMENT_2 = "!F1f !x ?y !a (e1(a, x) -> e1(F1f(a), y))"


def zfc2_templates() -> tuple:
    """First-order base axioms plus second-order Separation and Replacement, and the schema templates."""
    sep_t = SchemaTemplate("separation", parse_formula(
        "!x ?y !a (e1(a, y) <-> (e1(a, x) & P1(a)))", ZFC_VOCAB), "P1", ("a",))
    rep_t = SchemaTemplate("replacement", parse_formula(
        "!x ((!a (e1(a, x) -> ?b (P2(a, b) & !b2 (P2(a, b2) -> b2 = b)))) -> "
        "?y !a (e1(a, x) -> ?b (e1(b, y) & P2(a, b))))", ZFC_VOCAB), "P2", ("a", "b"))
    axioms = zfc_base("e1").sentences + (parse_formula(SEPARATION_2, ZFC_VOCAB, free=()),
                                          parse_formula(REPLACEMENT_2, ZFC_VOCAB, free=()))
    return axioms + (sep_t, rep_t)


def pa_doubled_template() -> tuple:
    """Both base-axiom sets and the induction template for each copy."""
    return (peano_base(PLUS, TIMES).sentences + peano_base(PLUS_P, TIMES_P).sentences
            + (induction_template(PLUS, TIMES), induction_template(PLUS_P, TIMES_P)))


def _entries():
    both = Vocabulary((), ((PLUS, 2), (TIMES, 2), (PLUS_P, 2), (TIMES_P, 2)))
    return {
        "N2": lambda: CatalogueEntry("N2", n2(), N2_VOCAB, "Dedekind arithmetic of successor and zero"),
        "I2": lambda: CatalogueEntry("I2", i2(), Vocabulary(), "countably infinite domain, empty vocabulary"),
        "P2": lambda: CatalogueEntry("P2", p2(), P2_VOCAB, "power set of the naturals with membership"),
        "R2": lambda: CatalogueEntry("R2", r2(), R2_VOCAB, "complete ordered field"),
        "ZFC2-templates": lambda: CatalogueEntry(
            "ZFC2-templates", zfc2_templates(), ZFC_VOCAB,
            "second-order set theory; Separation and Replacement as single axioms"),
        "PA-base": lambda: CatalogueEntry("PA-base", peano_base(), Vocabulary((), ((PLUS, 2), (TIMES, 2))),
                                          "Peano base axioms with defined 0 and 1"),
        "PA-doubled-template": lambda: CatalogueEntry(
            "PA-doubled-template", pa_doubled_template(), both,
            "two Peano copies, each induction schema open to the other vocabulary"),
    }


KEYS = tuple(_entries())


def get(key: str) -> CatalogueEntry:
    try:
        return _entries()[key]()
    except KeyError:
        raise UnknownEntry(f"unknown catalogue key {key!r}; known: {', '.join(KEYS)}") from None


def entries() -> list[CatalogueEntry]:
    return [get(k) for k in KEYS]
