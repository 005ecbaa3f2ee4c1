"""Seeded random sentences and structures for property suites."""
from __future__ import annotations

import itertools
import random
from typing import Optional

from .semantics import FiniteStructure, table_index
from .syntax import (
    EXISTS, FORALL, And, App, Atom, Equals, Formula, FunQuant, FunVarApp, Iff, Implies, Not, Or,
    Quant, RelQuant, RelVarAtom, Var, Vocabulary,
)

SUITE_VOCAB = Vocabulary((("P", 1), ("R", 2)), (("f", 1), ("c", 0)))


class FormulaGenerator:
    """Random sentences over ``vocab`` with bounded size and second-order depth.

    Second-order quantifiers bind unary relation or function variables;
    a binary relation variable is allowed only when nothing second-order
    is nested under it (``binary_so``).
    """

    def __init__(self, rng: random.Random, vocab: Vocabulary = SUITE_VOCAB, max_depth: int = 6,
                 max_so_depth: int = 2, binary_so: bool = True):
        self.rng = rng
        self.vocab = vocab
        self.max_depth = max_depth
        self.max_so_depth = max_so_depth
        self.binary_so = binary_so
        self.constants = [n for n, a in vocab.functions if a == 0]
        self.functions = [(n, a) for n, a in vocab.functions if a > 0]
        self._count = 0

    def _fresh(self, prefix: str) -> str:
        self._count += 1
        return f"{prefix}{self._count}"

    def term(self, fo: list[str], funvars: list[tuple[str, int]], depth: int):
        rng = self.rng
        leaves = [Var(v) for v in fo] + [App(c) for c in self.constants]
        if fo and rng.random() < 0.75:
            leaves = [Var(v) for v in fo]
        if not leaves:
            raise ValueError("no closed terms: add a constant to the vocabulary")
        heads = self.functions + funvars
        if depth > 0 and heads and rng.random() < 0.3:
            name, k = rng.choice(heads)
            args = tuple(self.term(fo, funvars, depth - 1) for _ in range(k))
            if (name, k) in funvars:
                return FunVarApp(name, k, args)
            return App(name, args)
        return rng.choice(leaves)

    def atom(self, fo, relvars, funvars) -> Formula:
        rng = self.rng
        choices = [("=", 2)] + list(self.vocab.relations) + relvars
        name, k = rng.choice(choices)
        args = tuple(self.term(fo, funvars, 1) for _ in range(k))
        if name == "=":
            return Equals(*args)
        if (name, k) in relvars:
            return RelVarAtom(name, k, args)
        return Atom(name, args)

    def formula(self, depth: int, so_left: int, fo=(), relvars=(), funvars=(),
                allow_binary=True) -> Formula:
        rng = self.rng
        fo, relvars, funvars = list(fo), list(relvars), list(funvars)
        if depth <= 0:
            return self.atom(fo, relvars, funvars)
        r = rng.random()
        if r < 0.15:
            return self.atom(fo, relvars, funvars)
        if r < 0.25:
            return Not(self.formula(depth - 1, so_left, fo, relvars, funvars, allow_binary))
        if r < 0.5:
            a = self.formula(depth - 1, so_left, fo, relvars, funvars, allow_binary)
            b = self.formula(depth - 1, so_left, fo, relvars, funvars, allow_binary)
            kind = rng.choice((And, Or, Implies, Iff))
            return kind((a, b)) if kind in (And, Or) else kind(a, b)
        q = rng.choice((FORALL, EXISTS))
        if so_left > 0 and r < 0.7:
            kinds = ["rel1", "fun1"] + (["rel2"] if allow_binary and self.binary_so else [])
            kind = rng.choice(kinds)
            if kind == "fun1":
                name = self._fresh("F1f_")
                body = self.formula(depth - 1, so_left - 1, fo, relvars, funvars + [(name, 1)],
                                    allow_binary)
                return FunQuant(q, name, 1, body)
            k = 1 if kind == "rel1" else 2
            name = f"X{k}_{self._count + 1}"
            self._count += 1
            # nothing second-order below a binary relation variable
            left = so_left - 1 if k == 1 else 0
            body = self.formula(depth - 1, left, fo, relvars + [(name, k)], funvars, allow_binary)
            return RelQuant(q, name, k, body)
        var = self._fresh("v")
        return Quant(q, var, self.formula(depth - 1, so_left, fo + [var], relvars, funvars,
                                          allow_binary))

    def sentence(self) -> Formula:
        self._count = 0
        return self.formula(self.max_depth, self.max_so_depth)


def random_structure(rng: random.Random, vocab: Vocabulary, n: int) -> FiniteStructure:
    rels = {}
    for name, k in vocab.relations:
        rels[name] = frozenset(t for t in itertools.product(range(n), repeat=k) if rng.random() < 0.5)
    funs = {name: tuple(rng.randrange(n) for _ in range(n ** k)) for name, k in vocab.functions}
    return FiniteStructure(n, vocab, rels, funs)


def random_res_structure(rng: random.Random, vocab: Vocabulary, n: int, U: str = "u0") -> FiniteStructure:
    """A random structure over ``vocab + {U}`` where ``U`` is nonempty and closed under every function."""
    M = random_structure(rng, vocab, n)
    inside = {rng.randrange(n)} | {a for a in range(n) if rng.random() < 0.3}
    while True:
        grown = set(inside)
        for name, k in vocab.functions:
            for args in itertools.product(sorted(inside), repeat=k):
                grown.add(M.functions[name][table_index(args, n)])
        if grown == inside:
            break
        inside = grown
    full = vocab.union(Vocabulary(((U, 1),), ()))
    rels = dict(M.relations)
    rels[U] = frozenset((a,) for a in inside)
    return FiniteStructure(n, full, rels, dict(M.functions))


def relativization_suite(seed: int, count: int = 1000, max_size: int = 3,
                         vocab: Vocabulary = SUITE_VOCAB, U: str = "u0",
                         generator: Optional[FormulaGenerator] = None):
    """``count`` triples ``(sentence, structure, U)`` drawn from one seeded stream."""
    rng = random.Random(seed)
    gen = generator or FormulaGenerator(rng, vocab)
    out = []
    for _ in range(count):
        f = gen.sentence()
        M = random_res_structure(rng, vocab, rng.randint(1, max_size), U)
        out.append((f, M, U))
    return out
