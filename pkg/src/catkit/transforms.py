"""Syntactic constructions: Res, relativization, priming, ISO, CAT, schema instances."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .syntax import (
    EXISTS, FORALL, And, App, Atom, Bottom, Equals, Formula, FunQuant, FunVarApp, Iff, Implies,
    Not, Quant, RelQuant, RelVarAtom, SchemaTemplate, SyntaxError_, Term, Top, Var, Vocabulary,
    abstract_symbols, all_names, children, conj, fresh_name, free_symbols, fun_var_name,
    is_fo_var, is_sentence, map_symbols, parse_formula, parse_sentence, rebuild, rel_var_name,
    render_formula, so_fun_arity, substitute, vocabulary_of,
)

DEFAULT_U = "u0"
DEFAULT_U_PRIME = "u1"
DEFAULT_ISO = "F1f"
PRIME_SUFFIX = "_p"


class TransformError(SyntaxError_):
    pass


def _uatom(U: str, t: Term) -> Atom:
    return Atom(U, (t,))


def _vars(n: int, base: str = "x") -> list[str]:
    return [base] if n == 1 else [f"{base}{i}" for i in range(1, n + 1)]


# ---------------------------------------------------------------------------
# Res and relativization


def res_sentence(vocab: Vocabulary, U: str = DEFAULT_U) -> Formula:
    """``U`` is non-empty and closed under every function symbol of ``vocab``."""
    if U in vocab:
        raise TransformError(f"predicate {U!r} clashes with the vocabulary")
    items: list[Formula] = [Quant(EXISTS, "x", _uatom(U, Var("x")))]
    for name, n in vocab.functions:
        xs = _vars(n)
        target = _uatom(U, App(name, tuple(Var(x) for x in xs)))
        if n == 0:
            items.append(target)
        else:
            guard = conj(_uatom(U, Var(x)) for x in xs)
            items.append(_forall(xs, Implies(guard, target)))
    return conj(items)


def _forall(names: Iterable[str], body: Formula) -> Formula:
    for name in reversed(list(names)):
        body = Quant(FORALL, name, body)
    return body


def relation_guard(X: str, k: int, U: str) -> Formula:
    """``X`` is a relation on ``U``."""
    ys = _vars(k, "y")
    return _forall(ys, Implies(RelVarAtom(X, k, tuple(Var(y) for y in ys)),
                               conj(_uatom(U, Var(y)) for y in ys)))


def function_guard(F: str, k: int, U: str) -> Formula:
    """``F`` maps ``U^k`` into ``U``; values off ``U`` are unconstrained."""
    ys = _vars(k, "y") if k else []
    image = _uatom(U, FunVarApp(F, k, tuple(Var(y) for y in ys)))
    if not k:
        return image
    return _forall(ys, Implies(conj(_uatom(U, Var(y)) for y in ys), image))


def relativize(f: Formula, U: str = DEFAULT_U) -> Formula:
    """Restrict every quantifier of ``f`` to ``U`` (second-order ones to relations/functions on ``U``)."""
    if U in free_symbols(f)[0]:
        raise TransformError(f"predicate {U!r} already occurs in the formula")

    def walk(g: Formula) -> Formula:
        if isinstance(g, Quant):
            body = walk(g.body)
            guard = _uatom(U, Var(g.var))
            return Quant(g.q, g.var, Implies(guard, body) if g.q == FORALL else And((guard, body)))
        if isinstance(g, (RelQuant, FunQuant)):
            body = walk(g.body)
            guard = (relation_guard if isinstance(g, RelQuant) else function_guard)(g.name, g.arity, U)
            inner = Implies(guard, body) if g.q == FORALL else And((guard, body))
            return type(g)(g.q, g.name, g.arity, inner)
        kids = children(g)
        return rebuild(g, tuple(walk(k) for k in kids)) if kids else g

    return walk(f)


# ---------------------------------------------------------------------------
# Priming


@dataclass(frozen=True)
class VocabularyRenaming:
    """Arity-preserving bijection from ``source`` onto a disjoint vocabulary."""

    source: Vocabulary
    mapping: Mapping[str, str]

    def __post_init__(self):
        if set(self.mapping) != set(self.source.names):
            raise TransformError("renaming must be defined exactly on the source vocabulary")
        targets = list(self.mapping.values())
        if len(set(targets)) != len(targets):
            raise TransformError("renaming is not injective")
        clash = set(targets) & set(self.source.names)
        if clash:
            raise TransformError(f"renamed vocabulary overlaps the source: {sorted(clash)}")
        self.target  # validates the names

    def __hash__(self):
        return hash((self.source, tuple(sorted(self.mapping.items()))))

    @property
    def target(self) -> Vocabulary:
        return Vocabulary(tuple((self.mapping[n], a) for n, a in self.source.relations),
                          tuple((self.mapping[n], a) for n, a in self.source.functions))

    def __getitem__(self, name: str) -> str:
        return self.mapping[name]

    def inverse(self) -> "VocabularyRenaming":
        return VocabularyRenaming(self.target, {b: a for a, b in self.mapping.items()})


def priming(vocab: Vocabulary, suffix: str = PRIME_SUFFIX) -> VocabularyRenaming:
    return VocabularyRenaming(vocab, {n: n + suffix for n in vocab.names})


def prime(f: Formula, ren: VocabularyRenaming) -> Formula:
    """Replace every symbol of ``f`` by its image under ``ren``."""
    syms = free_symbols(f)[0]
    missing = sorted(syms - set(ren.mapping))
    if missing:
        raise TransformError(f"symbols not covered by the renaming: {missing}")
    rel = {n: ren[n] for n, _ in ren.source.relations}
    fun = {n: ren[n] for n, _ in ren.source.functions}
    return map_symbols(f, rel, fun)


# ---------------------------------------------------------------------------
# ISO and CAT


def _iso_map(F: str):
    k = so_fun_arity(F)
    if k is not None:
        if k != 1:
            raise TransformError("the isomorphism variable must be unary")
        return lambda t: FunVarApp(F, 1, (t,))
    return lambda t: App(F, (t,))


def iso_sentence(L: Vocabulary, ren: Optional[VocabularyRenaming] = None, F: str = DEFAULT_ISO,
                 U: str = DEFAULT_U, U2: str = DEFAULT_U_PRIME, mode: str = "guarded") -> Formula:
    """``F`` is an isomorphism from the ``U``-part of ``L`` onto the ``U2``-part of ``L'``.

    ``mode="guarded"`` restricts injectivity, preservation and commutation to
    ``U``; ``mode="literal"`` leaves them unrestricted.  ``F`` is a function
    variable name (``F1f``) or a unary function symbol.
    """
    if mode not in ("guarded", "literal"):
        raise TransformError(f"unknown ISO mode {mode!r}")
    ren = ren or priming(L)
    if ren.source != L:
        raise TransformError("renaming source differs from L")
    Lp = ren.target
    names = set(L.names) | set(Lp.names)
    for sym in (U, U2) + (() if so_fun_arity(F) is not None else (F,)):
        if sym in names:
            raise TransformError(f"{sym!r} clashes with L or L'")
    if len({U, U2, F}) < 3:
        raise TransformError("U, U' and F must be distinct")
    Fm = _iso_map(F)
    guarded = mode == "guarded"
    x, y = Var("x"), Var("y")
    items: list[Formula] = [
        Quant(FORALL, "x", Implies(_uatom(U, x), _uatom(U2, Fm(x)))),
    ]
    inj = Implies(Equals(Fm(x), Fm(y)), Equals(x, y))
    if guarded:
        inj = Implies(And((_uatom(U, x), _uatom(U, y), Equals(Fm(x), Fm(y)))), Equals(x, y))
    items.append(_forall(["x", "y"], inj))
    items.append(Quant(FORALL, "x", Implies(_uatom(U2, x), Quant(
        EXISTS, "y", And((_uatom(U, y), Equals(Fm(y), x)))))))

    def guard_for(xs, body):
        if not guarded or not xs:
            return _forall(xs, body)
        return _forall(xs, Implies(conj(_uatom(U, Var(v)) for v in xs), body))

    for name, n in L.relations:
        xs = _vars(n)
        args = tuple(Var(v) for v in xs)
        body = Iff(Atom(name, args), Atom(ren[name], tuple(Fm(a) for a in args)))
        items.append(guard_for(xs, body))
    for name, n in L.functions:
        xs = _vars(n) if n else []
        args = tuple(Var(v) for v in xs)
        body = Equals(Fm(App(name, args)), App(ren[name], tuple(Fm(a) for a in args)))
        items.append(guard_for(xs, body))
    return conj(items)


def cat_plus(f: Formula, ren: Optional[VocabularyRenaming] = None, U: str = DEFAULT_U,
             U2: str = DEFAULT_U_PRIME, F: str = DEFAULT_ISO, mode: str = "guarded",
             vocab: Optional[Vocabulary] = None) -> Formula:
    """``(Res(U) & Res'(U2) & f^U & f'^U2) -> ?F ISO(F, U, U2)``."""
    if not is_sentence(f):
        raise TransformError("cat_plus expects a sentence")
    L = vocab if vocab is not None else (ren.source if ren else vocabulary_of(f))
    ren = ren or priming(L)
    if so_fun_arity(F) is None:
        raise TransformError("F must be a unary function variable name such as F1f")
    fp = prime(f, ren)
    antecedent = And((res_sentence(L, U), res_sentence(ren.target, U2),
                      relativize(f, U), relativize(fp, U2)))
    consequent = FunQuant(EXISTS, F, 1, iso_sentence(L, ren, F, U, U2, mode))
    return Implies(antecedent, consequent)


def symbol_variables(vocab: Vocabulary) -> dict[str, str]:
    """Second-order variable names used when a symbol is quantified away."""
    out = {}
    for name, k in vocab.relations:
        out[name] = rel_var_name(k, name)
    for name, k in vocab.functions:
        out[name] = fun_var_name(k, name)
    return out


def universal_closure(f: Formula, vocab: Vocabulary) -> Formula:
    """Replace the symbols of ``vocab`` by variables and quantify them universally.

    Quantifiers appear in the order of ``vocab.names``.
    """
    return _closure_in_order(f, vocab, list(vocab.names))


def cat(f: Formula, ren: Optional[VocabularyRenaming] = None, U: str = DEFAULT_U,
        U2: str = DEFAULT_U_PRIME, F: str = DEFAULT_ISO, mode: str = "guarded",
        vocab: Optional[Vocabulary] = None) -> Formula:
    """Empty-vocabulary sentence quantifying every symbol of ``cat_plus`` universally.

    The prefix lists ``U`` and the ``L`` symbols before ``U2`` and the ``L'``
    symbols, so an evaluator can settle the unprimed half of the antecedent
    before enumerating the primed half.
    """
    L = vocab if vocab is not None else (ren.source if ren else vocabulary_of(f))
    ren = ren or priming(L)
    body = cat_plus(f, ren, U, U2, F, mode, L)
    full = Vocabulary(((U, 1),) + L.relations + ((U2, 1),) + ren.target.relations,
                      L.functions + ren.target.functions)
    order = [U, *L.names, U2, *(ren[n] for n in L.names)]
    return _closure_in_order(body, full, order)


def _closure_in_order(f: Formula, vocab: Vocabulary, order: list[str]) -> Formula:
    names = symbol_variables(vocab)
    clash = sorted(set(names.values()) & all_names(f))
    if clash:
        raise TransformError(f"variable names already used: {clash}")
    body = abstract_symbols(f, {n: names[n] for n, _ in vocab.relations},
                            {n: names[n] for n, _ in vocab.functions})
    for name in reversed(order):
        k = vocab.arity(name)
        cls = RelQuant if vocab.is_relation(name) else FunQuant
        body = cls(FORALL, names[name], k, body)
    return body


# ---------------------------------------------------------------------------
# Theory instance sets


@dataclass(frozen=True)
class TheoryInstanceSet:
    """Named, ordered list of sentences with the parameters that generated them."""

    name: str
    sentences: tuple[Formula, ...]
    params: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        for s in self.sentences:
            if not is_sentence(s):
                raise TransformError(f"not a sentence: {render_formula(s)}")

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    @property
    def vocab(self) -> Vocabulary:
        return vocabulary_of(list(self.sentences)) if self.sentences else Vocabulary()

    def union(self, other: "TheoryInstanceSet", name: Optional[str] = None) -> "TheoryInstanceSet":
        return TheoryInstanceSet(name or f"{self.name}+{other.name}",
                                 self.sentences + other.sentences, self.params + other.params)

    def to_text(self) -> str:
        lines = [f"theory {self.name}"]
        lines += [f"param {k} {v}" for k, v in self.params]
        lines += [f"axiom {render_formula(s)}" for s in self.sentences]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TheoryInstanceSet":
        name, params, sentences = "", [], []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            head, _, rest = line.partition(" ")
            if head == "theory":
                name = rest.strip()
            elif head == "param":
                k, _, val = rest.strip().partition(" ")
                params.append((k, val.strip()))
            elif head == "axiom":
                sentences.append(parse_sentence(rest)[0])
            else:
                raise TransformError(f"line {lineno}: unexpected {head!r}")
        return cls(name, tuple(sentences), tuple(params))


def comprehension_instances(vocab: Vocabulary, pool: Iterable[Formula], m: int,
                            target: Optional[str] = None) -> TheoryInstanceSet:
    """``!xs !Xs ?X !y1..ym (X(y1..ym) <-> phi)`` for each ``phi`` in ``pool``.

    Free first-order variables other than ``y1..ym`` and free second-order
    variables become universally quantified parameters (sorted by name).
    """
    if m < 1:
        raise TransformError("comprehension arity must be at least 1")
    ys = [f"y{i}" for i in range(1, m + 1)]
    out = []
    pool = list(pool)
    for phi in pool:
        syms, fo, so = free_symbols(phi)
        X = target or fresh_name(rel_var_name(m), set(so) | all_names(phi))
        extra = sorted(syms - set(vocab.names))
        if extra:
            raise TransformError(f"pool formula uses symbols outside the vocabulary: {extra}")
        if X in so:
            raise TransformError(f"{X} occurs free in a pool formula")
        xs = sorted(fo - set(ys))
        clash = [y for y in ys if y in so]
        if clash:
            raise TransformError(f"bad parameter names: {clash}")
        body = Iff(RelVarAtom(X, m, tuple(Var(y) for y in ys)), phi)
        g: Formula = RelQuant(EXISTS, X, m, _forall(ys, body))
        for name in sorted(so, reverse=True):
            g = _so_binder(FORALL, name, g)
        g = _forall(xs, g)
        out.append(g)
    return TheoryInstanceSet(f"comprehension{m}", tuple(out),
                             (("arity", str(m)), ("pool", str(len(pool)))))


def _so_binder(q: str, name: str, body: Formula) -> Formula:
    k = so_fun_arity(name)
    if k is not None:
        return FunQuant(q, name, k, body)
    from .syntax import so_rel_arity
    k = so_rel_arity(name)
    if k is None:
        raise TransformError(f"{name!r} is not a second-order variable")
    return RelQuant(q, name, k, body)


# ---------------------------------------------------------------------------
# Arithmetic: defined constants, induction, doubled Peano theory

PLUS, TIMES = "add", "mul"
PLUS_P, TIMES_P = PLUS + PRIME_SUFFIX, TIMES + PRIME_SUFFIX


def arith_vocab(plus: str = PLUS, times: str = TIMES) -> Vocabulary:
    return Vocabulary((), ((plus, 2), (times, 2)))


DOUBLED_VOCAB = arith_vocab().union(arith_vocab(PLUS_P, TIMES_P))


def zero_def(z: str, plus: str = PLUS) -> str:
    """Text of "z is the additive identity": ``z + z = z``."""
    return f"({plus}({z}, {z}) = {z})"


def one_def(o: str, plus: str = PLUS, times: str = TIMES) -> str:
    """Text of "o is the multiplicative identity": ``o * o = o`` and ``o + o != o``."""
    return f"({times}({o}, {o}) = {o} & ~({plus}({o}, {o}) = {o}))"


def _arith(text: str) -> Formula:
    return parse_formula(text, DOUBLED_VOCAB, free=())


def peano_base(plus: str = PLUS, times: str = TIMES) -> TheoryInstanceSet:
    """Eight base axioms with 0 and 1 expressed through their defining formulas."""
    P, T = plus, times
    Z = lambda z: zero_def(z, P)
    O = lambda o: one_def(o, P, T)
    texts = [
        f"?z {Z('z')}",
        f"?o {O('o')}",
        f"!x !o !z (({O('o')} & {Z('z')}) -> ~({P}(x, o) = z))",
        f"!x !y !o ({O('o')} -> ({P}(x, o) = {P}(y, o) -> x = y))",
        f"!x !z ({Z('z')} -> {P}(x, z) = x)",
        f"!x !y !o ({O('o')} -> {P}(x, {P}(y, o)) = {P}({P}(x, y), o))",
        f"!x !z ({Z('z')} -> {T}(x, z) = z)",
        f"!x !y !o ({O('o')} -> {T}(x, {P}(y, o)) = {P}({T}(x, y), x))",
    ]
    vocab = arith_vocab(P, T)
    return TheoryInstanceSet(f"peano({P},{T})",
                             tuple(parse_formula(t, vocab, free=()) for t in texts))


def induction_instance(phi: Formula, var: str = "y", params: Optional[Iterable[str]] = None,
                       plus: str = PLUS, times: str = TIMES) -> Formula:
    """Induction on ``var`` for ``phi`` with the parameters universally closed.

    ``phi(0)`` becomes ``?z (z + z = z & phi(z))`` and ``phi(y + 1)`` becomes
    ``?o (one(o) & phi(y + o))`` with fresh ``z`` and ``o``.
    """
    _, fo, so = free_symbols(phi)
    if var not in fo:
        raise TransformError(f"induction variable {var!r} is not free in the formula")
    if so:
        raise TransformError("induction formulas must be first order")
    params = sorted(fo - {var}) if params is None else list(params)
    missing = sorted(fo - {var} - set(params))
    if missing:
        raise TransformError(f"free variables not declared as parameters: {missing}")
    taken = all_names(phi) | set(params) | {var}
    z = fresh_name("z", taken)
    o = fresh_name("o", taken | {z})
    zero = parse_formula(zero_def(z, plus), arith_vocab(plus, times))
    one = parse_formula(one_def(o, plus, times), arith_vocab(plus, times))
    base = Quant(EXISTS, z, And((zero, substitute(phi, {var: Var(z)}))))
    succ = App(plus, (Var(var), Var(o)))
    step = Quant(FORALL, var, Implies(phi, Quant(EXISTS, o, And((one, substitute(phi, {var: succ}))))))
    body = Implies(And((base, step)), Quant(FORALL, var, phi))
    return _forall(params, body)


def induction_template(plus: str = PLUS, times: str = TIMES) -> SchemaTemplate:
    """The induction schema as a template with a unary hole ``P1``."""
    hole = RelVarAtom("P1", 1, (Var("y"),))
    zero = parse_formula(zero_def("z", plus), arith_vocab(plus, times))
    one = parse_formula(one_def("o", plus, times), arith_vocab(plus, times))
    at = lambda t: RelVarAtom("P1", 1, (t,))
    base = Quant(EXISTS, "z", And((zero, at(Var("z")))))
    step = Quant(FORALL, "y", Implies(hole, Quant(EXISTS, "o", And((
        one, at(App(plus, (Var("y"), Var("o")))))))))
    body = Implies(And((base, step)), Quant(FORALL, "y", hole))
    return SchemaTemplate(f"induction({plus},{times})", body, "P1", ("y",))


def induction_pool(depth: int, symbols: Iterable[str] = (PLUS, TIMES, PLUS_P, TIMES_P),
                   var: str = "y") -> list[Formula]:
    """Equations ``s = t`` between distinct terms in ``var`` of depth at most ``depth``.

    Pairs are ordered so that ``s`` renders before ``t``; the list is sorted.
    """
    if depth < 0:
        raise TransformError("depth must be non-negative")
    terms: set[Term] = {Var(var)}
    for _ in range(depth):
        terms |= {App(f, (a, b)) for f in symbols for a in terms for b in terms}
    from .syntax import render_term
    ordered = sorted(terms, key=render_term)
    out = []
    for i, s in enumerate(ordered):
        for t in ordered[i + 1:]:
            out.append(Equals(s, t))
    return out


def peano_doubled(pool: Iterable[Formula], pool_p: Optional[Iterable[Formula]] = None,
                  var: str = "y", name: str = "peano-doubled",
                  params: Iterable[tuple[str, str]] = ()) -> TheoryInstanceSet:
    """Base axioms for both copies, induction for ``pool`` in the unprimed copy
    and for ``pool_p`` in the primed copy; mixed-vocabulary formulas are admitted."""
    pool = list(pool)
    pool_p = list(pool) if pool_p is None else list(pool_p)
    for phi in pool + pool_p:
        extra = sorted(free_symbols(phi)[0] - set(DOUBLED_VOCAB.names))
        if extra:
            raise TransformError(f"induction formula uses symbols outside {{+,*,+',*'}}: {extra}")
    base = peano_base(PLUS, TIMES).sentences + peano_base(PLUS_P, TIMES_P).sentences
    ind = tuple(induction_instance(phi, var) for phi in pool)
    ind_p = tuple(induction_instance(phi, var, plus=PLUS_P, times=TIMES_P) for phi in pool_p)
    meta = (("pool", str(len(pool))), ("pool_p", str(len(pool_p)))) + tuple(params)
    return TheoryInstanceSet(name, base + ind + ind_p, meta)


# ---------------------------------------------------------------------------
# The coding formula psi(x, u, v), phi(u, v) and ISOM


def le_text(a: str, b: str, plus: str = PLUS) -> str:
    """``a <= b`` as ``?lek a + lek = b`` (a quantifier bounded by ``b``)."""
    return f"(?lek ({plus}({a}, lek) = {b}))"


def bex(w: str, bound: str, body: str) -> str:
    return f"(?{w} ({le_text(w, bound)} & {body}))"


def ball(w: str, bound: str, body: str) -> str:
    return f"(!{w} ({le_text(w, bound)} -> {body}))"


def _rem(c: str, m: str, q: str, w: str, body: str) -> str:
    """``body`` holds of ``w = c mod m`` (quotient ``q``)."""
    qm = f"mul({q}, {m})"
    return bex(q, c, f"({le_text(qm, c)} & ~{le_text(f'add({qm}, {m})', c)} & "
               + bex(w, c, f"({c} = add({qm}, {w}) & {body})") + ")")


def _pair(x: str, s: str, a: str, e: str, rest: str) -> str:
    """``x`` decodes as ``(a, e)`` with ``x = (a + e)^2 + a``."""
    sq = f"mul({s}, {s})"
    return bex(s, x, f"({le_text(sq, x)} & {le_text(x, f'add({sq}, add({s}, {s}))')} & "
               + bex(a, x, f"({x} = add({sq}, {a}) & "
                     + bex(e, x, f"({s} = add({a}, {e}) & {rest})") + ")") + ")")


def psi_text() -> str:
    """Text of psi(x, u, v); see :func:`build_graph_formula`."""
    mod = lambda i: f"add(o, mul(add({i}, o), d))"
    base = bex("z", "c", f"({zero_def('z')} & "
               + _rem("c", mod("z"), "qz", "wz", zero_def("wz", PLUS_P)) + ")")
    step = ball("y", "u", ball("t", "u", f"(t = add(y, o) -> "
                + _rem("c", mod("y"), "q1", "w1",
                       _rem("c", mod("t"), "q2", "w2", f"(w2 = {PLUS_P}(w1, e))")) + ")"))
    last = _rem("c", mod("u"), "ql", "wl", "(wl = v)")
    body = bex("o", "x", f"({one_def('o')} & {base} & {last} & {step})")
    inner = _pair("a", "s2", "c", "d", body)
    return _pair("x", "s", "a", "e", f"({one_def('e', PLUS_P, TIMES_P)} & {inner})")


def build_graph_formula() -> tuple[Formula, Formula]:
    """``(psi, phi)`` with ``phi(u, v) = ?x psi(x, u, v)``.

    ``x`` decodes as a pair ``(a, e)`` where ``e`` is the primed unit, and
    ``a`` as a pair ``(c, d)`` of beta-function parameters: the ``i``-th
    sequence entry is ``c mod (1 + (i + 1) d)``.  ``psi`` states that entry 0
    is the primed zero, entry ``i + 1`` is entry ``i`` plus ``e`` in the primed
    operations (for ``i < u``) and entry ``u`` is ``v``; the last clause comes
    before the step clause so a wrong ``v`` is rejected early.  Every quantifier is
    bounded by a term in ``x``, ``u`` and ``v`` using the unprimed order.
    """
    psi = parse_formula(psi_text(), DOUBLED_VOCAB, free=("x", "u", "v"))
    phi = Quant(EXISTS, "x", psi)
    return psi, phi


def phi_at(phi: Formula, a: Term, b: Term) -> Formula:
    return substitute(phi, {"u": a, "v": b})


def isom_clauses(phi: Optional[Formula] = None) -> dict[str, Formula]:
    """Totality, functionality, injectivity, surjectivity and both homomorphism clauses."""
    if phi is None:
        phi = build_graph_formula()[1]
    V = Var
    P = lambda a, b: phi_at(phi, a, b)
    clauses = {
        "total": Quant(FORALL, "a", Quant(EXISTS, "b", P(V("a"), V("b")))),
        "functional": _forall(["a", "b", "b2"], Implies(And((P(V("a"), V("b")), P(V("a"), V("b2")))),
                                                         Equals(V("b"), V("b2")))),
        "injective": _forall(["a", "a2", "b"], Implies(And((P(V("a"), V("b")), P(V("a2"), V("b")))),
                                                        Equals(V("a"), V("a2")))),
        "surjective": Quant(FORALL, "b", Quant(EXISTS, "a", P(V("a"), V("b")))),
    }
    for key, op, op_p in (("add", PLUS, PLUS_P), ("mul", TIMES, TIMES_P)):
        clauses[key] = _forall(["a1", "a2", "b1", "b2", "c"], Implies(
            And((P(V("a1"), V("b1")), P(V("a2"), V("b2")),
                 P(App(op, (V("a1"), V("a2"))), V("c")))),
            Equals(App(op_p, (V("b1"), V("b2"))), V("c"))))
    return clauses


def isom_statement(phi: Optional[Formula] = None) -> Formula:
    """First-order sentence: ``phi`` is the graph of an isomorphism (+,*) -> (+',*')."""
    return And(tuple(isom_clauses(phi).values()))


def theorem4_pool(phi: Optional[Formula] = None) -> tuple[list[Formula], list[Formula]]:
    """Induction formulas (in ``y``) that the existence and uniqueness arguments use.

    Returns ``(unprimed, primed)`` pools: existence of an image, uniqueness
    and both homomorphism clauses by induction in the unprimed copy, and
    existence of a preimage by induction in the primed copy.
    """
    if phi is None:
        phi = build_graph_formula()[1]
    V = Var
    P = lambda a, b: phi_at(phi, a, b)
    image = Quant(EXISTS, "b", P(V("y"), V("b")))
    unique = _forall(["b", "b2"], Implies(And((P(V("y"), V("b")), P(V("y"), V("b2")))),
                                          Equals(V("b"), V("b2"))))
    homs = []
    for op, op_p in ((PLUS, PLUS_P), (TIMES, TIMES_P)):
        homs.append(_forall(["a", "b1", "b2", "c"], Implies(
            And((P(V("a"), V("b1")), P(V("y"), V("b2")), P(App(op, (V("a"), V("y"))), V("c")))),
            Equals(App(op_p, (V("b1"), V("b2"))), V("c")))))
    preimage = Quant(EXISTS, "a", P(V("a"), V("y")))
    return [image, unique, *homs], [preimage]


# ---------------------------------------------------------------------------
# Set theory with an extended separation/replacement vocabulary


def zfc_base(e: str = "e1") -> TheoryInstanceSet:
    """Extensionality, Foundation, Pairing, Union, Power set, Infinity, Choice."""
    m = lambda a, b: f"{e}({a}, {b})"
    texts = [
        f"!x !y (!z ({m('z', 'x')} <-> {m('z', 'y')}) -> x = y)",
        f"!x ((?y {m('y', 'x')}) -> ?y ({m('y', 'x')} & ~(?z ({m('z', 'y')} & {m('z', 'x')}))))",
        f"!x !y ?z ({m('x', 'z')} & {m('y', 'z')})",
        f"!x ?y !z !w (({m('z', 'w')} & {m('w', 'x')}) -> {m('z', 'y')})",
        f"!x ?y !z ((!w ({m('w', 'z')} -> {m('w', 'x')})) -> {m('z', 'y')})",
        f"?x ((?n ({m('n', 'x')} & !y ~{m('y', 'n')})) & "
        f"!y ({m('y', 'x')} -> ?z ({m('z', 'x')} & !w ({m('w', 'z')} <-> ({m('w', 'y')} | w = y)))))",
        f"!x (((!y ({m('y', 'x')} -> ?z {m('z', 'y')})) & "
        f"(!y !y2 (({m('y', 'x')} & {m('y2', 'x')} & ~(y = y2)) -> ~(?z ({m('z', 'y')} & {m('z', 'y2')}))))) -> "
        f"?c !y ({m('y', 'x')} -> ?z ({m('z', 'y')} & {m('z', 'c')} & "
        f"!w (({m('w', 'y')} & {m('w', 'c')}) -> w = z))))",
    ]
    vocab = Vocabulary(((e, 2),), ())
    return TheoryInstanceSet(f"zfc({e})", tuple(parse_formula(t, vocab, free=()) for t in texts))


def separation_instance(phi: Formula, e: str, var: str = "a") -> Formula:
    """``!params !x ?y !a (a e y <-> (a e x & phi))``."""
    _, fo, so = free_symbols(phi)
    if so:
        raise TransformError("separation formulas must be first order")
    params = sorted(fo - {var})
    taken = all_names(phi) | fo
    x = fresh_name("x", taken)
    y = fresh_name("y", taken | {x})
    a = Var(var)
    body = Iff(Atom(e, (a, Var(y))), And((Atom(e, (a, Var(x))), phi)))
    return _forall(params, Quant(FORALL, x, Quant(EXISTS, y, Quant(FORALL, var, body))))


def replacement_instance(phi: Formula, e: str, src: str = "a", dst: str = "b") -> Formula:
    """If ``phi(a, b)`` is functional on ``x`` then the image of ``x`` is covered by a set."""
    _, fo, so = free_symbols(phi)
    if so:
        raise TransformError("replacement formulas must be first order")
    params = sorted(fo - {src, dst})
    taken = all_names(phi) | fo | {src, dst}
    x = fresh_name("x", taken)
    y = fresh_name("y", taken | {x})
    b2 = fresh_name(dst + "2", taken | {x, y})
    A, B, B2 = Var(src), Var(dst), Var(b2)
    unique = Quant(EXISTS, dst, And((phi, Quant(FORALL, b2, Implies(
        substitute(phi, {dst: B2}), Equals(B2, B))))))
    hyp = Quant(FORALL, src, Implies(Atom(e, (A, Var(x))), unique))
    concl = Quant(EXISTS, y, Quant(FORALL, src, Implies(Atom(e, (A, Var(x))), Quant(
        EXISTS, dst, And((Atom(e, (B, Var(y))), phi))))))
    return _forall(params, Quant(FORALL, x, Implies(hyp, concl)))


def zfc_extended(e: str, extra: Iterable[str], pool: Iterable[Formula]) -> TheoryInstanceSet:
    """Base axioms for ``e`` plus Separation and Replacement for every pool formula.

    Pool formulas may use ``e`` and the symbols in ``extra``; ``a`` (and ``b``
    for Replacement) are the designated variables, other free variables are
    parameters.
    """
    allowed = {e, *extra}
    pool = list(pool)
    for phi in pool:
        bad = sorted(free_symbols(phi)[0] - allowed)
        if bad:
            raise TransformError(f"pool formula uses symbols outside {sorted(allowed)}: {bad}")
    base = zfc_base(e).sentences
    sep = tuple(separation_instance(phi, e) for phi in pool)
    rep = tuple(replacement_instance(phi, e) for phi in pool)
    name = f"zfc({e},{{{','.join(sorted(extra))}}})"
    return TheoryInstanceSet(name, base + sep + rep, (("pool", str(len(pool))),))


def zfc_doubled(pool: Iterable[Formula], e1: str = "e1", e2: str = "e2") -> TheoryInstanceSet:
    pool = list(pool)
    both = zfc_extended(e1, [e2], pool).sentences + zfc_extended(e2, [e1], pool).sentences
    return TheoryInstanceSet("zfc-doubled", both, (("pool", str(len(pool))),))
