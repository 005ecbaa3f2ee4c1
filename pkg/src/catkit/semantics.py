"""Finite structures, full and Henkin second-order evaluation, comprehension checks."""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterable, Mapping, Optional

from .syntax import (
    EXISTS, FORALL, And, Atom, Bottom, Equals, FunQuant, FunVarApp, Iff, Implies, Not, Or,
    Quant, RelQuant, RelVarAtom, Top, Var, App, Formula, Term, Vocabulary, children,
    free_symbols, rebuild, so_depth, subformulas, conj,
)

DEFAULT_CAPACITY = 2 ** 24


def default_capacity() -> int:
    return int(os.environ.get("CATKIT_CAPACITY", DEFAULT_CAPACITY))


class EvaluationError(ValueError):
    pass


class CapacityError(RuntimeError):
    """The projected search space exceeds the configured bound."""


class StructureError(ValueError):
    pass


def table_index(args: tuple[int, ...], n: int) -> int:
    idx = 0
    for a in args:
        idx = idx * n + a
    return idx


def tuples(n: int, k: int):
    return itertools.product(range(n), repeat=k)


# ---------------------------------------------------------------------------
# Structures


@dataclass(frozen=True, eq=True)
class FiniteStructure:
    """Domain ``{0..size-1}`` with relation tuple sets and total function tables.

    Function tables are tuples indexed in lexicographic order of the argument
    tuple (``table[table_index(args, size)]``).
    """

    size: int
    vocab: Vocabulary
    relations: Mapping[str, frozenset] = field(default_factory=dict)
    functions: Mapping[str, tuple] = field(default_factory=dict)

    def __hash__(self):
        return hash(self.key())

    @classmethod
    def build(cls, size: int, vocab: Vocabulary = Vocabulary(),
              relations: Mapping[str, Iterable] | None = None,
              functions: Mapping[str, Any] | None = None) -> "FiniteStructure":
        """Validated constructor.

        Function interpretations may be tables, mappings from argument tuples
        (or plain ints for unary functions) to values, or callables.
        """
        if size < 1:
            raise StructureError("domain must be non-empty")
        relations = dict(relations or {})
        functions = dict(functions or {})
        rels: dict[str, frozenset] = {}
        funs: dict[str, tuple] = {}
        for name, arity in vocab.relations:
            if name not in relations:
                raise StructureError(f"relation {name!r} is not interpreted")
            ts = frozenset(tuple(t) if not isinstance(t, int) else (t,) for t in relations.pop(name))
            for t in ts:
                if len(t) != arity or any(not 0 <= a < size for a in t):
                    raise StructureError(f"bad tuple {t} for {name}")
            rels[name] = ts
        for name, arity in vocab.functions:
            if name not in functions:
                raise StructureError(f"function {name!r} is not interpreted")
            funs[name] = _as_table(functions.pop(name), size, arity, name)
        if relations or functions:
            raise StructureError(f"symbols outside the vocabulary: {sorted(relations) + sorted(functions)}")
        return cls(size, vocab, rels, funs)

    def key(self) -> tuple:
        return (self.size, self.vocab,
                tuple(tuple(sorted(self.relations[n])) for n, _ in self.vocab.relations),
                tuple(self.functions[n] for n, _ in self.vocab.functions))

    def apply(self, name: str, *args: int) -> int:
        return self.functions[name][table_index(args, self.size)]

    def holds(self, name: str, *args: int) -> bool:
        return tuple(args) in self.relations[name]

    def env(self) -> dict:
        out: dict = {}
        for n, s in self.relations.items():
            out["@" + n] = s
        for n, t in self.functions.items():
            out["@" + n] = t
        return out

    def to_text(self) -> str:
        return structure_to_text(self)


def _as_table(spec, size: int, arity: int, name: str) -> tuple:
    count = size ** arity
    if isinstance(spec, (tuple, list)) and len(spec) == count and all(isinstance(x, int) for x in spec):
        table = tuple(spec)
    elif callable(spec):
        table = tuple(spec(*args) for args in tuples(size, arity))
    elif isinstance(spec, Mapping):
        def look(args):
            if args in spec:
                return spec[args]
            if arity == 1 and args[0] in spec:
                return spec[args[0]]
            raise StructureError(f"function {name!r} is not total: no value at {args}")
        table = tuple(look(args) for args in tuples(size, arity))
    else:
        raise StructureError(f"cannot interpret function {name!r} from {spec!r}")
    if any(not 0 <= x < size for x in table):
        raise StructureError(f"function {name!r} leaves the domain")
    return table


def bare_structure(n: int) -> FiniteStructure:
    return FiniteStructure(n, Vocabulary(), {}, {})


def reduct(M: FiniteStructure, sub: Vocabulary | Iterable[str]) -> FiniteStructure:
    names = sub.names if isinstance(sub, Vocabulary) else tuple(sub)
    missing = [n for n in names if n not in M.vocab]
    if missing:
        raise StructureError(f"not in the structure's vocabulary: {missing}")
    voc = M.vocab.restrict(names)
    return FiniteStructure(M.size, voc,
                           {n: M.relations[n] for n, _ in voc.relations},
                           {n: M.functions[n] for n, _ in voc.functions})


def relativized_substructure(M: FiniteStructure, U: str) -> FiniteStructure:
    """The substructure on ``U`` of the reduct forgetting ``U``, re-indexed by increasing element."""
    if not M.vocab.is_relation(U) or M.vocab.arity(U) != 1:
        raise StructureError(f"{U!r} is not a unary relation of the structure")
    elems = sorted(t[0] for t in M.relations[U])
    if not elems:
        raise StructureError(f"Res violated: {U} is empty (exists x {U}(x) fails)")
    index = {e: i for i, e in enumerate(elems)}
    voc = M.vocab.restrict(n for n in M.vocab.names if n != U)
    funs = {}
    for name, arity in voc.functions:
        table = []
        for args in itertools.product(elems, repeat=arity):
            val = M.apply(name, *args)
            if val not in index:
                raise StructureError(f"Res violated: {U} is not closed under {name} "
                                     f"({name}{args} = {val})")
            table.append(index[val])
        funs[name] = tuple(table)
    rels = {name: frozenset(tuple(index[a] for a in t) for t in M.relations[name]
                            if all(a in index for a in t))
            for name, _ in voc.relations}
    return FiniteStructure(len(elems), voc, rels, funs)


def rename_structure(M: FiniteStructure, mapping: Mapping[str, str]) -> FiniteStructure:
    voc = Vocabulary(tuple((mapping.get(n, n), a) for n, a in M.vocab.relations),
                     tuple((mapping.get(n, n), a) for n, a in M.vocab.functions))
    return FiniteStructure(M.size, voc,
                           {mapping.get(n, n): s for n, s in M.relations.items()},
                           {mapping.get(n, n): t for n, t in M.functions.items()})


def merge_structures(*parts: FiniteStructure) -> FiniteStructure:
    """Union of same-domain structures over pairwise disjoint vocabularies."""
    size = parts[0].size
    voc = Vocabulary()
    rels, funs = {}, {}
    for p in parts:
        if p.size != size:
            raise StructureError("merged structures must share the domain")
        if set(voc.names) & set(p.vocab.names):
            raise StructureError("merged vocabularies must be disjoint")
        voc = voc.union(p.vocab)
        rels.update(p.relations)
        funs.update(p.functions)
    return FiniteStructure(size, voc, rels, funs)


def embed(A: FiniteStructure, size: int, U: str) -> FiniteStructure:
    """Place ``A`` on the first ``A.size`` elements of a ``size``-element domain.

    Relations are empty off the copy, functions send outside arguments to 0;
    ``U`` names the copy.
    """
    if size < A.size:
        raise StructureError("target domain too small")
    rels = {n: s for n, s in A.relations.items()}
    rels[U] = frozenset((i,) for i in range(A.size))
    funs = {}
    for name, arity in A.vocab.functions:
        funs[name] = tuple(A.apply(name, *args) if all(a < A.size for a in args) else 0
                           for args in tuples(size, arity))
    voc = A.vocab.union(Vocabulary(((U, 1),)))
    return FiniteStructure(size, voc, rels, funs)


# ---------------------------------------------------------------------------
# Second-order ranges


def relation_count(n: int, k: int) -> int:
    return 2 ** (n ** k)


def function_count(n: int, k: int) -> int:
    return n ** (n ** k)


@lru_cache(maxsize=64)
def _all_relations(n: int, k: int) -> tuple[frozenset, ...]:
    ts = list(tuples(n, k))
    return tuple(frozenset(t for t, b in zip(ts, bits) if b)
                 for bits in itertools.product((0, 1), repeat=len(ts)))


@lru_cache(maxsize=64)
def _all_functions(n: int, k: int) -> tuple[tuple, ...]:
    return tuple(itertools.product(range(n), repeat=n ** k))


def all_relations(n: int, k: int, capacity: Optional[int] = None) -> tuple[frozenset, ...]:
    """Every k-ary relation on ``{0..n-1}``, lexicographic in characteristic vectors."""
    cap = default_capacity() if capacity is None else capacity
    if relation_count(n, k) > cap:
        raise CapacityError(f"{relation_count(n, k)} relations of arity {k} on {n} points "
                            f"exceed capacity {cap}")
    return _all_relations(n, k)


def all_functions(n: int, k: int, capacity: Optional[int] = None) -> tuple[tuple, ...]:
    cap = default_capacity() if capacity is None else capacity
    if function_count(n, k) > cap:
        raise CapacityError(f"{function_count(n, k)} functions of arity {k} on {n} points "
                            f"exceed capacity {cap}")
    return _all_functions(n, k)


def characteristic_vector(rel: frozenset, n: int, k: int) -> tuple[int, ...]:
    return tuple(1 if t in rel else 0 for t in tuples(n, k))


@dataclass(frozen=True)
class Families:
    """Explicit second-order ranges per arity: relation sets and function tables."""

    relations: Mapping[int, tuple[frozenset, ...]]
    functions: Mapping[int, tuple[tuple, ...]]


def full_family(n: int, rel_arities: Iterable[int] = (), fun_arities: Iterable[int] = (),
                capacity: Optional[int] = None) -> Families:
    if n < 1:
        raise StructureError("domain must be non-empty")
    return Families({k: all_relations(n, k, capacity) for k in sorted(set(rel_arities))},
                    {k: all_functions(n, k, capacity) for k in sorted(set(fun_arities))})


@dataclass(frozen=True, eq=False)
class HenkinStructure:
    """A finite structure with explicit second-order families.

    Families are extensional and kept in lexicographic order.
    """

    base: FiniteStructure
    relations: Mapping[int, tuple[frozenset, ...]]
    functions: Mapping[int, tuple[tuple, ...]]

    @classmethod
    def build(cls, base: FiniteStructure, relations: Mapping[int, Iterable] | None = None,
              functions: Mapping[int, Iterable] | None = None) -> "HenkinStructure":
        n = base.size
        rels: dict[int, tuple] = {}
        for k, members in (relations or {}).items():
            canon = set()
            for m in members:
                s = frozenset(tuple(t) if not isinstance(t, int) else (t,) for t in m)
                for t in s:
                    if len(t) != k or any(not 0 <= a < n for a in t):
                        raise StructureError(f"bad tuple {t} in arity-{k} family")
                canon.add(s)
            rels[k] = tuple(sorted(canon, key=lambda s: characteristic_vector(s, n, k)))
        funs: dict[int, tuple] = {}
        for k, members in (functions or {}).items():
            funs[k] = tuple(sorted({_as_table(m, n, k, f"family member (arity {k})")
                                    for m in members}))
        return cls(base, rels, funs)

    @classmethod
    def full(cls, base: FiniteStructure, rel_arities=(), fun_arities=(), capacity=None):
        fam = full_family(base.size, rel_arities, fun_arities, capacity)
        return cls(base, dict(fam.relations), dict(fam.functions))

    @property
    def families(self) -> Families:
        return Families(self.relations, self.functions)


# ---------------------------------------------------------------------------
# Evaluation


def miniscope(f: Formula) -> Formula:
    """Pull conjuncts that do not mention a quantified variable out of its scope.

    ``!X ((A & B) -> C)`` becomes ``A -> !X (B -> C)`` and ``?X (A & B)``
    becomes ``A & ?X B`` whenever ``X`` does not occur free in ``A``.  Both
    rewrites are equivalences for every range, including empty ones.
    """
    kids = tuple(miniscope(k) for k in children(f))
    f = rebuild(f, kids) if kids else f
    if not isinstance(f, (Quant, RelQuant, FunQuant)):
        return f
    name = f.var if isinstance(f, Quant) else f.name

    def mentions(g: Formula) -> bool:
        _, fo, so = free_symbols(g)
        return name in fo or name in so

    def flat(g: Formula) -> list[Formula]:
        return [h for item in g.items for h in flat(item)] if isinstance(g, And) else [g]

    body = f.body
    if f.q == FORALL and isinstance(body, Implies):
        parts = flat(body.left)
        out = [p for p in parts if not mentions(p)]
        if out:
            rest = [p for p in parts if mentions(p)]
            inner = Implies(conj(rest), body.right) if rest else body.right
            return Implies(conj(out), miniscope(rebuild(f, (inner,))))
    if f.q == EXISTS and isinstance(body, And):
        parts = flat(body)
        out = [p for p in parts if not mentions(p)]
        if out and len(out) < len(parts):
            rest = [p for p in parts if mentions(p)]
            return And(tuple(out) + (miniscope(rebuild(f, (conj(rest),))),))
    return f


def _cost(f: Formula) -> tuple[int, int]:
    return (so_depth(f), sum(1 for _ in subformulas(f)))


_MISSING = object()


class Evaluator:
    """A formula compiled for a fixed domain size.

    With ``families=None`` second-order quantifiers range over everything
    (full semantics); otherwise over the given :class:`Families`.
    Conjunctions are evaluated cheapest-first and quantifier scopes are
    minimised; both are semantics-preserving.
    """

    def __init__(self, f: Formula, size: int, families: Optional[Families] = None,
                 capacity: Optional[int] = None, optimize: bool = True):
        self.formula = f
        self.size = size
        self.families = families
        self.capacity = default_capacity() if capacity is None else capacity
        self.optimize = optimize
        self._fn = self._formula(miniscope(f) if optimize else f)

    def __call__(self, M: Optional[FiniteStructure] = None, assignment: Mapping | None = None) -> bool:
        env = M.env() if M is not None else {}
        if assignment:
            env.update(assignment)
        return self._fn(env)

    def run(self, env: dict) -> bool:
        return self._fn(env)

    # ranges
    def _rel_range(self, k: int):
        if self.families is None:
            return all_relations(self.size, k, self.capacity)
        if k not in self.families.relations:
            raise EvaluationError(f"no relation family of arity {k}")
        return self.families.relations[k]

    def _fun_range(self, k: int):
        if self.families is None:
            return all_functions(self.size, k, self.capacity)
        if k not in self.families.functions:
            raise EvaluationError(f"no function family of arity {k}")
        return self.families.functions[k]

    # compilation
    def _term(self, t: Term):
        n = self.size
        if isinstance(t, Var):
            name = t.name
            return lambda env: env[name]
        key = "@" + t.symbol if isinstance(t, App) else t.name
        args = [self._term(a) for a in t.args]
        if not args:
            return lambda env: env[key][0]
        if len(args) == 1:
            a0 = args[0]
            return lambda env: env[key][a0(env)]
        if len(args) == 2:
            a0, a1 = args
            return lambda env: env[key][a0(env) * n + a1(env)]

        def general(env):
            idx = 0
            for a in args:
                idx = idx * n + a(env)
            return env[key][idx]
        return general

    def _formula(self, f: Formula):
        if isinstance(f, Top):
            return lambda env: True
        if isinstance(f, Bottom):
            return lambda env: False
        if isinstance(f, Equals):
            l, r = self._term(f.left), self._term(f.right)
            return lambda env: l(env) == r(env)
        if isinstance(f, (Atom, RelVarAtom)):
            key = "@" + f.symbol if isinstance(f, Atom) else f.name
            args = [self._term(a) for a in f.args]
            if len(args) == 1:
                a0 = args[0]
                return lambda env: (a0(env),) in env[key]
            if len(args) == 2:
                a0, a1 = args
                return lambda env: (a0(env), a1(env)) in env[key]
            return lambda env: tuple(a(env) for a in args) in env[key]
        if isinstance(f, Not):
            b = self._formula(f.body)
            return lambda env: not b(env)
        if isinstance(f, (And, Or)):
            items = sorted(f.items, key=_cost) if self.optimize else list(f.items)
            fns = tuple(self._formula(g) for g in items)
            if isinstance(f, And):
                def conj_(env):
                    for g in fns:
                        if not g(env):
                            return False
                    return True
                return conj_

            def disj_(env):
                for g in fns:
                    if g(env):
                        return True
                return False
            return disj_
        if isinstance(f, Implies):
            l, r = self._formula(f.left), self._formula(f.right)
            return lambda env: (not l(env)) or r(env)
        if isinstance(f, Iff):
            l, r = self._formula(f.left), self._formula(f.right)
            return lambda env: l(env) == r(env)
        if isinstance(f, Quant):
            return self._binder(f.q, f.var, range(self.size), self._formula(f.body))
        if isinstance(f, RelQuant):
            return self._binder(f.q, f.name, self._rel_range(f.arity), self._formula(f.body))
        if isinstance(f, FunQuant):
            return self._binder(f.q, f.name, self._fun_range(f.arity), self._formula(f.body))
        raise TypeError(f"not a formula: {f!r}")

    @staticmethod
    def _binder(q: str, name: str, rng, body):
        want = q == EXISTS

        def quant(env):
            old = env.get(name, _MISSING)
            try:
                for val in rng:
                    env[name] = val
                    if body(env) == want:
                        return want
                return not want
            finally:
                if old is _MISSING:
                    env.pop(name, None)
                else:
                    env[name] = old
        return quant


def _preflight(M: FiniteStructure, f: Formula, assignment: Mapping | None):
    syms, fo, so = free_symbols(f)
    missing = sorted(syms - set(M.vocab.names))
    if missing:
        raise EvaluationError(f"uninterpreted symbols: {missing}")
    for g in subformulas(f):
        if isinstance(g, Atom) and (not M.vocab.is_relation(g.symbol)
                                    or M.vocab.arity(g.symbol) != len(g.args)):
            raise EvaluationError(f"{g.symbol} is not a relation of arity {len(g.args)}")
    uncovered = sorted((fo | so) - set(assignment or {}))
    if uncovered:
        raise EvaluationError(f"free variables without values: {uncovered}")


def eval_full(M: FiniteStructure, f: Formula, assignment: Mapping | None = None,
              capacity: Optional[int] = None) -> bool:
    """Standard (full) semantics: second-order quantifiers range over all relations/functions."""
    _preflight(M, f, assignment)
    return Evaluator(f, M.size, None, capacity)(M, assignment)


def eval_henkin(H: HenkinStructure, f: Formula, assignment: Mapping | None = None) -> bool:
    """Henkin semantics: second-order quantifiers range over the structure's families."""
    _preflight(H.base, f, assignment)
    return Evaluator(f, H.base.size, H.families)(H.base, assignment)


# ---------------------------------------------------------------------------
# Comprehension closure


@dataclass
class InstanceResult:
    sentence: Formula
    holds: bool
    witness: Optional[dict] = None
    missing: Optional[frozenset] = None


@dataclass
class ClosureReport:
    results: list[InstanceResult]
    symbols_in_family: dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(r.holds for r in self.results)

    @property
    def failures(self) -> list[InstanceResult]:
        return [r for r in self.results if not r.holds]


def _split_comprehension(f: Formula):
    """Split ``!params ?X !ys (X(ys) <-> phi)`` into its parts, or return None."""
    prefix = []
    g = f
    while isinstance(g, (Quant, RelQuant, FunQuant)) and g.q == FORALL:
        prefix.append(g)
        g = g.body
    if not (isinstance(g, RelQuant) and g.q == EXISTS):
        return None
    target = g
    ys = []
    h = g.body
    while isinstance(h, Quant) and h.q == FORALL:
        ys.append(h.var)
        h = h.body
    if not (isinstance(h, Iff) and isinstance(h.left, RelVarAtom) and h.left.name == target.name
            and [a.name if isinstance(a, Var) else None for a in h.left.args] == ys):
        return None
    return prefix, target, ys, h.right


def check_closure(H: HenkinStructure, instances) -> ClosureReport:
    """Evaluate comprehension instances in ``H``; failures carry a parameter witness.

    ``instances`` is a ``TheoryInstanceSet`` or an iterable of sentences.
    """
    sentences = getattr(instances, "sentences", instances)
    n = H.base.size
    in_family = {}
    for name, k in H.base.vocab.relations:
        in_family[name] = H.base.relations[name] in H.relations.get(k, ())
    for name, k in H.base.vocab.functions:
        in_family[name] = H.base.functions[name] in H.functions.get(k, ())
    results = []
    for s in sentences:
        parts = _split_comprehension(s)
        if parts is None:
            raise EvaluationError(f"not a comprehension instance: {s!r}")
        prefix, target, ys, phi = parts
        _preflight(H.base, s, None)
        ranges = []
        for q in prefix:
            if isinstance(q, Quant):
                ranges.append((q.var, range(n)))
            elif isinstance(q, RelQuant):
                ranges.append((q.name, H.relations.get(q.arity, ())))
            else:
                ranges.append((q.name, H.functions.get(q.arity, ())))
        ev = Evaluator(target, n, H.families)
        phi_ev = Evaluator(phi, n, H.families)
        base_env = H.base.env()
        found = None
        for vals in itertools.product(*(r for _, r in ranges)):
            env = dict(base_env)
            env.update(zip((nm for nm, _ in ranges), vals))
            if not ev.run(dict(env)):
                found = dict(zip((nm for nm, _ in ranges), vals))
                missing = set()
                for t in tuples(n, len(ys)):
                    e2 = dict(env)
                    e2.update(zip(ys, t))
                    if phi_ev.run(e2):
                        missing.add(t)
                if eval_henkin(H, target, found):
                    raise AssertionError("closure witness failed to re-verify")
                results.append(InstanceResult(s, False, found, frozenset(missing)))
                break
        if found is None:
            results.append(InstanceResult(s, True))
    return ClosureReport(results, in_family)


# ---------------------------------------------------------------------------
# Structure file format


def _rows_rel(ts: Iterable[tuple]) -> list[str]:
    return ["t" + "".join(f" {a}" for a in t) for t in sorted(ts)]


def _rows_fun(table: tuple, n: int, k: int) -> list[str]:
    return ["m" + "".join(f" {a}" for a in args) + f" -> {table[i]}"
            for i, args in enumerate(tuples(n, k))]


def structure_to_text(M: FiniteStructure | HenkinStructure) -> str:
    H = M if isinstance(M, HenkinStructure) else None
    base = H.base if H else M
    lines = [f"domain {base.size}"]
    for name, k in base.vocab.relations:
        lines.append(f"rel {name} {k}")
        lines += _rows_rel(base.relations[name])
    for name, k in base.vocab.functions:
        lines.append(f"fun {name} {k}")
        lines += _rows_fun(base.functions[name], base.size, k)
    if H:
        for k in sorted(H.relations):
            lines.append(f"family rel {k}")
            for member in H.relations[k]:
                lines += ["begin"] + _rows_rel(member) + ["end"]
        for k in sorted(H.functions):
            lines.append(f"family fun {k}")
            for member in H.functions[k]:
                lines += ["begin"] + _rows_fun(member, base.size, k) + ["end"]
    return "\n".join(lines) + "\n"


def parse_structure(text: str) -> FiniteStructure | HenkinStructure:
    """Parse the line-oriented structure format (see :func:`structure_to_text`)."""
    size = None
    rels: dict[str, list] = {}
    funs: dict[str, dict] = {}
    rel_ar: list[tuple[str, int]] = []
    fun_ar: list[tuple[str, int]] = []
    fam_rel: dict[int, list] = {}
    fam_fun: dict[int, list] = {}
    current = None  # ("rel"|"fun", name, arity) or ("famrel"|"famfun", arity)
    member = None

    def bad(lineno, raw):
        raise StructureError(f"line {lineno}: cannot parse {raw!r}")

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        try:
            if head == "domain":
                size = int(parts[1])
            elif head == "rel" and len(parts) == 3:
                current = ("rel", parts[1], int(parts[2]))
                rel_ar.append((parts[1], int(parts[2])))
                rels[parts[1]] = []
            elif head == "fun" and len(parts) == 3:
                current = ("fun", parts[1], int(parts[2]))
                fun_ar.append((parts[1], int(parts[2])))
                funs[parts[1]] = {}
            elif head == "family":
                k = int(parts[2])
                current = ("famrel" if parts[1] == "rel" else "famfun", k)
                (fam_rel if parts[1] == "rel" else fam_fun).setdefault(k, [])
            elif head == "begin":
                member = [] if current[0] == "famrel" else {}
            elif head == "end":
                if member is None:
                    bad(lineno, raw)
                (fam_rel if current[0] == "famrel" else fam_fun)[current[1]].append(member)
                member = None
            elif head == "t":
                t = tuple(int(a) for a in parts[1:])
                if member is not None:
                    member.append(t)
                elif current and current[0] == "rel":
                    rels[current[1]].append(t)
                else:
                    bad(lineno, raw)
            elif head == "m":
                arrow = parts.index("->")
                args = tuple(int(a) for a in parts[1:arrow])
                val = int(parts[arrow + 1])
                target = member if member is not None else funs[current[1]]
                if args in target:
                    bad(lineno, raw)
                target[args] = val
            else:
                bad(lineno, raw)
        except (IndexError, ValueError, TypeError, KeyError):
            bad(lineno, raw)
    if size is None:
        raise StructureError("missing 'domain' line")
    base = FiniteStructure.build(size, Vocabulary(tuple(rel_ar), tuple(fun_ar)), rels, funs)
    if fam_rel or fam_fun:
        return HenkinStructure.build(base, fam_rel, fam_fun)
    return base
