"""AST, parser and printer for second-order formulas over finite vocabularies.

The concrete grammar is ASCII::

    !x  ?x          first-order quantifiers
    !X2 ?X2         relation-variable quantifiers (arity is the digit run)
    !F1f ?F1f       function-variable quantifiers
    ~  &  |  ->  <->
    R(t1, ..., tk)  t1 = t2  $true  $false

Precedence binds ``~`` and the quantifiers tightest, then ``&``, ``|``,
``->`` (right associative) and finally ``<->``.  ``#`` starts a comment.

Second-order variable names carry their arity: ``X2``, ``Y1_a`` and
``F0f_c`` are a binary relation variable, a unary relation variable and a
nullary function variable.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Union

FORALL = "!"
EXISTS = "?"

FO_VAR_RE = re.compile(r"[a-z][a-z0-9_]*\Z")
SO_REL_RE = re.compile(r"[A-Z][A-Za-z]*(\d+)(?:_[A-Za-z0-9_]+)?\Z")
SO_FUN_RE = re.compile(r"[A-Z][A-Za-z]*(\d+)f(?:_[A-Za-z0-9_]+)?\Z")
SYMBOL_RE = re.compile(r"[A-Za-z0-9_]+\Z")


class SyntaxError_(ValueError):
    """Base class for malformed formulas and vocabularies."""


class ParseError(SyntaxError_):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line else ""
        super().__init__(f"{message}{where}")


class ArityError(SyntaxError_):
    pass


class UnknownSymbolError(ParseError):
    pass


class UnboundVariableError(ParseError):
    pass


def so_rel_arity(name: str) -> Optional[int]:
    m = SO_REL_RE.match(name)
    return int(m.group(1)) if m else None


def so_fun_arity(name: str) -> Optional[int]:
    m = SO_FUN_RE.match(name)
    return int(m.group(1)) if m else None


def is_fo_var(name: str) -> bool:
    return bool(FO_VAR_RE.match(name))


def rel_var_name(arity: int, tag: str = "") -> str:
    return f"X{arity}_{tag}" if tag else f"X{arity}"


def fun_var_name(arity: int, tag: str = "") -> str:
    return f"F{arity}f_{tag}" if tag else f"F{arity}f"


# ---------------------------------------------------------------------------
# Vocabulary


@dataclass(frozen=True)
class Vocabulary:
    """Relation symbols (arity >= 1) and function symbols (arity >= 0).

    Constants are nullary function symbols.
    """

    relations: tuple[tuple[str, int], ...] = ()
    functions: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple((n, int(a)) for n, a in self.relations))
        object.__setattr__(self, "functions", tuple((n, int(a)) for n, a in self.functions))
        seen = set()
        for name, arity in self.relations + self.functions:
            if not SYMBOL_RE.match(name):
                raise SyntaxError_(f"bad symbol name {name!r}")
            if so_rel_arity(name) is not None or so_fun_arity(name) is not None:
                raise SyntaxError_(f"symbol {name!r} looks like a second-order variable")
            if name in seen:
                raise SyntaxError_(f"duplicate symbol {name!r}")
            seen.add(name)
        for name, arity in self.relations:
            if arity < 1:
                raise ArityError(f"relation {name!r} must have arity >= 1")
        for name, arity in self.functions:
            if arity < 0:
                raise ArityError(f"function {name!r} has negative arity")

    @classmethod
    def of(cls, relations: Mapping[str, int] | None = None,
           functions: Mapping[str, int] | None = None) -> "Vocabulary":
        return cls(tuple((relations or {}).items()), tuple((functions or {}).items()))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.relations + self.functions)

    @property
    def relation_arities(self) -> dict[str, int]:
        return dict(self.relations)

    @property
    def function_arities(self) -> dict[str, int]:
        return dict(self.functions)

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def __len__(self) -> int:
        return len(self.relations) + len(self.functions)

    def is_relation(self, name: str) -> bool:
        return name in self.relation_arities

    def is_function(self, name: str) -> bool:
        return name in self.function_arities

    def arity(self, name: str) -> int:
        rels = self.relation_arities
        if name in rels:
            return rels[name]
        return self.function_arities[name]

    def union(self, other: "Vocabulary") -> "Vocabulary":
        rels = dict(self.relations)
        funs = dict(self.functions)
        for n, a in other.relations:
            if rels.get(n, a) != a or n in funs:
                raise ArityError(f"symbol {n!r} declared inconsistently")
            rels[n] = a
        for n, a in other.functions:
            if funs.get(n, a) != a or n in rels:
                raise ArityError(f"symbol {n!r} declared inconsistently")
            funs[n] = a
        return Vocabulary(tuple(rels.items()), tuple(funs.items()))

    def restrict(self, names: Iterable[str]) -> "Vocabulary":
        keep = set(names)
        return Vocabulary(tuple((n, a) for n, a in self.relations if n in keep),
                          tuple((n, a) for n, a in self.functions if n in keep))

    def issubset(self, other: "Vocabulary") -> bool:
        return (set(self.relations) <= set(other.relations)
                and set(self.functions) <= set(other.functions))

    def to_text(self) -> str:
        lines = [f"rel {n} {a}" for n, a in self.relations]
        lines += [f"fun {n} {a}" for n, a in self.functions]
        return "".join(line + "\n" for line in lines)

    @classmethod
    def from_text(cls, text: str) -> "Vocabulary":
        rels, funs = [], []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3 or parts[0] not in ("rel", "fun") or not parts[2].isdigit():
                raise ParseError(f"bad vocabulary declaration {raw!r}", lineno, 1)
            (rels if parts[0] == "rel" else funs).append((parts[1], int(parts[2])))
        return cls(tuple(rels), tuple(funs))


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    """Application of a function symbol; nullary applications are constants."""

    symbol: str
    args: tuple["Term", ...] = ()


@dataclass(frozen=True)
class FunVarApp:
    name: str
    arity: int
    args: tuple["Term", ...] = ()

    def __post_init__(self):
        if len(self.args) != self.arity:
            raise ArityError(f"{self.name} expects {self.arity} arguments, got {len(self.args)}")


Term = Union[Var, App, FunVarApp]


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Equals:
    left: Term
    right: Term


@dataclass(frozen=True)
class Atom:
    symbol: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class RelVarAtom:
    name: str
    arity: int
    args: tuple[Term, ...]

    def __post_init__(self):
        if len(self.args) != self.arity:
            raise ArityError(f"{self.name} expects {self.arity} arguments, got {len(self.args)}")


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    items: tuple["Formula", ...]

    def __post_init__(self):
        if len(self.items) < 2:
            raise SyntaxError_("And needs at least two conjuncts; use conj()")


@dataclass(frozen=True)
class Or:
    items: tuple["Formula", ...]

    def __post_init__(self):
        if len(self.items) < 2:
            raise SyntaxError_("Or needs at least two disjuncts; use disj()")


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Quant:
    """First-order quantifier; ``q`` is ``"!"`` or ``"?"``."""

    q: str
    var: str
    body: "Formula"


@dataclass(frozen=True)
class RelQuant:
    q: str
    name: str
    arity: int
    body: "Formula"


@dataclass(frozen=True)
class FunQuant:
    q: str
    name: str
    arity: int
    body: "Formula"


Formula = Union[Top, Bottom, Equals, Atom, RelVarAtom, Not, And, Or, Implies, Iff,
                Quant, RelQuant, FunQuant]

TRUE = Top()
FALSE = Bottom()


def conj(items: Iterable[Formula]) -> Formula:
    items = tuple(items)
    if not items:
        return TRUE
    return items[0] if len(items) == 1 else And(items)


def disj(items: Iterable[Formula]) -> Formula:
    items = tuple(items)
    if not items:
        return FALSE
    return items[0] if len(items) == 1 else Or(items)


def forall(names: Iterable[str] | str, body: Formula) -> Formula:
    if isinstance(names, str):
        names = [names]
    for name in reversed(list(names)):
        body = Quant(FORALL, name, body)
    return body


def exists(names: Iterable[str] | str, body: Formula) -> Formula:
    if isinstance(names, str):
        names = [names]
    for name in reversed(list(names)):
        body = Quant(EXISTS, name, body)
    return body


def v(name: str) -> Var:
    return Var(name)


def app(symbol: str, *args: Term) -> App:
    return App(symbol, tuple(args))


def atom(symbol: str, *args: Term) -> Atom:
    return Atom(symbol, tuple(args))


def eq(left: Term, right: Term) -> Equals:
    return Equals(left, right)


BINDERS = (Quant, RelQuant, FunQuant)


def binder_name(f) -> str:
    return f.var if isinstance(f, Quant) else f.name


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (And, Or)):
        return f.items
    if isinstance(f, (Implies, Iff)):
        return (f.left, f.right)
    if isinstance(f, BINDERS):
        return (f.body,)
    return ()


def rebuild(f: Formula, kids: tuple[Formula, ...]) -> Formula:
    if isinstance(f, Not):
        return Not(kids[0])
    if isinstance(f, And):
        return And(kids)
    if isinstance(f, Or):
        return Or(kids)
    if isinstance(f, Implies):
        return Implies(*kids)
    if isinstance(f, Iff):
        return Iff(*kids)
    if isinstance(f, Quant):
        return Quant(f.q, f.var, kids[0])
    if isinstance(f, RelQuant):
        return RelQuant(f.q, f.name, f.arity, kids[0])
    if isinstance(f, FunQuant):
        return FunQuant(f.q, f.name, f.arity, kids[0])
    return f


def subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def atom_terms(f: Formula) -> tuple[Term, ...]:
    if isinstance(f, Equals):
        return (f.left, f.right)
    if isinstance(f, (Atom, RelVarAtom)):
        return f.args
    return ()


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, (App, FunVarApp)):
        for a in t.args:
            yield from subterms(a)


def term_vars(t: Term) -> set[str]:
    return {s.name for s in subterms(t) if isinstance(s, Var)}


# ---------------------------------------------------------------------------
# Rendering


def render_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    name = t.symbol if isinstance(t, App) else t.name
    if not t.args:
        return name
    return f"{name}({', '.join(render_term(a) for a in t.args)})"


_BIN = {Implies: "->", Iff: "<->"}


def render_formula(f: Formula) -> str:
    """Deterministic, fully parenthesized text for ``f``."""
    if isinstance(f, Top):
        return "$true"
    if isinstance(f, Bottom):
        return "$false"
    if isinstance(f, Equals):
        return f"({render_term(f.left)} = {render_term(f.right)})"
    if isinstance(f, (Atom, RelVarAtom)):
        name = f.symbol if isinstance(f, Atom) else f.name
        return f"{name}({', '.join(render_term(a) for a in f.args)})"
    if isinstance(f, Not):
        return f"(~{render_formula(f.body)})"
    if isinstance(f, (And, Or)):
        op = " & " if isinstance(f, And) else " | "
        return "(" + op.join(render_formula(g) for g in f.items) + ")"
    if isinstance(f, (Implies, Iff)):
        return f"({render_formula(f.left)} {_BIN[type(f)]} {render_formula(f.right)})"
    if isinstance(f, BINDERS):
        return f"({f.q}{binder_name(f)} {render_formula(f.body)})"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>#[^\n]*)|(?P<op><->|->|[~&|(),=!?])"
    r"|(?P<kw>\$true|\$false)|(?P<ident>[A-Za-z0-9_]+)"
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        for i, ch in enumerate(m.group()):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, vocab: Optional[Vocabulary], free: Optional[Iterable[str]]):
        self.toks = _tokenize(text)
        self.i = 0
        self.vocab = vocab
        self.free = None if free is None else set(free)
        self.inferred_rel: dict[str, int] = {}
        self.inferred_fun: dict[str, int] = {}
        self.bound_fo: list[str] = []
        self.bound_so: list[str] = []

    # token helpers
    def peek(self, k: int = 0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, text: Optional[str] = None) -> _Tok:
        tok = self.peek()
        if text is not None and tok.text != text:
            found = tok.text or "end of input"
            raise ParseError(f"expected {text!r} but found {found!r}", tok.line, tok.col)
        self.i += 1
        return tok

    def error(self, msg: str, tok: Optional[_Tok] = None, cls=ParseError):
        tok = tok or self.peek()
        raise cls(msg, tok.line, tok.col)

    # symbol classification
    def rel_arity(self, name: str) -> Optional[int]:
        if self.vocab is not None:
            return self.vocab.relation_arities.get(name)
        return self.inferred_rel.get(name)

    def fun_arity(self, name: str) -> Optional[int]:
        if self.vocab is not None:
            return self.vocab.function_arities.get(name)
        return self.inferred_fun.get(name)

    def is_symbol(self, name: str) -> bool:
        return self.rel_arity(name) is not None or self.fun_arity(name) is not None

    def note(self, table: dict, other: dict, name: str, arity: int, tok: _Tok):
        if name in other or (name in table and table[name] != arity):
            self.error(f"symbol {name!r} used inconsistently", tok, ArityError_)
        table.setdefault(name, arity)

    # grammar
    def parse(self) -> Formula:
        f = self.iff()
        if self.peek().kind != "eof":
            self.error(f"unexpected token {self.peek().text!r}")
        return f

    def iff(self) -> Formula:
        left = self.imp()
        while self.peek().text == "<->":
            self.take()
            left = Iff(left, self.imp())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek().text == "->":
            self.take()
            return Implies(left, self.imp())
        return left

    def disj(self) -> Formula:
        items = [self.conj()]
        while self.peek().text == "|":
            self.take()
            items.append(self.conj())
        return disj(items)

    def conj(self) -> Formula:
        items = [self.unary()]
        while self.peek().text == "&":
            self.take()
            items.append(self.unary())
        return conj(items)

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.text == "~":
            self.take()
            return Not(self.unary())
        if tok.text in (FORALL, EXISTS):
            self.take()
            return self.quantifier(tok.text)
        return self.primary()

    def quantifier(self, q: str) -> Formula:
        tok = self.take()
        name = tok.text
        if tok.kind != "ident":
            self.error("expected a variable after quantifier", tok)
        if self.vocab is not None and name in self.vocab:
            self.error(f"quantified name {name!r} clashes with a vocabulary symbol", tok)
        fa, ra = so_fun_arity(name), so_rel_arity(name)
        if fa is not None:
            self.bound_so.append(name)
            body = self.unary()
            self.bound_so.pop()
            return FunQuant(q, name, fa, body)
        if ra is not None:
            self.bound_so.append(name)
            body = self.unary()
            self.bound_so.pop()
            return RelQuant(q, name, ra, body)
        if not is_fo_var(name):
            self.error(f"bad variable name {name!r}", tok)
        self.bound_fo.append(name)
        body = self.unary()
        self.bound_fo.pop()
        return Quant(q, name, body)

    def primary(self) -> Formula:
        tok = self.peek()
        if tok.text == "(":
            self.take()
            f = self.iff()
            self.take(")")
            return f
        if tok.kind == "kw":
            self.take()
            return TRUE if tok.text == "$true" else FALSE
        if tok.kind != "ident":
            self.error(f"unexpected token {tok.text or 'end of input'!r}", tok)
        name = tok.text
        nxt = self.peek(1).text
        ra = so_rel_arity(name)
        if ra is not None and so_fun_arity(name) is None:
            self.take()
            args = self.args()
            if len(args) != ra:
                self.error(f"{name} expects {ra} arguments, got {len(args)}", tok, ArityError_)
            self.check_so_free(name, tok)
            return RelVarAtom(name, ra, args)
        arity = self.rel_arity(name)
        if arity is not None:
            self.take()
            args = self.args()
            if len(args) != arity:
                self.error(f"relation {name} expects {arity} arguments, got {len(args)}",
                           tok, ArityError_)
            return Atom(name, args)
        if self.vocab is None and nxt == "(" and not self.is_symbol(name) \
                and so_fun_arity(name) is None:
            # inference: an application followed by '=' is a term, otherwise an atom
            save = self.i
            self.take()
            args = self.args()
            if self.peek().text != "=":
                self.note(self.inferred_rel, self.inferred_fun, name, len(args), tok)
                return Atom(name, args)
            self.i = save
        left = self.term()
        self.take("=")
        return Equals(left, self.term())

    def args(self) -> tuple[Term, ...]:
        self.take("(")
        if self.peek().text == ")":
            self.take()
            return ()
        out = [self.term()]
        while self.peek().text == ",":
            self.take()
            out.append(self.term())
        self.take(")")
        return tuple(out)

    def check_so_free(self, name: str, tok: _Tok):
        if name not in self.bound_so and self.free is not None and name not in self.free:
            self.error(f"unbound variable {name!r}", tok, UnboundVariableError)

    def term(self) -> Term:
        tok = self.take()
        name = tok.text
        if tok.kind != "ident":
            self.error(f"expected a term, found {name or 'end of input'!r}", tok)
        has_args = self.peek().text == "("
        fa = so_fun_arity(name)
        if fa is not None:
            args = self.args() if has_args else ()
            if len(args) != fa:
                self.error(f"{name} expects {fa} arguments, got {len(args)}", tok, ArityError_)
            self.check_so_free(name, tok)
            return FunVarApp(name, fa, args)
        if name in self.bound_fo and not has_args:
            return Var(name)
        arity = self.fun_arity(name)
        if arity is None and self.rel_arity(name) is not None:
            self.error(f"relation symbol {name!r} used as a term", tok)
        if arity is None and self.vocab is None:
            if has_args:
                args = self.args()
                self.note(self.inferred_fun, self.inferred_rel, name, len(args), tok)
                return App(name, args)
            if is_fo_var(name) and self.free is not None and name in self.free:
                return Var(name)
            if not is_fo_var(name) or self.free is not None:
                self.note(self.inferred_fun, self.inferred_rel, name, 0, tok)
                return App(name, ())
            return Var(name)
        if arity is not None:
            args = self.args() if has_args else ()
            if len(args) != arity:
                self.error(f"function {name} expects {arity} arguments, got {len(args)}",
                           tok, ArityError_)
            return App(name, args)
        if has_args:
            self.error(f"unknown function symbol {name!r}", tok, UnknownSymbolError)
        if not is_fo_var(name):
            self.error(f"unknown symbol {name!r}", tok, UnknownSymbolError)
        if self.free is not None and name not in self.free:
            self.error(f"unbound variable {name!r}", tok, UnboundVariableError)
        return Var(name)


class ArityError_(ParseError, ArityError):
    """Arity mismatch detected while parsing (carries a position)."""


def parse_formula(text: str, vocab: Vocabulary, free: Optional[Iterable[str]] = None) -> Formula:
    """Parse ``text`` against ``vocab``.

    Free variables are allowed unless ``free`` is given, in which case any
    free variable outside it raises :class:`UnboundVariableError`.
    """
    return _Parser(text, vocab, free).parse()


def parse_sentence(text: str) -> tuple[Formula, Vocabulary]:
    """Parse a sentence without a declared vocabulary.

    Symbols are inferred from usage; bare unbound names are constants.
    """
    p = _Parser(text, None, free=())
    f = p.parse()
    return f, Vocabulary(tuple(p.inferred_rel.items()), tuple(p.inferred_fun.items()))


# ---------------------------------------------------------------------------
# Free symbols, variables and vocabulary inference


def free_symbols(f: Formula) -> tuple[frozenset, frozenset, frozenset]:
    """(vocabulary symbols used, free first-order variables, free second-order variables)."""
    syms: set[str] = set()
    fo: set[str] = set()
    so: set[str] = set()

    def term(t: Term, bfo, bso):
        if isinstance(t, Var):
            if t.name not in bfo:
                fo.add(t.name)
            return
        if isinstance(t, App):
            syms.add(t.symbol)
        elif t.name not in bso:
            so.add(t.name)
        for a in t.args:
            term(a, bfo, bso)

    def walk(g: Formula, bfo: frozenset, bso: frozenset):
        if isinstance(g, Atom):
            syms.add(g.symbol)
        elif isinstance(g, RelVarAtom) and g.name not in bso:
            so.add(g.name)
        for t in atom_terms(g):
            term(t, bfo, bso)
        if isinstance(g, Quant):
            walk(g.body, bfo | {g.var}, bso)
        elif isinstance(g, (RelQuant, FunQuant)):
            walk(g.body, bfo, bso | {g.name})
        else:
            for k in children(g):
                walk(k, bfo, bso)

    walk(f, frozenset(), frozenset())
    return frozenset(syms), frozenset(fo), frozenset(so)


def is_sentence(f: Formula) -> bool:
    _, fo, so = free_symbols(f)
    return not fo and not so


def vocabulary_of(f: Formula | Iterable[Formula]) -> Vocabulary:
    """Vocabulary of the symbols occurring in ``f``, in order of first occurrence."""
    formulas = [f] if not isinstance(f, (list, tuple)) else list(f)
    rels: dict[str, int] = {}
    funs: dict[str, int] = {}

    def note(table, other, name, arity):
        if name in other or table.get(name, arity) != arity:
            raise ArityError(f"symbol {name!r} used with inconsistent arity")
        table.setdefault(name, arity)

    for g0 in formulas:
        for g in subformulas(g0):
            if isinstance(g, Atom):
                note(rels, funs, g.symbol, len(g.args))
            for t0 in atom_terms(g):
                for t in subterms(t0):
                    if isinstance(t, App):
                        note(funs, rels, t.symbol, len(t.args))
    return Vocabulary(tuple(rels.items()), tuple(funs.items()))


def all_names(f: Formula) -> set[str]:
    """Every identifier occurring in ``f`` (symbols, bound and free variables)."""
    out: set[str] = set()
    for g in subformulas(f):
        if isinstance(g, BINDERS):
            out.add(binder_name(g))
        if isinstance(g, Atom):
            out.add(g.symbol)
        if isinstance(g, RelVarAtom):
            out.add(g.name)
        for t0 in atom_terms(g):
            for t in subterms(t0):
                out.add(t.name if isinstance(t, (Var, FunVarApp)) else t.symbol)
    return out


def so_depth(f: Formula) -> int:
    """Maximum nesting of second-order quantifiers."""
    if isinstance(f, (RelQuant, FunQuant)):
        return 1 + so_depth(f.body)
    return max((so_depth(k) for k in children(f)), default=0)


def check_formula(f: Formula, vocab: Vocabulary) -> None:
    """Raise if ``f`` uses a symbol outside ``vocab`` or with the wrong arity."""
    for g in subformulas(f):
        if isinstance(g, Atom):
            if not vocab.is_relation(g.symbol):
                raise UnknownSymbolError(f"unknown relation symbol {g.symbol!r}")
            if vocab.arity(g.symbol) != len(g.args):
                raise ArityError(f"relation {g.symbol} expects {vocab.arity(g.symbol)} arguments")
        for t0 in atom_terms(g):
            for t in subterms(t0):
                if isinstance(t, App):
                    if not vocab.is_function(t.symbol):
                        raise UnknownSymbolError(f"unknown function symbol {t.symbol!r}")
                    if vocab.arity(t.symbol) != len(t.args):
                        raise ArityError(f"function {t.symbol} expects {vocab.arity(t.symbol)} arguments")


# ---------------------------------------------------------------------------
# Fresh names, renaming and substitution


def fresh_name(base: str, avoid: set[str]) -> str:
    """A name of the same kind as ``base`` that is not in ``avoid``."""
    if so_rel_arity(base) is not None or so_fun_arity(base) is not None:
        make = (f"{base}_{i}" for i in itertools.count())
    elif is_fo_var(base):
        make = (f"{base}{i}" for i in itertools.count())
    else:
        make = (f"{base}_{i}" for i in itertools.count())
    if base not in avoid:
        return base
    for cand in make:
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


def _rename_term(t: Term, fo: Mapping[str, str], so: Mapping[str, str]) -> Term:
    if isinstance(t, Var):
        return Var(fo.get(t.name, t.name))
    args = tuple(_rename_term(a, fo, so) for a in t.args)
    if isinstance(t, App):
        return App(t.symbol, args)
    return FunVarApp(so.get(t.name, t.name), t.arity, args)


def rename_bound(f: Formula, avoid: Iterable[str] = (), distinct: bool = True) -> Formula:
    """Alpha-rename so that every binder is distinct and none is in ``avoid``.

    Binders that already satisfy both conditions keep their names.  With
    ``distinct=False`` only binders in ``avoid`` are renamed.
    """
    avoid = set(avoid)
    taken = avoid | all_names(f)
    used: set[str] = set()

    def walk(g: Formula, fo: dict, so: dict) -> Formula:
        if isinstance(g, BINDERS):
            name = binder_name(g)
            new = name
            if name in avoid or (distinct and name in used):
                new = fresh_name(name, taken)
                taken.add(new)
            used.add(new)
            if isinstance(g, Quant):
                return Quant(g.q, new, walk(g.body, {**fo, name: new}, so))
            cls = type(g)
            return cls(g.q, new, g.arity, walk(g.body, fo, {**so, name: new}))
        if isinstance(g, Equals):
            return Equals(_rename_term(g.left, fo, so), _rename_term(g.right, fo, so))
        if isinstance(g, Atom):
            return Atom(g.symbol, tuple(_rename_term(a, fo, so) for a in g.args))
        if isinstance(g, RelVarAtom):
            return RelVarAtom(so.get(g.name, g.name), g.arity,
                              tuple(_rename_term(a, fo, so) for a in g.args))
        return rebuild(g, tuple(walk(k, fo, so) for k in children(g)))

    return walk(f, {}, {})


def _subst_term(t: Term, mapping: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    args = tuple(_subst_term(a, mapping) for a in t.args)
    return App(t.symbol, args) if isinstance(t, App) else FunVarApp(t.name, t.arity, args)


def substitute(f: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Capture-avoiding substitution of terms for free first-order variables."""
    if not mapping:
        return f
    incoming = set()
    for t in mapping.values():
        incoming |= term_vars(t)
    taken = all_names(f) | incoming | set(mapping)

    def walk(g: Formula, m: dict) -> Formula:
        if isinstance(g, Quant):
            m = {k: t for k, t in m.items() if k != g.var}
            if not m:
                return g
            var = g.var
            if any(var in term_vars(t) for t in m.values()):
                new = fresh_name(var, taken)
                taken.add(new)
                m = {**m, var: Var(new)}
                var = new
            return Quant(g.q, var, walk(g.body, m))
        if isinstance(g, (RelQuant, FunQuant)):
            return type(g)(g.q, g.name, g.arity, walk(g.body, m))
        if isinstance(g, Equals):
            return Equals(_subst_term(g.left, m), _subst_term(g.right, m))
        if isinstance(g, Atom):
            return Atom(g.symbol, tuple(_subst_term(a, m) for a in g.args))
        if isinstance(g, RelVarAtom):
            return RelVarAtom(g.name, g.arity, tuple(_subst_term(a, m) for a in g.args))
        return rebuild(g, tuple(walk(k, m) for k in children(g)))

    return walk(f, dict(mapping))


def map_symbols(f: Formula, rel: Mapping[str, str] = {}, fun: Mapping[str, str] = {}) -> Formula:
    """Rename relation and function symbols (no capture issues: symbols are never bound)."""

    def term(t: Term) -> Term:
        if isinstance(t, Var):
            return t
        args = tuple(term(a) for a in t.args)
        if isinstance(t, App):
            return App(fun.get(t.symbol, t.symbol), args)
        return FunVarApp(t.name, t.arity, args)

    def walk(g: Formula) -> Formula:
        if isinstance(g, Equals):
            return Equals(term(g.left), term(g.right))
        if isinstance(g, Atom):
            return Atom(rel.get(g.symbol, g.symbol), tuple(term(a) for a in g.args))
        if isinstance(g, RelVarAtom):
            return RelVarAtom(g.name, g.arity, tuple(term(a) for a in g.args))
        return rebuild(g, tuple(walk(k) for k in children(g)))

    return walk(f)


def abstract_symbols(f: Formula, rel: Mapping[str, str] = {}, fun: Mapping[str, str] = {},
                     const_to_var: Mapping[str, str] = {}) -> Formula:
    """Replace symbols by second-order variables (or constants by FO variables).

    ``rel`` maps relation symbols to relation-variable names, ``fun`` maps
    function symbols to function-variable names and ``const_to_var`` maps
    constants to first-order variable names.  The caller guarantees the new
    names are not bound inside ``f``.
    """

    def term(t: Term) -> Term:
        if isinstance(t, Var):
            return t
        args = tuple(term(a) for a in t.args)
        if isinstance(t, App):
            if not args and t.symbol in const_to_var:
                return Var(const_to_var[t.symbol])
            if t.symbol in fun:
                return FunVarApp(fun[t.symbol], len(args), args)
            return App(t.symbol, args)
        return FunVarApp(t.name, t.arity, args)

    def walk(g: Formula) -> Formula:
        if isinstance(g, Equals):
            return Equals(term(g.left), term(g.right))
        if isinstance(g, Atom):
            args = tuple(term(a) for a in g.args)
            if g.symbol in rel:
                return RelVarAtom(rel[g.symbol], len(args), args)
            return Atom(g.symbol, args)
        if isinstance(g, RelVarAtom):
            return RelVarAtom(g.name, g.arity, tuple(term(a) for a in g.args))
        return rebuild(g, tuple(walk(k) for k in children(g)))

    return walk(f)


# ---------------------------------------------------------------------------
# Schema templates


@dataclass(frozen=True)
class SchemaTemplate:
    """A formula with a metavariable hole ``hole`` of arity ``len(hole_vars)``.

    The hole appears as a relation-variable atom; :meth:`instantiate` replaces
    each occurrence ``hole(t1..tk)`` by ``phi[hole_vars := t1..tk]``.
    """

    name: str
    template: Formula
    hole: str
    hole_vars: tuple[str, ...]

    def __post_init__(self):
        k = len(self.hole_vars)
        for g in subformulas(self.template):
            if isinstance(g, RelVarAtom) and g.name == self.hole and g.arity != k:
                raise ArityError(f"hole {self.hole} used with arity {g.arity}, expected {k}")
            if isinstance(g, BINDERS) and binder_name(g) == self.hole:
                raise SyntaxError_("the hole may not be bound")

    def instantiate(self, phi: Formula) -> Formula:
        _, fo, so = free_symbols(phi)
        template = rename_bound(self.template, avoid=(fo - set(self.hole_vars)) | so,
                                distinct=False)

        def walk(g: Formula) -> Formula:
            if isinstance(g, RelVarAtom) and g.name == self.hole:
                return substitute(phi, dict(zip(self.hole_vars, g.args)))
            return rebuild(g, tuple(walk(k) for k in children(g)))

        return walk(template)
