"""Standard-model oracle for the arithmetic coding formulas, and prover export."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional

from .syntax import (
    EXISTS, FORALL, And, App, Atom, Bottom, Equals, Formula, FunQuant, FunVarApp, Iff, Implies,
    Not, Or, ParseError, Quant, RelQuant, RelVarAtom, Term, Top, Var, conj, free_symbols,
    render_formula, subformulas, subterms, term_vars,
)
from .transforms import (
    PLUS, PLUS_P, TIMES, TIMES_P, TheoryInstanceSet, build_graph_formula,
)

DEFAULT_BOUND = 10 ** 6


class BoundednessError(TypeError):
    """A quantifier without a recognised bound."""


class ArithCapacityError(RuntimeError):
    pass


@dataclass(frozen=True)
class StandardDoubledModel:
    """Naturals with standard ``+``/``*`` and a second pair of operations.

    ``bound`` caps the number of candidate values any single bounded
    quantifier may enumerate after narrowing.
    """

    plus_p: Callable[[int, int], int] = lambda a, b: a + b
    times_p: Callable[[int, int], int] = lambda a, b: a * b
    bound: int = DEFAULT_BOUND
    name: str = "standard"

    def op(self, symbol: str) -> Callable[[int, int], int]:
        if symbol == PLUS:
            return _std_add
        if symbol == TIMES:
            return _std_mul
        if symbol == PLUS_P:
            return self.plus_p
        if symbol == TIMES_P:
            return self.times_p
        raise KeyError(symbol)


def _std_add(a: int, b: int) -> int:
    return a + b


def _std_mul(a: int, b: int) -> int:
    return a * b


def standard_doubled(bound: int = DEFAULT_BOUND) -> StandardDoubledModel:
    return StandardDoubledModel(bound=bound)


def swap_pairs(k: int) -> int:
    """Swap ``2j`` and ``2j + 1`` for ``j >= 1``; fixes 0 and 1.  An involution."""
    if k < 2:
        return k
    return k + 1 if k % 2 == 0 else k - 1


def conjugated_doubled(sigma: Callable[[int], int] = swap_pairs,
                       sigma_inv: Optional[Callable[[int], int]] = None,
                       bound: int = DEFAULT_BOUND) -> StandardDoubledModel:
    """Primed operations transported along ``sigma``: ``a +' b = sigma(sigma^-1 a + sigma^-1 b)``.

    The map ``k -> sigma(k)`` is then an isomorphism from the unprimed to the
    primed copy.
    """
    inv = sigma_inv or sigma
    return StandardDoubledModel(lambda a, b: sigma(inv(a) + inv(b)),
                                lambda a, b: sigma(inv(a) * inv(b)), bound, "conjugated")


# ---------------------------------------------------------------------------
# Bounded formulas


def le_parts(f: Formula):
    """``(a, b)`` when ``f`` is ``?k add(a, k) = b`` with ``k`` not in ``a``/``b``, else None."""
    if not (isinstance(f, Quant) and f.q == EXISTS and isinstance(f.body, Equals)):
        return None
    lhs, rhs = f.body.left, f.body.right
    if not (isinstance(lhs, App) and lhs.symbol == PLUS and len(lhs.args) == 2):
        return None
    a, k = lhs.args
    if not (isinstance(k, Var) and k.name == f.var):
        return None
    if f.var in term_vars(a) or f.var in term_vars(rhs):
        return None
    return a, rhs


def _flat_and(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return [g for item in f.items for g in _flat_and(item)]
    return [f]


def quantifier_bound(f: Quant):
    """``(bound term, constraint conjuncts)`` for a bounded quantifier node.

    ``?w (w <= t & B1 & ...)`` gives ``(t, [B1, ...])``; ``!w (w <= t -> B)``
    gives ``(t, antecedent conjuncts of B)``.
    """
    if le_parts(f) is not None:
        return None
    w = f.var
    if f.q == EXISTS:
        parts = _flat_and(f.body)
        first, rest = parts[0], parts[1:]
    else:
        if not isinstance(f.body, Implies):
            raise BoundednessError(f"unbounded universal quantifier over {w}")
        ante = _flat_and(f.body.left)
        first, rest = ante[0], ante[1:]
        if isinstance(f.body.right, Implies):
            rest = rest + _flat_and(f.body.right.left)
    lp = le_parts(first)
    if lp is None or not (isinstance(lp[0], Var) and lp[0].name == w) or w in term_vars(lp[1]):
        raise BoundednessError(f"quantifier over {w} has no bound")
    return lp[1], rest


def is_bounded(f: Formula) -> bool:
    """Every quantifier is first order and bounded by a term not mentioning its variable."""
    for g in subformulas(f):
        if isinstance(g, (RelQuant, FunQuant, RelVarAtom)):
            return False
        if isinstance(g, Quant):
            try:
                quantifier_bound(g)
            except BoundednessError:
                return False
    return True


# ---------------------------------------------------------------------------
# Evaluation with sound range narrowing


def _is_poly(t: Term, w: str) -> bool:
    """Built from variables with standard ``add``/``mul`` only (so monotone in ``w``)."""
    if isinstance(t, Var):
        return True
    return (isinstance(t, App) and t.symbol in (PLUS, TIMES) and len(t.args) == 2
            and all(_is_poly(a, w) for a in t.args))


class _Eval:
    def __init__(self, M: StandardDoubledModel, capacity: int):
        self.M = M
        self.capacity = capacity
        self.enumerated = 0

    def term(self, t: Term, env: Mapping[str, int]) -> int:
        if isinstance(t, Var):
            try:
                return env[t.name]
            except KeyError:
                raise ValueError(f"free variable {t.name} has no value") from None
        if isinstance(t, App) and len(t.args) == 2:
            return self.M.op(t.symbol)(self.term(t.args[0], env), self.term(t.args[1], env))
        raise ValueError(f"unsupported term {t!r}")

    def formula(self, f: Formula, env: dict) -> bool:
        if isinstance(f, Top):
            return True
        if isinstance(f, Bottom):
            return False
        if isinstance(f, Equals):
            return self.term(f.left, env) == self.term(f.right, env)
        if isinstance(f, Not):
            return not self.formula(f.body, env)
        if isinstance(f, And):
            return all(self.formula(g, env) for g in f.items)
        if isinstance(f, Or):
            return any(self.formula(g, env) for g in f.items)
        if isinstance(f, Implies):
            return (not self.formula(f.left, env)) or self.formula(f.right, env)
        if isinstance(f, Iff):
            return self.formula(f.left, env) == self.formula(f.right, env)
        if isinstance(f, Quant):
            lp = le_parts(f)
            if lp is not None:
                return self.term(lp[0], env) <= self.term(lp[1], env)
            bound_t, constraints = quantifier_bound(f)
            hi = self.term(bound_t, env)
            cands = self.narrow(f.var, 0, hi, constraints, env)
            want = f.q == EXISTS
            old = env.get(f.var)
            try:
                for val in cands:
                    env[f.var] = val
                    if self.formula(f.body, env) == want:
                        return want
                return not want
            finally:
                if old is None:
                    env.pop(f.var, None)
                else:
                    env[f.var] = old
        raise BoundednessError(f"unsupported construct in bounded evaluation: {type(f).__name__}")

    # narrowing -----------------------------------------------------------
    def narrow(self, w: str, lo: int, hi: int, constraints, env) -> list[int] | range:
        allowed: Optional[set[int]] = None
        for c in constraints:
            if lo > hi:
                break
            r = self.constraint(w, c, lo, hi, env)
            if r is None:
                continue
            if isinstance(r, set):
                allowed = r if allowed is None else allowed & r
            else:
                lo, hi = max(lo, r[0]), min(hi, r[1])
        if lo > hi:
            return []
        if allowed is not None:
            out = sorted(a for a in allowed if lo <= a <= hi)
        else:
            out = range(lo, hi + 1)
        self.enumerated += len(out)
        if len(out) > self.capacity:
            raise ArithCapacityError(f"{len(out)} candidates for {w} exceed capacity {self.capacity}")
        return out

    def _closed(self, t: Term, w: str, env) -> bool:
        return all(v == w or v in env for v in term_vars(t))

    def constraint(self, w: str, c: Formula, lo: int, hi: int, env):
        """A sound over-approximation of ``{w in [lo, hi] : c}``: an interval, a set, or None."""
        negated = False
        if isinstance(c, Not):
            negated, c = True, c.body
        if isinstance(c, Equals) and not negated:
            l, r = c.left, c.right
            lw, rw = w in term_vars(l), w in term_vars(r)
            if lw and rw:
                return self._idempotent(w, l, r)
            if lw or rw:
                p, e = (l, r) if lw else (r, l)
                if not (_is_poly(p, w) and self._closed(p, w, env) and self._closed(e, w, env)):
                    return None
                target = self.term(e, env)
                P = self._poly(p, w, env)
                a = _first_ge(P, target, lo, hi)
                b = _last_le(P, target, lo, hi)
                return (a, b) if a <= b and P(a) == target else (1, 0)
            return None
        lp = le_parts(c) if isinstance(c, Quant) else None
        if lp is None:
            return None
        p, q = lp
        pw, qw = w in term_vars(p), w in term_vars(q)
        if pw == qw or not (self._closed(p, w, env) and self._closed(q, w, env)):
            return None
        if pw and _is_poly(p, w):
            P, bound = self._poly(p, w, env), self.term(q, env)
            if not negated:     # P(w) <= bound
                return (lo, _last_le(P, bound, lo, hi))
            return (_first_ge(P, bound + 1, lo, hi), hi)   # P(w) > bound
        if qw and _is_poly(q, w):
            Q, bound = self._poly(q, w, env), self.term(p, env)
            if not negated:     # bound <= Q(w)
                return (_first_ge(Q, bound, lo, hi), hi)
            return (lo, _last_le(Q, bound - 1, lo, hi))    # Q(w) < bound
        return None

    def _idempotent(self, w: str, l: Term, r: Term):
        for a, b in ((l, r), (r, l)):
            if (isinstance(b, Var) and b.name == w and isinstance(a, App) and len(a.args) == 2
                    and all(isinstance(x, Var) and x.name == w for x in a.args)):
                if a.symbol == PLUS:
                    return {0}
                if a.symbol == TIMES:
                    return {0, 1}
        return None

    def _poly(self, p: Term, w: str, env):
        def P(val: int) -> int:
            saved = env.get(w)
            env[w] = val
            try:
                return self.term(p, env)
            finally:
                if saved is None:
                    env.pop(w, None)
                else:
                    env[w] = saved
        return P


def _first_ge(P, target: int, lo: int, hi: int) -> int:
    """Least ``w`` in ``[lo, hi]`` with ``P(w) >= target`` (``hi + 1`` if none); P nondecreasing."""
    if P(hi) < target:
        return hi + 1
    while lo < hi:
        mid = (lo + hi) // 2
        if P(mid) >= target:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _last_le(P, target: int, lo: int, hi: int) -> int:
    """Greatest ``w`` in ``[lo, hi]`` with ``P(w) <= target`` (``lo - 1`` if none)."""
    if P(lo) > target:
        return lo - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if P(mid) <= target:
            lo = mid
        else:
            hi = mid - 1
    return lo


def eval_bounded(M: StandardDoubledModel, f: Formula, env: Mapping[str, int] | None = None,
                 capacity: Optional[int] = None) -> bool:
    """Decide a bounded first-order formula over ``{+, *, +', *'}`` in ``M``.

    Quantifiers range over ``0..bound``; candidate ranges are narrowed by
    constraints that are monotone in the quantified variable, which is exact
    because the unprimed operations are the standard ones.
    """
    env = dict(env or {})
    _, fo, _ = free_symbols(f)
    missing = sorted(fo - set(env))
    if missing:
        raise ValueError(f"free variables without values: {missing}")
    return _Eval(M, M.bound if capacity is None else capacity).formula(f, env)


# ---------------------------------------------------------------------------
# Coding and the phi-graph check


def find_units(M: StandardDoubledModel, limit: int = 1000) -> tuple[int, int]:
    """The primed zero and one, located by search below ``limit``."""
    zero = next((z for z in range(limit) if M.plus_p(z, z) == z), None)
    one = next((o for o in range(limit)
                if M.times_p(o, o) == o and M.plus_p(o, o) != o), None)
    if zero is None or one is None:
        raise ValueError("primed identity elements not found below the search limit")
    return zero, one


def beta(c: int, d: int, i: int) -> int:
    return c % (1 + (i + 1) * d)


def pair(a: int, b: int) -> int:
    """``(a + b)^2 + a``; decodable because ``a <= a + b``."""
    return (a + b) ** 2 + a


def unpair(x: int) -> tuple[int, int]:
    s = math.isqrt(x)
    a = x - s * s
    return a, s - a


def encode_sequence(values: list[int]) -> tuple[int, int]:
    """Beta-function parameters ``(c, d)`` with ``beta(c, d, i) == values[i]``."""
    n = len(values)
    L = math.lcm(*range(1, n + 1)) if n else 1
    d = L * max(1, -(-max(values + [0]) // L))
    moduli = [1 + (i + 1) * d for i in range(n)]
    c, m = 0, 1
    for r, mod in zip(values, moduli):
        # solve c' = c (mod m), c' = r (mod mod)
        t = ((r - c) * pow(m, -1, mod)) % mod
        c, m = c + m * t, m * mod
    assert all(beta(c, d, i) == v for i, v in enumerate(values))
    return c, d


def encode_graph(values: list[int], one_p: int) -> int:
    """A code ``x`` with ``psi(x, len(values) - 1, values[-1])`` when ``values`` follows the recurrence."""
    c, d = encode_sequence(values)
    return pair(pair(c, d), one_p)


@dataclass
class PhiGraphReport:
    bound: int
    mapping: tuple[int, ...]
    total: bool
    unique: bool
    add_hom: bool
    mul_hom: bool
    identity: bool
    codes_scanned: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.total and self.unique and self.add_hom and self.mul_hom

    def to_text(self) -> str:
        lines = [f"bound {self.bound}", f"total {str(self.total).lower()}",
                 f"unique {str(self.unique).lower()}", f"add-hom {str(self.add_hom).lower()}",
                 f"mul-hom {str(self.mul_hom).lower()}", f"identity {str(self.identity).lower()}",
                 f"codes-scanned {self.codes_scanned}",
                 "map " + " ".join(f"{a}->{b}" for a, b in enumerate(self.mapping))]
        lines += [f"failure {msg}" for msg in self.failures]
        return "\n".join(lines) + "\n"


def verify_phi_graph(M: StandardDoubledModel, bound: int = 20, scan_codes: int = 256,
                     scan_args: int = 3) -> PhiGraphReport:
    """Check that ``phi`` defines a total, single-valued, +/*-preserving map on ``0..bound``.

    Totality is certified by explicit codes.  For uniqueness, each
    certifying code is shown to reject every other value up to
    ``max(image) + 1``, and all codes below ``scan_codes`` are scanned for
    arguments up to ``scan_args``; the unbounded ``?x`` cannot be searched
    exhaustively.
    """
    psi, _ = build_graph_formula()
    z, o = find_units(M)
    seq = [z]
    for _ in range(bound):
        seq.append(M.plus_p(seq[-1], o))
    failures: list[str] = []
    total = True
    codes = []
    for a in range(bound + 1):
        x = encode_graph(seq[:a + 1], o)
        codes.append(x)
        if not eval_bounded(M, psi, {"x": x, "u": a, "v": seq[a]}):
            total = False
            failures.append(f"no certified image for {a}")
    unique = True
    top = max(seq) + 1
    for a in range(bound + 1):
        for b in range(top + 1):
            if b != seq[a] and eval_bounded(M, psi, {"x": codes[a], "u": a, "v": b}):
                unique = False
                failures.append(f"code for {a} also certifies {b}")
    scanned = 0
    for x in range(scan_codes):
        for a in range(min(scan_args, bound) + 1):
            for b in range(top + 1):
                scanned += 1
                if eval_bounded(M, psi, {"x": x, "u": a, "v": b}) and b != seq[a]:
                    unique = False
                    failures.append(f"code {x} certifies {a} -> {b}")
    add_hom = mul_hom = True
    for a in range(bound + 1):
        for b in range(bound + 1):
            if a + b <= bound and M.plus_p(seq[a], seq[b]) != seq[a + b]:
                add_hom = False
                failures.append(f"f({a}) +' f({b}) != f({a + b})")
            if a * b <= bound and M.times_p(seq[a], seq[b]) != seq[a * b]:
                mul_hom = False
                failures.append(f"f({a}) *' f({b}) != f({a * b})")
    return PhiGraphReport(bound, tuple(seq), total, unique, add_hom, mul_hom,
                          seq == list(range(bound + 1)), scanned, failures)


# ---------------------------------------------------------------------------
# Prover exchange files (TPTP fof)

SZS_STATUSES = frozenset({
    "Theorem", "ContradictoryAxioms", "Satisfiable", "Unsatisfiable", "CounterSatisfiable",
    "CounterTheorem", "Timeout", "GaveUp", "Unknown", "ResourceOut", "Error", "Inappropriate",
})

_LOWER_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


def tptp_symbol(name: str) -> str:
    return name if _LOWER_RE.match(name) and not name.startswith("s_") else "s_" + name


def untptp_symbol(name: str) -> str:
    return name[2:] if name.startswith("s_") else name


def tptp_var(name: str) -> str:
    return "V_" + name


class ExportError(ValueError):
    pass


def _tptp_term(t: Term) -> str:
    if isinstance(t, Var):
        return tptp_var(t.name)
    if isinstance(t, FunVarApp):
        raise ExportError("second-order function variable in a first-order export")
    name = tptp_symbol(t.symbol)
    if not t.args:
        return name
    return f"{name}({','.join(_tptp_term(a) for a in t.args)})"


def tptp_formula(f: Formula) -> str:
    if isinstance(f, Top):
        return "$true"
    if isinstance(f, Bottom):
        return "$false"
    if isinstance(f, Equals):
        return f"({_tptp_term(f.left)} = {_tptp_term(f.right)})"
    if isinstance(f, Atom):
        name = tptp_symbol(f.symbol)
        return f"{name}({','.join(_tptp_term(a) for a in f.args)})"
    if isinstance(f, Not):
        return f"(~ {tptp_formula(f.body)})"
    if isinstance(f, (And, Or)):
        op = " & " if isinstance(f, And) else " | "
        return "(" + op.join(tptp_formula(g) for g in f.items) + ")"
    if isinstance(f, Implies):
        return f"({tptp_formula(f.left)} => {tptp_formula(f.right)})"
    if isinstance(f, Iff):
        return f"({tptp_formula(f.left)} <=> {tptp_formula(f.right)})"
    if isinstance(f, Quant):
        q = "!" if f.q == FORALL else "?"
        return f"({q} [{tptp_var(f.var)}] : {tptp_formula(f.body)})"
    raise ExportError(f"second-order construct {type(f).__name__} cannot be exported")


def export_prover_text(problem: TheoryInstanceSet | Iterable[Formula], conjecture: Optional[Formula],
                       name: str = "problem") -> str:
    """Problem file text: one ``fof`` entry per axiom, then the conjecture."""
    sentences = list(getattr(problem, "sentences", problem))
    pname = getattr(problem, "name", name)
    lines = [f"% problem {pname}"]
    for k, val in getattr(problem, "params", ()):
        lines.append(f"% param {k} {val}")
    width = max(4, len(str(len(sentences))))
    for i, s in enumerate(sentences, 1):
        lines.append(f"fof(ax_{i:0{width}d}, axiom, {tptp_formula(s)}).")
    if conjecture is not None:
        lines.append(f"fof(goal, conjecture, {tptp_formula(conjecture)}).")
    return "\n".join(lines) + "\n"


def export_prover(problem, conjecture: Optional[Formula], path) -> str:
    text = export_prover_text(problem, conjecture)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return text


_TPTP_TOKEN = re.compile(r"\s*(<=>|=>|\$true|\$false|[A-Za-z0-9_]+|[()\[\],:.!?~&|=])")


class _TptpParser:
    def __init__(self, text: str):
        self.toks = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TPTP_TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"bad prover syntax near {text[pos:pos + 20]!r}")
            self.toks.append(m.group(1))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, want=None):
        tok = self.peek()
        if tok is None or (want is not None and tok != want):
            raise ParseError(f"expected {want!r}, found {tok!r}")
        self.i += 1
        return tok

    def formula(self) -> Formula:
        left = self.unary()
        tok = self.peek()
        if tok in ("&", "|"):
            items = [left]
            while self.peek() == tok:
                self.take()
                items.append(self.unary())
            return And(tuple(items)) if tok == "&" else Or(tuple(items))
        if tok == "=>":
            self.take()
            return Implies(left, self.unary())
        if tok == "<=>":
            self.take()
            return Iff(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok in ("!", "?"):
            self.take()
            self.take("[")
            names = [self.take()]
            while self.peek() == ",":
                self.take()
                names.append(self.take())
            self.take("]")
            self.take(":")
            body = self.unary()
            for n in reversed(names):
                body = Quant(FORALL if tok == "!" else EXISTS, n[2:], body)
            return body
        if tok == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if tok == "$true":
            self.take()
            return Top()
        if tok == "$false":
            self.take()
            return Bottom()
        left = self.term()
        if self.peek() == "=":
            self.take()
            return Equals(left, self.term())
        if isinstance(left, App) and left.args:
            return Atom(left.symbol, left.args)
        raise ParseError(f"expected an atom at {tok!r}")

    def term(self) -> Term:
        name = self.take()
        if name.startswith("V_"):
            return Var(name[2:])
        args = []
        if self.peek() == "(":
            self.take()
            args.append(self.term())
            while self.peek() == ",":
                self.take()
                args.append(self.term())
            self.take(")")
        return App(untptp_symbol(name), tuple(args))


def parse_prover_text(text: str) -> tuple[list[tuple[str, str, Formula]], dict]:
    """Parse files written by :func:`export_prover_text` to ``(name, role, formula)`` entries."""
    entries = []
    meta = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("%"):
            parts = line[1:].split(None, 1)
            if parts:
                meta.setdefault(parts[0], []).append(parts[1] if len(parts) > 1 else "")
            continue
        m = re.match(r"fof\(\s*([A-Za-z0-9_]+)\s*,\s*([a-z_]+)\s*,(.*)\)\.\Z", line)
        if not m:
            raise ParseError(f"not a fof entry: {line[:60]!r}")
        p = _TptpParser(m.group(3))
        f = p.formula()
        if p.peek() is not None:
            raise ParseError(f"trailing input in entry {m.group(1)}")
        entries.append((m.group(1), m.group(2), f))
    return entries, meta


def ingest_results(text: str) -> dict[str, str]:
    """Read ``<problem-name> <szs-status>`` lines."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or parts[1] not in SZS_STATUSES:
            raise ValueError(f"line {lineno}: expected '<problem> <szs-status>', got {raw!r}")
        out[parts[0]] = parts[1]
    return out
