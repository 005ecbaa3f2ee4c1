"""Model enumeration, isomorphism search, categoricity verdicts and the three-way CAT check."""
from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .semantics import (
    CapacityError, Evaluator, FiniteStructure, all_functions, all_relations, bare_structure,
    default_capacity, function_count, merge_structures, relation_count, rename_structure,
    structure_to_text, table_index, tuples,
)
from .syntax import EXISTS, And, Formula, FunQuant, Vocabulary, render_formula, vocabulary_of
from .transforms import (
    DEFAULT_ISO, DEFAULT_U, DEFAULT_U_PRIME, cat, cat_plus, iso_sentence, priming, relativize,
    res_sentence,
)

CATEGORICAL = "categorical"
NON_CATEGORICAL = "non-categorical"
VACUOUS = "vacuously-categorical"


class InvariantViolation(AssertionError):
    """An internal self-check failed (a certificate or witness did not verify)."""


# ---------------------------------------------------------------------------
# Enumeration


def structure_count(vocab: Vocabulary, n: int) -> int:
    total = 1
    for _, k in vocab.relations:
        total *= relation_count(n, k)
    for _, k in vocab.functions:
        total *= function_count(n, k)
    return total


def _options(vocab: Vocabulary, n: int, capacity: Optional[int]):
    cap = default_capacity() if capacity is None else capacity
    count = structure_count(vocab, n)
    if count > cap:
        raise CapacityError(f"{count} structures of size {n} exceed capacity {cap}")
    opts = [all_relations(n, k, cap) for _, k in vocab.relations]
    opts += [all_functions(n, k, cap) for _, k in vocab.functions]
    return opts


def _interpretations(vocab: Vocabulary, n: int, capacity: Optional[int] = None):
    """Environments (``"@name" -> interpretation``) for every structure, in lexicographic order."""
    keys = ["@" + name for name in vocab.names]
    for combo in itertools.product(*_options(vocab, n, capacity)):
        yield dict(zip(keys, combo))


def _from_env(vocab: Vocabulary, n: int, env: dict) -> FiniteStructure:
    return FiniteStructure(n, vocab, {name: env["@" + name] for name, _ in vocab.relations},
                           {name: env["@" + name] for name, _ in vocab.functions})


def enumerate_structures(vocab: Vocabulary, n: int, up_to_iso: bool = False,
                         capacity: Optional[int] = None) -> Iterator[FiniteStructure]:
    """Every interpretation of ``vocab`` on ``{0..n-1}`` once, in lexicographic order.

    With ``up_to_iso`` only the first member of each isomorphism class is yielded.
    """
    if n < 1:
        raise ValueError("domain size must be at least 1")
    seen: set = set()
    for env in _interpretations(vocab, n, capacity):
        M = _from_env(vocab, n, env)
        if up_to_iso:
            key = canonical_key(M)
            if key in seen:
                continue
            seen.add(key)
        yield M


def models_of(f: Formula, vocab: Vocabulary, n: int, capacity: Optional[int] = None,
              families=None) -> Iterator[FiniteStructure]:
    """Structures of size ``n`` satisfying ``f`` (compiled once, evaluated per interpretation)."""
    ev = Evaluator(f, n, families, capacity)
    for env in _interpretations(vocab, n, capacity):
        if ev.run(env):
            yield _from_env(vocab, n, env)


def count_models(f: Formula, vocab: Vocabulary, n: int, capacity: Optional[int] = None) -> int:
    return sum(1 for _ in models_of(f, vocab, n, capacity))


# ---------------------------------------------------------------------------
# Isomorphism


def permute(M: FiniteStructure, perm: tuple[int, ...]) -> FiniteStructure:
    """Image of ``M`` under the bijection ``i -> perm[i]``."""
    n = M.size
    rels = {name: frozenset(tuple(perm[a] for a in t) for t in s) for name, s in M.relations.items()}
    funs = {}
    inv = [0] * n
    for i, p in enumerate(perm):
        inv[p] = i
    for name, k in M.vocab.functions:
        table = M.functions[name]
        funs[name] = tuple(perm[table[table_index(tuple(inv[a] for a in args), n)]]
                           for args in tuples(n, k))
    return FiniteStructure(n, M.vocab, rels, funs)


def canonical_key(M: FiniteStructure) -> tuple:
    """Least key over all relabellings; equal exactly for isomorphic structures."""
    return min(permute(M, p).key() for p in itertools.permutations(range(M.size)))


@dataclass(frozen=True)
class IsomorphismCertificate:
    mapping: tuple[int, ...]
    checked: bool

    def inverse(self) -> "IsomorphismCertificate":
        inv = [0] * len(self.mapping)
        for i, p in enumerate(self.mapping):
            inv[p] = i
        return IsomorphismCertificate(tuple(inv), self.checked)

    def compose(self, other: "IsomorphismCertificate") -> "IsomorphismCertificate":
        """``other`` after ``self``."""
        return IsomorphismCertificate(tuple(other.mapping[a] for a in self.mapping),
                                      self.checked and other.checked)


def verify_isomorphism(A: FiniteStructure, B: FiniteStructure, mapping) -> bool:
    """Check ``mapping`` against the raw tables of ``A`` and ``B``."""
    n = A.size
    if B.size != n or A.vocab != B.vocab or sorted(mapping) != list(range(n)):
        return False
    for name, k in A.vocab.relations:
        if {tuple(mapping[a] for a in t) for t in A.relations[name]} != set(B.relations[name]):
            return False
    for name, k in A.vocab.functions:
        for args in tuples(n, k):
            if mapping[A.apply(name, *args)] != B.apply(name, *(mapping[a] for a in args)):
                return False
    return True


def _signature(M: FiniteStructure, a: int) -> tuple:
    sig = []
    for name, k in M.vocab.relations:
        s = M.relations[name]
        sig.append(tuple(sum(1 for t in s if t[i] == a) for i in range(k)))
        sig.append(sum(1 for t in s if all(x == a for x in t)))
    for name, k in M.vocab.functions:
        table = M.functions[name]
        sig.append(sum(1 for v in table if v == a))
        if k == 1:
            sig.append(table[a] == a)
    return tuple(sig)


def _isomorphisms(A: FiniteStructure, B: FiniteStructure) -> Iterator[tuple[int, ...]]:
    """All isomorphisms in lexicographic order (backtracking with signature pruning)."""
    n = A.size
    if B.size != n:
        return
    if A.vocab != B.vocab:
        raise ValueError("isomorphism search needs structures over the same vocabulary")
    sa = [_signature(A, a) for a in range(n)]
    sb = [_signature(B, b) for b in range(n)]
    if sorted(sa) != sorted(sb):
        return
    rel_items = [(name, A.relations[name], B.relations[name]) for name, _ in A.vocab.relations]
    fun_items = [(name, k) for name, k in A.vocab.functions]
    perm = [-1] * n
    used = [False] * n

    def consistent(a: int) -> bool:
        # every tuple whose entries are all assigned and that mentions ``a``
        for name, ra, rb in rel_items:
            for t in ra:
                if a in t and all(perm[x] >= 0 for x in t):
                    if tuple(perm[x] for x in t) not in rb:
                        return False
        for name, k in fun_items:
            for args in tuples(n, k) if k else [()]:
                if (a in args or not args or A.apply(name, *args) == a) \
                        and all(perm[x] >= 0 for x in args):
                    val = A.apply(name, *args)
                    if perm[val] >= 0 and perm[val] != B.apply(name, *(perm[x] for x in args)):
                        return False
        return True

    def extend(a: int):
        if a == n:
            m = tuple(perm)
            if verify_isomorphism(A, B, m):
                yield m
            return
        for b in range(n):
            if used[b] or sa[a] != sb[b]:
                continue
            perm[a], used[b] = b, True
            if consistent(a):
                yield from extend(a + 1)
            perm[a], used[b] = -1, False

    yield from extend(0)


def find_isomorphism(A: FiniteStructure, B: FiniteStructure) -> Optional[IsomorphismCertificate]:
    """The lexicographically least isomorphism ``A -> B``, or None."""
    if A.vocab != B.vocab:
        raise ValueError("isomorphism search needs structures over the same vocabulary")
    if A.size != B.size:
        return None
    for m in _isomorphisms(A, B):
        return IsomorphismCertificate(m, verify_isomorphism(A, B, m))
    return None


def count_isomorphisms(A: FiniteStructure, B: FiniteStructure) -> int:
    if A.size != B.size:
        return 0
    return sum(1 for _ in _isomorphisms(A, B))


# ---------------------------------------------------------------------------
# Categoricity up to a size bound


@dataclass
class CategoricityReport:
    sentence: Formula
    kappa: int
    verdict: str
    model_counts: dict[int, int]
    classes: dict[int, list[FiniteStructure]]
    reason: str = ""
    witness: tuple[FiniteStructure, ...] = ()
    certificates: int = 0
    structures_examined: int = 0
    seconds: float = 0.0

    @property
    def categorical(self) -> bool:
        """Categorical in the sense of "any two models are isomorphic" (vacuous included)."""
        return self.verdict != NON_CATEGORICAL

    def to_text(self) -> str:
        lines = [f"verdict {self.verdict}", f"kappa {self.kappa}"]
        if self.reason:
            lines.append(f"reason {self.reason}")
        for n in sorted(self.model_counts):
            lines.append(f"models {n} {self.model_counts[n]}")
            lines.append(f"classes {n} {len(self.classes.get(n, []))}")
        if self.verdict == CATEGORICAL:
            lines.append(f"certificates {self.certificates}")
        for i, M in enumerate(self.witness, 1):
            lines.append(f"witness {i}")
            lines.append(structure_to_text(M).rstrip("\n"))
            lines.append("end")
        return "\n".join(lines) + "\n"


def _census(args):
    f, vocab, n, capacity = args
    models = list(models_of(f, vocab, n, capacity))
    reps: dict = {}
    for M in models:
        reps.setdefault(canonical_key(M), M)
    return n, models, list(reps.values()), structure_count(vocab, n)


def categorical_up_to(f: Formula, kappa: int, vocab: Optional[Vocabulary] = None,
                      capacity: Optional[int] = None, jobs: int = 1) -> CategoricityReport:
    """Enumerate models of ``f`` of every size ``<= kappa`` up to isomorphism."""
    if kappa < 1:
        raise ValueError("kappa must be at least 1")
    start = time.perf_counter()
    vocab = vocab if vocab is not None else vocabulary_of(f)
    work = [(f, vocab, n, capacity) for n in range(1, kappa + 1)]
    for _, _, n, _ in work:
        if structure_count(vocab, n) > (default_capacity() if capacity is None else capacity):
            raise CapacityError(f"{structure_count(vocab, n)} structures of size {n} exceed capacity")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_census, work))
    else:
        results = [_census(w) for w in work]
    counts, classes, examined = {}, {}, 0
    all_models = {}
    for n, models, reps, total in results:
        counts[n] = len(models)
        classes[n] = reps
        all_models[n] = models
        examined += total
    nclasses = sum(len(r) for r in classes.values())
    witness: tuple = ()
    reason = ""
    certs = 0
    if nclasses == 0:
        verdict = VACUOUS
        reason = "no models"
    elif nclasses == 1:
        verdict = CATEGORICAL
        (rep,) = [r for reps in classes.values() for r in reps]
        for M in all_models[rep.size]:
            cert = find_isomorphism(rep, M)
            if cert is None or not cert.checked:
                raise InvariantViolation("model outside the single class")
            certs += 1
    else:
        verdict = NON_CATEGORICAL
        crowded = [n for n in sorted(classes) if len(classes[n]) >= 2]
        if crowded:
            reason = "same-size-non-isomorphic"
            witness = tuple(classes[crowded[0]][:2])
        else:
            reason = "multiple-sizes"
            sizes = [n for n in sorted(classes) if classes[n]]
            witness = (classes[sizes[0]][0], classes[sizes[1]][0])
        if find_isomorphism(*witness) is not None:
            raise InvariantViolation("non-categoricity witnesses are isomorphic")
    return CategoricityReport(f, kappa, verdict, counts, classes, reason, witness, certs,
                              examined, time.perf_counter() - start)


def cat_truth(f: Formula, kappa: int, mode: str = "guarded", capacity: Optional[int] = None) -> bool:
    """Truth of the empty-vocabulary sentence ``cat(f)`` in the ``kappa``-element set."""
    return Evaluator(cat(f, mode=mode), kappa, None, capacity)(bare_structure(kappa))


# ---------------------------------------------------------------------------
# Validity of cat_plus at a fixed size


@dataclass
class CatPlusResult:
    valid: bool
    counterexample: Optional[FiniteStructure]
    pairs_checked: int
    left_models: int


def _restriction_key(M: FiniteStructure, U: str) -> tuple:
    """What a guarded formula can see: ``U`` and every symbol restricted to it."""
    elems = sorted(t[0] for t in M.relations[U])
    inside = set(elems)
    parts = [tuple(elems)]
    for name, k in M.vocab.relations:
        if name != U:
            parts.append(tuple(sorted(t for t in M.relations[name] if set(t) <= inside)))
    for name, k in M.vocab.functions:
        parts.append(tuple(M.apply(name, *args) for args in itertools.product(elems, repeat=k)))
    return tuple(parts)


def cat_plus_valid(f: Formula, kappa: int, mode: str = "guarded", factored: bool = True,
                   capacity: Optional[int] = None) -> CatPlusResult:
    """Is ``cat_plus(f)`` true in every structure of size ``kappa`` over ``L + L' + {U, U'}``?

    The factored search lists the ``L + {U}`` structures satisfying the
    unprimed half of the antecedent, pairs them with primed copies, and
    evaluates the consequent on each merge; all other structures satisfy the
    implication vacuously.  In guarded mode pairs are deduplicated by their
    restrictions to ``U`` and ``U'``, which is all the guarded sentence reads.
    ``factored=False`` evaluates ``cat_plus`` on every structure directly.
    """
    L = vocabulary_of(f)
    ren = priming(L)
    U, U2, F = DEFAULT_U, DEFAULT_U_PRIME, DEFAULT_ISO
    full_vocab = Vocabulary(((U, 1),) + L.relations + ((U2, 1),) + ren.target.relations,
                            L.functions + ren.target.functions)
    if not factored:
        ev = Evaluator(cat_plus(f, ren, U, U2, F, mode), kappa, None, capacity)
        checked = 0
        for env in _interpretations(full_vocab, kappa, capacity):
            checked += 1
            if not ev.run(env):
                return CatPlusResult(False, _from_env(full_vocab, kappa, env), checked, -1)
        return CatPlusResult(True, None, checked, -1)
    LU = Vocabulary(((U, 1),) + L.relations, L.functions)
    half = And((res_sentence(L, U), relativize(f, U)))
    left = list(models_of(half, LU, kappa, capacity))
    if mode == "guarded":
        uniq = {}
        for M in left:
            uniq.setdefault(_restriction_key(M, U), M)
        left = list(uniq.values())
    mapping = dict(ren.mapping)
    mapping[U] = U2
    right = [rename_structure(M, mapping) for M in left]
    consequent = FunQuant(EXISTS, F, 1, iso_sentence(L, ren, F, U, U2, mode))
    ev = Evaluator(consequent, kappa, None, capacity)
    checked = 0
    for A in left:
        for B in right:
            checked += 1
            merged = merge_structures(A, B)
            if not ev(merged):
                return CatPlusResult(False, merged, checked, len(left))
    return CatPlusResult(True, None, checked, len(left))


@dataclass
class LemmaReport:
    sentence: Formula
    kappa: int
    c1: bool
    c2: bool
    c3: bool
    verdict: str
    counterexample: Optional[FiniteStructure] = None
    c3_pairs: int = 0

    @property
    def agree(self) -> bool:
        return self.c1 == self.c2 == self.c3

    def to_text(self) -> str:
        lines = [f"sentence {render_formula(self.sentence)}", f"kappa {self.kappa}",
                 f"categorical {str(self.c1).lower()} ({self.verdict})",
                 f"cat-truth {str(self.c2).lower()}", f"cat-plus-valid {str(self.c3).lower()}",
                 f"verdict {'agree' if self.agree else 'disagree'}"]
        if self.counterexample is not None:
            lines += ["counterexample", structure_to_text(self.counterexample).rstrip("\n"), "end"]
        return "\n".join(lines) + "\n"


def lemma_eq_check(f: Formula, kappa: int, mode: str = "guarded",
                   capacity: Optional[int] = None) -> LemmaReport:
    """Compare categoricity up to ``kappa``, truth of CAT at ``kappa`` and validity of CAT+ at ``kappa``."""
    rep = categorical_up_to(f, kappa, capacity=capacity)
    c2 = cat_truth(f, kappa, mode, capacity)
    c3 = cat_plus_valid(f, kappa, mode, capacity=capacity)
    return LemmaReport(f, kappa, rep.categorical, c2, c3.valid, rep.verdict, c3.counterexample,
                       c3.pairs_checked)


# ---------------------------------------------------------------------------
# Uniqueness of isomorphisms


@dataclass
class UniqueIsoReport:
    kappa: int
    pairs: list[tuple[int, int, int, int]] = field(default_factory=list)  # size, i, j, count

    @property
    def unique(self) -> bool:
        return bool(self.pairs) and all(c == 1 for *_, c in self.pairs)

    def to_text(self) -> str:
        lines = [f"kappa {self.kappa}", f"unique {str(self.unique).lower()}"]
        lines += [f"pair {n} {i} {j} isomorphisms {c}" for n, i, j, c in self.pairs]
        return "\n".join(lines) + "\n"


def unique_isomorphism(f: Formula, kappa: int, capacity: Optional[int] = None) -> UniqueIsoReport:
    """Count the isomorphisms between every ordered pair of models of ``f`` of size ``<= kappa``."""
    rep = categorical_up_to(f, kappa, capacity=capacity)
    if rep.verdict != CATEGORICAL:
        raise ValueError(f"sentence is not categorical up to {kappa} ({rep.verdict})")
    vocab = vocabulary_of(f)
    out = UniqueIsoReport(kappa)
    for n in sorted(rep.model_counts):
        models = list(models_of(f, vocab, n, capacity))
        for i, A in enumerate(models):
            for j, B in enumerate(models):
                out.pairs.append((n, i, j, count_isomorphisms(A, B)))
    return out
