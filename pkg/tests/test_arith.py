import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from catkit.arith import (
    BoundednessError, ExportError, beta, conjugated_doubled, encode_graph, encode_sequence,
    eval_bounded, export_prover, export_prover_text, find_units, ingest_results, is_bounded, pair,
    parse_prover_text, standard_doubled, swap_pairs, tptp_symbol, unpair, verify_phi_graph,
)
from catkit.syntax import (
    EXISTS, FORALL, And, App, Equals, Iff, Implies, Not, Or, Quant, Var, parse_formula, parse_sentence,
)
from catkit.transforms import (
    DOUBLED_VOCAB, PLUS, PLUS_P, TIMES, TIMES_P, build_graph_formula, induction_pool, peano_doubled,
)

OPS = (PLUS, TIMES, PLUS_P, TIMES_P)


# ---------------------------------------------------------------------------
# A naive oracle for bounded formulas: no narrowing, "<=" read off term values


def le(a, b, k):
    return Quant(EXISTS, k, Equals(App(PLUS, (a, Var(k))), b))


def term_value(M, t, env):
    if isinstance(t, Var):
        return env[t.name]
    return M.op(t.symbol)(*(term_value(M, a, env) for a in t.args))


def naive(M, f, env):
    if isinstance(f, Equals):
        return term_value(M, f.left, env) == term_value(M, f.right, env)
    if isinstance(f, Not):
        return not naive(M, f.body, env)
    if isinstance(f, And):
        return all(naive(M, g, env) for g in f.items)
    if isinstance(f, Or):
        return any(naive(M, g, env) for g in f.items)
    if isinstance(f, Implies):
        return (not naive(M, f.left, env)) or naive(M, f.right, env)
    if isinstance(f, Iff):
        return naive(M, f.left, env) == naive(M, f.right, env)
    assert isinstance(f, Quant)
    body = f.body
    if isinstance(body, Equals) and isinstance(body.left, App) and body.left.args[1] == Var(f.var):
        # a "<=" atom
        return term_value(M, body.left.args[0], env) <= term_value(M, body.right, env)
    guard = body.items[0] if f.q == EXISTS else body.left
    if isinstance(guard, And):
        guard = guard.items[0]
    top = term_value(M, guard.body.right, env)
    vals = (naive(M, body, {**env, f.var: w}) for w in range(top + 1))
    return any(vals) if f.q == EXISTS else all(vals)


class BoundedGen:
    def __init__(self, rng):
        self.rng = rng
        self.n = 0

    def term(self, vs, depth):
        rng = self.rng
        if depth == 0 or rng.random() < 0.5:
            return Var(rng.choice(vs))
        return App(rng.choice(OPS), (self.term(vs, depth - 1), self.term(vs, depth - 1)))

    def fresh(self, p):
        self.n += 1
        return f"{p}{self.n}"

    def formula(self, vs, depth, qdepth):
        rng = self.rng
        r = rng.random()
        if depth == 0 or r < 0.25:
            a, b = self.term(vs, 2), self.term(vs, 2)
            return le(a, b, self.fresh("k")) if rng.random() < 0.3 else Equals(a, b)
        if r < 0.55 or qdepth == 0:
            kind = rng.choice((And, Or, Implies, Iff, Not))
            if kind is Not:
                return Not(self.formula(vs, depth - 1, qdepth))
            a, b = self.formula(vs, depth - 1, qdepth), self.formula(vs, depth - 1, qdepth)
            return kind((a, b)) if kind in (And, Or) else kind(a, b)
        w = self.fresh("w")
        bound = self.term(vs, 1)
        guard = le(Var(w), bound, self.fresh("k"))
        extra = []
        choice = rng.random()
        if choice < 0.2:
            extra.append(Equals(App(rng.choice((PLUS, TIMES)), (Var(w), Var(w))), Var(w)))
        elif choice < 0.4:
            extra.append(le(App(TIMES, (Var(w), Var(w))), self.term(vs, 1), self.fresh("k")))
        elif choice < 0.55:
            extra.append(Equals(App(PLUS, (Var(w), Var(rng.choice(vs)))), self.term(vs, 1)))
        body = self.formula(vs + [w], depth - 1, qdepth - 1)
        if rng.random() < 0.5:
            return Quant(EXISTS, w, And(tuple([guard] + extra + [body])))
        ante = And(tuple([guard] + extra)) if extra else guard
        return Quant(FORALL, w, Implies(ante, body))


def test_bounded_evaluator_matches_naive_oracle():
    rng = random.Random(20240601)
    models = [standard_doubled(), conjugated_doubled()]
    checked = 0
    for i in range(1000):
        gen = BoundedGen(rng)
        f = gen.formula(["p", "q"], 4, 2)
        env = {"p": rng.randrange(6), "q": rng.randrange(6)}
        assert is_bounded(f)
        M = models[i % 2]
        assert eval_bounded(M, f, env) == naive(M, f, env), f
        checked += 1
    assert checked == 1000


def test_boundedness_classification():
    psi, phi = build_graph_formula()
    assert is_bounded(psi)
    assert not is_bounded(phi)
    with pytest.raises(BoundednessError):
        eval_bounded(standard_doubled(), phi, {"u": 0, "v": 0})
    with pytest.raises(ValueError):
        eval_bounded(standard_doubled(), psi, {"u": 0})


def test_units():
    assert find_units(standard_doubled()) == (0, 1)
    assert find_units(conjugated_doubled()) == (0, 1)
    M = conjugated_doubled()
    assert M.plus_p(2, 2) == swap_pairs(swap_pairs(2) + swap_pairs(2))


@given(st.integers(min_value=0, max_value=10 ** 9), st.integers(min_value=0, max_value=10 ** 9))
def test_pairing_round_trip(a, b):
    assert unpair(pair(a, b)) == (a, b)


@given(st.lists(st.integers(min_value=0, max_value=500), min_size=1, max_size=8))
def test_beta_coding(values):
    c, d = encode_sequence(values)
    assert [beta(c, d, i) for i in range(len(values))] == values


def test_psi_holds_on_codes():
    psi, _ = build_graph_formula()
    M = standard_doubled()
    values = [0, 1, 2, 3]
    x = encode_graph(values, 1)
    assert eval_bounded(M, psi, {"x": x, "u": 3, "v": 3})
    assert not eval_bounded(M, psi, {"x": x, "u": 3, "v": 2})


def test_phi_graph_small_bounds():
    rep = verify_phi_graph(standard_doubled(), 6)
    assert rep.ok and rep.identity
    assert rep.mapping == tuple(range(7))
    conj = verify_phi_graph(conjugated_doubled(), 5)
    assert conj.ok and not conj.identity
    assert conj.mapping == tuple(swap_pairs(k) for k in range(6))
    assert conj.to_text().splitlines()[-1] == "map 0->0 1->1 2->3 3->2 4->5 5->4"


def test_tptp_export_round_trip(tmp_path):
    ts = peano_doubled(induction_pool(1))
    conj = parse_formula("!x add(x, x) = add_p(x, x)", DOUBLED_VOCAB)
    text = export_prover(ts, conj, tmp_path / "p.p")
    assert (tmp_path / "p.p").read_text() == text
    entries, meta = parse_prover_text(text)
    assert [e[2] for e in entries if e[1] == "axiom"] == list(ts.sentences)
    assert entries[-1] == ("goal", "conjecture", conj)
    assert meta["problem"] == ["peano-doubled"]


def test_tptp_symbols_and_errors():
    assert tptp_symbol("add") == "add"
    assert tptp_symbol("0") == "s_0"
    f, _ = parse_sentence("!X1 !x X1(x)")
    with pytest.raises(ExportError):
        export_prover_text([f], None)


def test_ingest_results():
    assert ingest_results("pa Theorem\nzfc GaveUp  # timeout\n") == {"pa": "Theorem", "zfc": "GaveUp"}
    with pytest.raises(ValueError):
        ingest_results("pa Proved\n")
