"""Sentences over at most {P:1, R:2, f:1, c:0} with their categoricity up to sizes 1, 2, 3."""

# (sentence, categorical up to 1, up to 2, up to 3)
LEMMA_CORPUS = (
    ("!x !y x = y", True, True, True),
    ("?x ?y ~(x = y) & !x !y !z (x = y | x = z | y = z)", True, True, True),
    ("!x x = x", True, False, False),
    ("?x ?y ~(x = y)", True, True, False),
    ("!x P(x)", True, False, False),
    ("?x P(x) & ?x ~P(x) & !x !y ((P(x) & P(y)) -> x = y) & !x !y ((~P(x) & ~P(y)) -> x = y)", True, True, True),
    ("?x P(x)", True, False, False),
    ("!x !y x = y & !x ~P(x)", True, True, True),
    ("!x x = c", True, True, True),
    ("?x ~(x = c) & !x !y (x = y | x = c | y = c)", True, True, True),
    ("!x f(x) = x & !x !y x = y", True, True, True),
    ("!x ~(f(x) = x) & !x f(f(x)) = x", True, True, True),
    ("!x f(x) = x", True, False, False),
    ("!x !y (f(x) = f(y) -> x = y) & !x ~(f(x) = x) & !x f(f(f(x))) = x", True, True, True),
    ("!x !y R(x, y)", True, False, False),
    ("!x !y (R(x, y) <-> ~(x = y)) & ?x ?y ~(x = y) & !x !y !z (x = y | x = z | y = z)", True, True, True),
    ("!x ~R(x, x) & !x !y (R(x, y) | R(y, x) | x = y) & !x !y (R(x, y) -> ~R(y, x)) & ?x ?y ~(x = y) & !x !y !z (x = y | x = z | y = z)", True, True, True),
    ("!x !y (R(x, y) -> x = y) & !x R(x, x)", True, False, False),
    ("!x f(x) = c & !x !y x = y", True, True, True),
    ("P(c) & !x (P(x) -> x = c) & !x P(f(x))", True, False, False),
    ("!X1 (X1(c) -> !x X1(x))", True, True, True),
    ("?X1 (?x X1(x) & ?x ~X1(x))", True, True, False),
    ("!x !y (f(x) = f(y) -> x = y) & !x ~(f(x) = c) & !X1 ((X1(c) & !x (X1(x) -> X1(f(x)))) -> !x X1(x))", True, True, True),
    ("!x !y (f(x) = f(y) -> x = y) & !X1 ((X1(c) & !x (X1(x) -> X1(f(x)))) -> !x X1(x))", True, False, False),
    ("!x (P(x) <-> R(x, x)) & !x !y (R(x, y) -> x = y) & ?x P(x) & ?x ~P(x)", True, True, False),
    ("!x R(x, f(x)) & !x !y (R(x, y) -> y = f(x)) & !x f(x) = c", True, False, False),
)
