"""Finite categoricity census and the matching internal check, for a few sentences."""
from catkit.categoricity import categorical_up_to, lemma_eq_check
from catkit.library import get
from catkit.syntax import parse_sentence

for text in ("!x !y x = y", "?x P(x)", "!x f(x) = c & !x !y (f(x) = f(y) -> x = y)"):
    f, vocab = parse_sentence(text)
    rep = categorical_up_to(f, 3, vocab)
    check = lemma_eq_check(f, 2)
    print(f"{text}\n  census up to 3: {rep.verdict}"
          f"{' (' + rep.reason + ')' if rep.reason else ''}; internal check at 2 agrees: {check.agree}")

# the second-order successor axioms have no finite models at all
n2 = get("N2")
print("N2 up to 4:", categorical_up_to(n2.sentence, 4, n2.vocab).verdict)
