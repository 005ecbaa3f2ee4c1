"""Relativize a sentence, build the isomorphism sentence, and check both on small structures."""
import random

from catkit.categoricity import find_isomorphism, permute
from catkit.generators import random_structure
from catkit.semantics import embed, eval_full, merge_structures, relativized_substructure, rename_structure
from catkit.syntax import EXISTS, FunQuant, Vocabulary, parse_sentence, render_formula
from catkit.transforms import iso_sentence, priming, relativize

f, vocab = parse_sentence("!x ?y R(x, y) & !X1 (?x X1(x) -> ?x X1(x))")
g = relativize(f, "U")
print("sentence     ", render_formula(f))
print("relativized  ", render_formula(g))

rng = random.Random(3)
M = random_structure(rng, Vocabulary((("R", 2), ("U", 1))), 3)
print("on M        ", eval_full(M, g), "| on M restricted to U", eval_full(relativized_substructure(M, "U"), f))

# two copies of a digraph, the second under the primed vocabulary
L = Vocabulary((("R", 2),))
ren = priming(L)
iso = FunQuant(EXISTS, "F1f", 1, iso_sentence(L, ren))
A = random_structure(rng, L, 3)
for label, B in (("permuted copy", permute(A, (2, 0, 1))), ("random graph", random_structure(rng, L, 3))):
    both = merge_structures(embed(A, 3, "u0"), embed(rename_structure(B, ren.mapping), 3, "u1"))
    print(f"{label:14} iso sentence {eval_full(both, iso)}, search {find_isomorphism(A, B) is not None}")
