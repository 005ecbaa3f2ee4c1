"""Doubled arithmetic: the defined graph on the standard and the conjugated model."""
from catkit.arith import conjugated_doubled, standard_doubled, verify_phi_graph
from catkit.transforms import induction_pool, peano_doubled

theory = peano_doubled(induction_pool(1))
print(f"doubled theory with depth-1 induction pool: {len(theory)} sentences")

for name, M in (("standard", standard_doubled()), ("conjugated", conjugated_doubled())):
    rep = verify_phi_graph(M, 7)
    print(f"{name:10} total {rep.total} unique {rep.unique} identity {rep.identity} "
          f"map {' '.join(f'{a}->{b}' for a, b in enumerate(rep.mapping))}")
