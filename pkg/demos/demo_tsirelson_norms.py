"""Exact Tsirelson norms, step by step.

The norm on c00 is the fixed point of

    ||x|| = ||x||_inf  v  sup { c * sum ||A_i x|| : (A_i) admissible },

where a successive sequence of sets is admissible when its minima form a
member of the regular family.  Everything below is computed in exact
rational arithmetic; there are no tolerances anywhere.
"""

from fractions import Fraction

from bdspace import (TsirelsonSpec, build_dual_norming_set, norming_functional,
                     schreier, tsirelson_norm)
from bdspace.exact import FinVec

S1 = schreier(1)
spec = TsirelsonSpec(S1, Fraction(1, 2))

# The first Schreier family allows a set to be as large as its minimum, so
# e_1 + e_2 has no admissible split beating the sup norm, while e_3+e_4+e_5
# splits into three singletons with minima {3, 4, 5}.
for entries in ({1: 1}, {1: 1, 2: 1}, {3: 1, 4: 1, 5: 1}, {2: 1, 3: 1}):
    x = FinVec("nat", entries)
    print(f"||{dict(entries)}||  =  {tsirelson_norm(x, spec)}")

# A norming functional is an admissible tree: leaves are signed unit
# functionals, inner nodes scale the sum of successive children by c.
x = FinVec("nat", {3: 1, 4: Fraction(-1, 2), 5: 1, 7: Fraction(1, 4)})
value, tree, functional = norming_functional(x, spec)
print("\nvector       :", dict(x.items()))
print("norm         :", value)
print("optimal tree :", tree)
print("as functional:", dict(functional.items()))
print("pairs to     :", functional.pair(x))

# The trees with at least two children, collected level by level, form the
# natural dual norming set; member values never exceed the norm and the
# deepest level attains it for vectors inside the enumerated range.
dns = build_dual_norming_set(spec, depth=2, support_bound=5)
print(f"\ndual norming set on [1,5], depth 2: {len(dns.trees)} members")
best = max(dns.vec_of[t].pair(x.restrict(lambda i: i <= 5)) for t in dns.trees)
print("best member action on x|[1,5]:", best,
      "== norm of the restriction:",
      tsirelson_norm(x.restrict(lambda i: i <= 5), spec))
