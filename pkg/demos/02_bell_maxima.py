"""Compare see-saw maxima of the four built-in inequalities with the closed forms."""

import math

from ghz_nonlocality import builtin, density_matrix, random_search_oracle, seesaw
from ghz_nonlocality.regions import l15_formula_applies, l15_max, mermin_max, ns99_max, svetlichny_max

closed = {"mermin": mermin_max, "sliwa15": l15_max, "svetlichny": svetlichny_max, "bancal99": ns99_max}

points = [(0.5, math.sqrt(3) / 4), (0.3, 0.3), (0.2, 0.40), (0.1, 0.1), (0.0, -1 / (4 * math.sqrt(3)))]
for p, q in points:
    rho = density_matrix(p, q)
    print(f"\nrho({p}, {q:.4f})")
    for name, f in closed.items():
        expr = builtin(name)
        res = seesaw(rho, expr, starts=50, seed=0)
        tag = "violated" if res.value > expr.bound + 1e-9 else "        "
        note = ""
        if name == "sliwa15" and not l15_formula_applies(p, q):
            note = "(closed form outside its checked domain)"
        print(f"  {name:10} see-saw {res.value:9.6f}  closed {f(p, q):9.6f}  bound {expr.bound:g} {tag} {note}")

# The random-search oracle is a cheap lower bound; it creeps towards the see-saw value.
rho = density_matrix(0.5, math.sqrt(3) / 4)
for samples in (10, 1000, 100_000):
    print(f"oracle with {samples:>6} samples: {random_search_oracle(rho, builtin('mermin'), samples, seed=1):.4f}")

# Below q = 0 the Bancal-99 maximum follows |4q/sqrt3| + 2 sqrt(16q^2/3 + 4p^2).
p, q = 0.0, -0.1
res = seesaw(density_matrix(p, q), builtin("bancal99"))
print(f"\nbancal99 at ({p}, {q}): see-saw {res.value:.6f}, closed form {ns99_max(p, q):.6f}, "
      f"with |q| {abs(4 * q / math.sqrt(3)) + 2 * math.sqrt(16 * q * q / 3 + 4 * p * p):.6f}")
