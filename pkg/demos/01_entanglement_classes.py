"""Walk through the (p, q) triangle and look at entanglement classes and C_GM."""

import math

import numpy as np

from ghz_nonlocality import cgm_closed_form, cgm_x, classify, density_matrix, x_elements
from ghz_nonlocality.states import Q_MAX, Q_MIN, max_abs_p, spectrum

# The two pure GHZ states sit at the top corners of the triangle.
q_top = math.sqrt(3) / 4
for p in (-0.5, 0.5):
    print(f"p={p:+.2f} q={q_top:.4f}  class={classify(p, q_top)}  C_GM={cgm_closed_form(p, q_top):.3f}")

# Along the top edge p runs from the separable midpoint out to the GHZ corners.
print("\ntop edge, q = sqrt3/4")
for p in np.linspace(0, 0.5, 6):
    print(f"  p={p:.2f}  {classify(p, q_top)!s:12}  C_GM={cgm_closed_form(p, q_top):.3f}")

# C_GM by two routes: the X-state formula on the 8x8 matrix, and the closed form.
rho = density_matrix(0.3, 0.3)
elems = x_elements(rho)
print("\nx elements of rho(0.3, 0.3):", np.round(elems.a, 5), np.round(elems.z, 5))
print("C_GM from X elements:", cgm_x(elems))
print("C_GM closed form:    ", cgm_closed_form(0.3, 0.3))
print("spectrum:", np.round(np.sort(spectrum(0.3, 0.3)), 5))

# A coarse text map of the classes: S=separable, B=biseparable, W, G=GHZ.
print("\nclass map (q increases upwards)")
letters = {"Separable": "S", "Biseparable": "B", "W": "W", "GHZ": "G"}
for q in np.linspace(Q_MAX, Q_MIN, 18):
    row = ""
    for p in np.linspace(-0.5, 0.5, 41):
        row += letters[classify(p, q).value] if abs(p) <= max_abs_p(q) else " "
    print(f"{q:+.3f} |{row}|")
