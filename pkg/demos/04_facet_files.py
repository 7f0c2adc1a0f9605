"""Write an inequality to the facet text format, read it back and optimise it."""

import math
import tempfile
from pathlib import Path

from ghz_nonlocality import builtin, density_matrix, parse, render, seesaw
from ghz_nonlocality.bell import deterministic_values, parse_all

text = render(builtin("sliwa15"))
print(text)

# A file may hold several expressions separated by '---'.
extra = """# Mermin with one party's settings swapped
name mermin_swapped;
polytope L3;
bound 2;
+1 A0B0C0 +1 A1B1C0 +1 A1B0C1 -1 A0B1C1
"""
path = Path(tempfile.mkdtemp()) / "facets.txt"
path.write_text(text + "---\n" + extra)

rho = density_matrix(0.5, math.sqrt(3) / 4)
for expr in parse_all(path.read_text()):
    local = deterministic_values(expr).max()
    quantum = seesaw(rho, expr, starts=30).value
    print(f"{expr.name:16} deterministic max {local:g}  GHZ see-saw {quantum:.6f}")

assert parse(text) == builtin("sliwa15")
