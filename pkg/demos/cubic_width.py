"""
Why the corrections to the cubic width matter.

For the first excited level of H = p^2/2 + q^2/2 + sqrt(g) q^3 the leading
semiclassical width overshoots badly at g = 0.01. Its first correction
is large (-853/16). Complex scaling gives the exact answer to compare with.
"""
import mpmath

from anharmonic.instanton import width_leading
from anharmonic.numerics import resonance
from anharmonic.quantize import one_instanton_width_series

g = mpmath.mpf("0.01")

ws = one_instanton_width_series(3, 1, 1)
print("leading form :", ws.formula())
print("c1           :", ws.coeffs[1])

exact = resonance(3, 1, g, thetas=(0.2, 0.25, 0.3), dims=(120, 160))
lead = width_leading(3, 1, g)
first = ws.value(g)

print(f"complex scaling Im E : {mpmath.nstr(exact.im, 12)}  (+- {mpmath.nstr(exact.error, 2)})")
print(f"leading only         : {mpmath.nstr(lead, 12)}")
print(f"with c1              : {mpmath.nstr(first, 12)}")
print(f"with c1 and c2       : {mpmath.nstr(lead * (1 - 853 * g / 16 + 33349 * g**2 / 512), 12)}")
