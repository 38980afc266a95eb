"""
Lateral Borel sums of the cubic ground-state series.

The coefficients of the cubic oscillator all share a sign, so the Borel
transform has a singularity on the positive axis. Summing just above it
gives a complex value. Its imaginary part is the tunneling width.
"""
import mpmath

from anharmonic.instanton import width_leading
from anharmonic.numerics import borel_pade, resonance
from anharmonic.rspt import rspt_coeffs

g = mpmath.mpf("0.004")
coeffs = rspt_coeffs(3, 0, 40).coeffs

for angle in (0.2, 0.5, mpmath.pi / 4):
    s = borel_pade(coeffs, 1, angle, g)
    print(f"ray {float(angle):.3f}: {mpmath.nstr(s.value, 15)}  (err {mpmath.nstr(s.error, 2)})")

print("leading width      :", mpmath.nstr(width_leading(3, 0, g), 15))
r = resonance(3, 0, g, thetas=(0.2, 0.3), dims=(120, 160))
print("complex scaling    :", mpmath.nstr(r.energy, 15))
