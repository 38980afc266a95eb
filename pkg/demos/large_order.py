"""
Large-order growth of perturbative coefficients against the instanton
prediction, for the quartic, sextic and septic ground states.

The fitted a in ratio - 1 ~ a/K + b/K^2 should match c1 * A / rho, where
c1 is the first width correction. The sextic has c1 = 0 and the fit agrees.
"""
from anharmonic.largeorder import lo7_constant, predictor, ratio_diagnostics
from anharmonic.rspt import rspt_coeffs

for m, kmax in ((4, 60), (6, 40), (7, 40)):
    table = rspt_coeffs(m, 0, kmax)
    fit = ratio_diagnostics(table, predictor(m, 0))
    derived = predictor(m, 0, 1 if m != 6 else 2).inverse_k_coefficient()
    print(f"m={m}: top-decade |ratio-1| = {fit.top_decade_deviation():.4f}")
    print(f"      fitted a = {fit.a:+.5f} +- {fit.a_err:.1e}   from width series: {float(derived):+.5f}")

print(f"printed degree-7 constant: {float(lo7_constant()):+.5f}")
