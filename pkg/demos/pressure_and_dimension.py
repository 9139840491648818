"""Pressure, Bowen dimension and the conformal measure of z^2 + 5.

For |c| large the Julia set of z^2 + c is a Cantor set coded by the full
shift on two symbols. We build that coding from inverse branches, compare
two finite-depth pressure estimators and solve Bowen's equation.
"""

from juliathermo import (
    certify_hyperbolic,
    circle_model,
    conformal_potential,
    ergodic_constants,
    max_entropy_potential,
    pressure,
    quadratic_full_shift,
    solve_bowen,
)
from juliathermo.potentials import tau

model = quadratic_full_shift(5.0)
cert = certify_hyperbolic(model.map, seed=0)
print(f"certificate: c0={cert.c0:.4f} kappa={cert.kappa:.4f} kappa1={cert.kappa1:.4f}")

# P(-tau) from periodic points and from cylinder sums
for n in (6, 9, 12):
    per = pressure(model, tau(-1.0), n, "periodic")
    cyl = pressure(model, tau(-1.0), n, "cylinder")
    print(f"n={n:2d}  periodic {per:+.12f}  cylinder {cyl:+.12f}")

# Bowen's equation P(-s tau) = 0
for n in (8, 12, 14):
    print(f"delta_J at depth {n}: {solve_bowen(model, n).delta:.12f}")

# equilibrium states: dimension of a measure is entropy / Lyapunov exponent
for name, phi in [("max entropy", max_entropy_potential(model)), ("conformal", conformal_potential(model))]:
    ec = ergodic_constants(model, phi)
    print(f"{name:12s} lambda={ec.lam:.6f} entropy={ec.entropy:.6f} delta={ec.delta:.6f}")

# z^2 on the unit circle: every branch contracts by exactly 1/2
circle = circle_model()
print("circle delta:", solve_bowen(circle, 12).delta)
print("circle cylinders per level (4 * 2^k):", [len(circle.tree.level(k)) for k in range(5)])
