"""Contraction of twisted transfer operators on z^2 + 5.

The twist multiplies each branch weight by exp(-i t tau + i l theta). Away
from (0, 0) the fitted rate drops below one, but for small t on the l = 0
row it stays close to one: tau is nearly constant on this Julia set, so the
leading eigenvalue behaves like exp(-t^2 P''/2) with a small P''.
"""

import numpy as np
from scipy.sparse.linalg import eigs

from juliathermo import circle_model, conformal_potential, max_entropy_potential, quadratic_full_shift, spectral_radius_profile
from juliathermo.potentials import tau
from juliathermo.spectral import dolgopyat_diagnostics
from juliathermo.thermo import pressure_gradient_check, transfer_matrix

model = quadratic_full_shift(5.0)
phi = conformal_potential(model)
rep = spectral_radius_profile(model, phi, np.arange(-50, 50.5, 0.5), np.arange(-10, 11))
print(f"fitted rho={rep.rho:.4f}  prefactor exponent={rep.prefactor_exponent:.4f}  worst cell {rep.max_cell}")

second = pressure_gradient_check(model, phi, tau(), (1e-3,))["second_derivative"]
print(f"P'' of tau along the conformal state: {second:.5f}")
for t in (1.5, 2.0, 4.0, 6.0):
    lead = np.abs(eigs(transfer_matrix(model, phi, 10, t, 0), k=1, return_eigenvectors=False))[0]
    print(f"t={t:4.1f} l=0  rho_hat={rep.rho_hat(t, 0):.5f}  |eigenvalue|={lead:.5f}  exp(-t^2 P''/2)={np.exp(-t * t * second / 2):.5f}")

circle = circle_model()
ctrl = spectral_radius_profile(circle, max_entropy_potential(circle), np.arange(-10, 10.5, 2.5), [0])
print("circle l=0 row:", [round(r[2], 12) for r in ctrl.rows])
print("diagnostics z^2+5:", dolgopyat_diagnostics(model, seed=0))
print("diagnostics circle:", dolgopyat_diagnostics(circle, seed=0))
