"""Rescaled branch derivatives, their non-concentration and the
exponential sums built from them."""

import numpy as np

from juliathermo import ergodic_constants, max_entropy_potential, nonconc_exponent, quadratic_full_shift, zeta_set
from juliathermo.fourier import eta_sample, exp_sum_assembly

model = quadratic_full_shift(5.0)
phi = max_entropy_potential(model)
ec = ergodic_constants(model, phi)

n = 8
a = model.tree.level(n).words[0]
_, zeta = zeta_set(model, n, a, a, ec.lam)
print(f"{zeta.size} zeta values, |zeta| in [{np.abs(zeta).min():.3f}, {np.abs(zeta).max():.3f}]")
rep = nonconc_exponent(zeta, np.logspace(-1, -3, 9), gamma_config=0.1)
print(f"strip supremum counts {rep.sup_count.tolist()}  gamma_fit={rep.gamma_fit:.3f} passed={rep.passed}")

planted = np.exp(2j * np.pi * (np.arange(100_000) + 0.5) / 100_000)
print("points on a circle give gamma", round(nonconc_exponent(planted, np.logspace(-2, -4, 9)).gamma_fit, 4))

n = 6
lv = model.tree.level(n)
block = [lv.words[0], lv.words[9], lv.words[40]]
eta = eta_sample(n, ec.lam / 2, 256, seed=0)
out = exp_sum_assembly(model, n, block, eta, ec.lam, ec.delta)
ratio = out["moduli"] / out["trivial"]
print(f"exponential sums: median ratio to the trivial bound {np.median(ratio):.3f}, max {ratio.max():.3f}")
