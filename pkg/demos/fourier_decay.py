"""Fourier decay of equilibrium measures on the Julia set of z^2 + 5.

Two controls bracket the experiment: Lebesgue measure on the circle, whose
transform is J0(2 pi |xi|), and the middle-thirds Cantor measure, whose
transform does not decay along powers of three.
"""

import numpy as np
from scipy.special import j0

from juliathermo import (
    build_measure,
    circle_model,
    conformal_potential,
    fourier_decay,
    fourier_transform,
    max_entropy_potential,
    middle_thirds_cantor,
    normalize,
    quadratic_full_shift,
)
from juliathermo.potentials import constant

circle = circle_model()
leb = build_measure(circle, max_entropy_potential(circle), depth=12, eigen=False)
xi = np.linspace(0, 20, 9)
vals, _ = fourier_transform(leb, xi)
print("circle |mu_hat - J0|:", np.abs(vals - j0(2 * np.pi * xi)).max())

cantor = middle_thirds_cantor()
cm = build_measure(cantor, normalize(cantor, constant(0.0)), depth=14, eigen=False)
print("Cantor |mu_hat(3^k)|:", np.abs(fourier_transform(cm, 3.0 ** np.arange(6))[0]))

model = quadratic_full_shift(5.0)
for name, phi in [("max entropy", max_entropy_potential(model)), ("conformal", conformal_potential(model))]:
    meas = build_measure(model, phi, depth=16, eigen=False)
    rep = fourier_decay(meas, (4, 8, 16, 32, 64))
    sups = ", ".join(f"T={a['T']:.0f}: {a['sup']:.4f}" for a in rep.annuli)
    print(f"{name:12s} eps_fit={rep.eps_fit:.4f} residual={rep.residual:.4f}  [{sups}]")
