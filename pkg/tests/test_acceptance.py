"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v -s`` (or execute this file
directly) to see the summary lines.
"""

import sys
import time

import numpy as np
import pytest
from scipy.special import j0

from juliathermo.cli import main as cli_main
from juliathermo.fourier import fourier_decay, fourier_transform, zeta_set
from juliathermo.maps import julia_sample
from juliathermo.measure import build_measure, gibbs_bounded, gibbs_constant
from juliathermo.nonconc import nonconc_exponent
from juliathermo.potentials import constant, tau
from juliathermo.spectral import spectral_radius_profile
from juliathermo.thermo import (
    ergodic_constants,
    large_deviation_profile,
    normalize,
    pfr_eigendata,
    pressure,
    solve_bowen,
    transfer_one_defect,
)

RESULTS = {}


def report(capsys, k, ok, detail):
    RESULTS[k] = ok
    line = f"CRITERION {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    assert ok, line


def test_criterion_01_pressure_estimators(capsys, z5):
    start = time.perf_counter()
    phi = tau(-1.0)
    per = pressure(z5, phi, 12, "periodic")
    cyl = pressure(z5, phi, 12, "cylinder")
    c = 0.3
    shift_per = pressure(z5, phi + c, 12, "periodic") - per
    shift_cyl = pressure(z5, phi + c, 12, "cylinder") - cyl
    elapsed = time.perf_counter() - start
    ok = abs(per - cyl) < 0.02 and abs(shift_per - c) < 1e-9 and abs(shift_cyl - c) < 1e-9 and elapsed < 30
    report(capsys, 1, ok, f"periodic={per:.10f} cylinder={cyl:.10f} gap={abs(per - cyl):.2e} "
           f"shift errors=({abs(shift_per - c):.1e}, {abs(shift_cyl - c):.1e}) time={elapsed:.1f}s")


def test_criterion_02_bowen_root(capsys, circle, z5):
    d_circle = solve_bowen(circle, 12).delta
    d12 = solve_bowen(z5, 12).delta
    d14 = solve_bowen(z5, 14).delta
    rel = abs(d12 - d14) / d14
    ok = abs(d_circle - 1.0) <= 1e-3 and 0 < d12 < 1 and 0 < d14 < 1 and rel < 0.01
    report(capsys, 2, ok, f"circle delta={d_circle:.7f}; z^2+5 delta(12)={d12:.10f} delta(14)={d14:.10f} rel change={rel:.1e}")


def test_criterion_03_pfr_residuals(capsys, z5):
    psi = tau(-1.0)
    pd = pfr_eigendata(z5, psi, 10)
    phi = normalize(z5, psi, 10)
    one = transfer_one_defect(z5, phi, 10)
    samples = julia_sample(z5.map, 2000, seed=3)
    top = float(np.max(phi(z5, samples)))
    ok = pd.residual < 1e-6 and pd.duality_defect < 1e-8 and one < 1e-8 and top < 0
    report(capsys, 3, ok, f"residual={pd.residual:.1e} duality={pd.duality_defect:.1e} |L1-1|={one:.1e} max phi on samples={top:.4f}")


@pytest.mark.parametrize("which", ["conformal", "max_entropy"])
def test_criterion_04_gibbs_constant(capsys, z5, z5_conformal, z5_maxent, which):
    phi = z5_conformal if which == "conformal" else z5_maxent
    meas = build_measure(z5, phi, depth=16, eigen=False)
    C0 = gibbs_constant(meas, 8)
    C12 = gibbs_constant(meas, 12)
    ok = gibbs_bounded(meas, 12, C0)
    report(capsys, 4, ok, f"[{which}] C0 fitted at n=8: {C0:.6f}; worst ratio bound at n=12: {C12:.6f}")


@pytest.mark.parametrize("which", ["conformal", "max_entropy"])
def test_criterion_05_large_deviations(capsys, z5, z5_conformal, z5_maxent, which):
    phi = z5_conformal if which == "conformal" else z5_maxent
    lam = ergodic_constants(z5, phi, 10).lam
    eps = 0.1 * lam
    prof = large_deviation_profile(z5, phi, eps, range(6, 15))
    fit = prof.bad_fit
    decays = np.isfinite(fit["rate"]) and fit["rate"] < 0 and fit["r2"] > 0.9
    envelope = np.isfinite(prof.alpha_fit) and prof.alpha_fit <= prof.alpha_bound
    ok = bool(decays and envelope)
    report(capsys, 5, ok, f"[{which}] eps={eps:.4f} bad masses={np.array(prof.bad_mass)} rate={fit['rate']} R2={fit['r2']} "
           f"alpha_fit={prof.alpha_fit:.3g} (bound {prof.alpha_bound:.3g})")


def test_criterion_06_fourier_oracles(capsys, circle, circle_maxent, cantor):
    circ = build_measure(circle, circle_maxent, depth=12, eigen=False)
    r = np.linspace(0.0, 20.0, 81)
    xi = np.concatenate([r, r * np.exp(0.7j), 1j * r])
    vals, _ = fourier_transform(circ, xi)
    err_circle = float(np.max(np.abs(vals - j0(2 * np.pi * np.abs(xi)))))
    phi = normalize(cantor, constant(0.0), 10)
    cm = build_measure(cantor, phi, depth=14, eigen=False)
    mods = np.abs(fourier_transform(cm, 3.0 ** np.arange(6))[0])
    spread = float(np.ptp(mods))
    ok = err_circle < 1e-3 and spread < 1e-6
    report(capsys, 6, ok, f"circle max |mu_hat - J0| = {err_circle:.1e}; Cantor |mu_hat(3^k)| = {mods[0]:.10f}, spread {spread:.1e}")


@pytest.mark.parametrize("which", ["conformal", "max_entropy"])
def test_criterion_07_decay_fit(capsys, z5, z5_conformal, z5_maxent, which):
    start = time.perf_counter()
    phi = z5_conformal if which == "conformal" else z5_maxent
    meas = build_measure(z5, phi, depth=16, eigen=False)
    rep = fourier_decay(meas, (4, 8, 16, 32, 64))
    elapsed = time.perf_counter() - start
    ok = rep.eps_fit > 0 and rep.residual < 0.3 and elapsed < 300
    report(capsys, 7, ok, f"[{which}] eps_fit={rep.eps_fit:.4f} residual={rep.residual:.4f} time={elapsed:.1f}s")


def test_criterion_08_twisted_contraction(capsys, z5, z5_conformal, circle, circle_maxent):
    t_grid = np.arange(-50, 50.25, 0.5)
    rep = spectral_radius_profile(z5, z5_conformal, t_grid, np.arange(-10, 11), 10, (8, 14))
    far = [r for r in rep.rows if 1 < abs(r[0]) + abs(r[1]) <= 50]
    worst = max(far, key=lambda r: r[2])
    bad = [r for r in far if r[2] >= 0.98]
    ctrl = spectral_radius_profile(circle, circle_maxent, t_grid, [0], 10, (8, 14))
    ctrl_err = max(abs(r[2] - 1.0) for r in ctrl.rows)
    ok = not bad and ctrl_err <= 1e-6
    report(capsys, 8, ok, f"z^2+5 worst rho_hat={worst[2]:.4f} at (t={worst[0]}, l={worst[1]}); "
           f"{len(bad)}/{len(far)} cells >= 0.98 (t in {sorted({r[0] for r in bad})[:4]}..., l={sorted({r[1] for r in bad})}); "
           f"fitted rho={rep.rho:.4f}; circle l=0 max |rho_hat-1|={ctrl_err:.1e}")


def test_criterion_09_nonconcentration(capsys, z5, z5_maxent):
    n = 8
    lam = ergodic_constants(z5, z5_maxent, 10).lam
    a = z5.tree.level(n).words[0]
    _, values = zeta_set(z5, n, a, a, lam)
    sig = np.logspace(-1, -3, 9)
    rep = nonconc_exponent(values, sig, gamma_config=0.1)
    planted = np.exp(2j * np.pi * (np.arange(100_000) + 0.5) / 100_000)
    oracle = nonconc_exponent(planted, np.logspace(-2, -4, 9))
    ok = rep.passed and abs(oracle.gamma_fit - 0.5) <= 0.05
    report(capsys, 9, ok, f"{values.size} zeta values: violations={rep.violations} gamma_fit={rep.gamma_fit:.3f}; "
           f"planted circle gamma={oracle.gamma_fit:.4f}")


CONFIG = '{"map": {"quadratic": 5}, "potential": "conformal", "seed": 20261014}'


def test_criterion_10_determinism(capsys, tmp_path):
    cfg = tmp_path / "z5.json"
    cfg.write_text(CONFIG)
    runs = []
    for i, threads in enumerate((1, 3)):
        out = tmp_path / f"run{i}"
        code = cli_main(["all", "--config", str(cfg), "--out", str(out), "--threads", str(threads)])
        assert code == 0
        runs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    same = runs[0].keys() == runs[1].keys() and all(runs[0][k] == runs[1][k] for k in runs[0])
    differing = [k for k in runs[0] if runs[0][k] != runs[1].get(k)]
    report(capsys, 10, same, f"{len(runs[0])} artifacts compared byte for byte; differing: {differing or 'none'}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
