import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import j0

from juliathermo.errors import EmptyBlockFamily, InsufficientData, ResolutionExceeded, ValidationError
from juliathermo.fourier import (
    annulus_grid,
    decay_fit,
    eta_sample,
    exp_sum_assembly,
    exp_sum_modulus,
    fourier_decay,
    fourier_transform,
    reduction_error_terms,
    zeta_set,
)
from juliathermo.measure import GibbsMeasure, build_measure
from juliathermo.thermo import ergodic_constants


@pytest.fixture(scope="module")
def circle_measure(circle, circle_maxent):
    return build_measure(circle, circle_maxent, depth=10, eigen=False)


def test_point_mass_transform():
    m = GibbsMeasure.from_points([0.25 + 0j])
    vals, err = fourier_transform(m, [1.0, 2.0, 1j])
    assert np.allclose(vals, [np.exp(-0.5j * np.pi), np.exp(-1j * np.pi), 1.0])
    assert np.all(err == 0)


@settings(max_examples=25, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10))
def test_conjugate_symmetry(x, y):
    m = GibbsMeasure.from_points([0.1 + 0.3j, -0.2 + 0.05j], [0.3, 0.7])
    a, _ = fourier_transform(m, [complex(x, y)])
    b, _ = fourier_transform(m, [complex(-x, -y)])
    assert a[0] == pytest.approx(np.conj(b[0]))
    assert abs(a[0]) <= 1 + 1e-12


def test_circle_matches_bessel(circle_measure):
    xi = np.linspace(0, 12, 25) * np.exp(0.3j)
    vals, _ = fourier_transform(circle_measure, xi)
    assert np.max(np.abs(vals - j0(2 * np.pi * np.abs(xi)))) < 1e-6


def test_montecarlo_within_error_bars(circle_measure):
    xi = np.array([0.5, 2.0, 3.5j, 5 + 5j])
    q, _ = fourier_transform(circle_measure, xi)
    mc, err = fourier_transform(circle_measure, xi, method="montecarlo", mc_count=20000, seed=3)
    assert np.all(np.abs(mc - q) <= err)


def test_threads_do_not_change_values(circle_measure):
    xi, _ = annulus_grid([4, 8], 8, 2)
    a, _ = fourier_transform(circle_measure, xi, chunk=5)
    b, _ = fourier_transform(circle_measure, xi, chunk=5, threads=3)
    assert np.array_equal(a, b)


def test_resolution_guard(circle_measure):
    with pytest.raises(ResolutionExceeded):
        fourier_transform(circle_measure, [1e4])


def test_unknown_method(circle_measure):
    with pytest.raises(ValidationError):
        fourier_transform(circle_measure, [1.0], method="fft")


def test_cantor_does_not_decay(cantor):
    from juliathermo.potentials import constant
    from juliathermo.thermo import normalize

    m = build_measure(cantor, normalize(cantor, constant(0.0), 8), depth=12, eigen=False)
    mods = np.abs(fourier_transform(m, 3.0 ** np.arange(5))[0])
    assert np.ptp(mods) < 1e-6 and mods[0] > 0.3


def test_annulus_grid_moduli():
    xi, T = annulus_grid([4, 16], directions=8, moduli=4)
    assert xi.size == 64
    r = np.abs(xi)
    assert np.all((r >= T * (1 - 1e-12)) & (r < 2 * T))


@pytest.mark.parametrize("eps", [0.2, 0.5, 1.0])
def test_decay_fit_recovers_power_law(eps):
    T_list = [4, 8, 16, 32, 64]
    xi, T = annulus_grid(T_list, 16, 2)
    vals = 3.0 * (1 + np.abs(xi)) ** (-eps / 2)
    # the sup on each annulus sits at its inner radius
    fit, resid, ann = decay_fit(xi, vals, T_list)
    assert fit == pytest.approx(eps, rel=1e-6) and resid < 1e-10
    assert [a["T"] for a in ann] == T_list


def test_decay_fit_data_checks():
    xi, _ = annulus_grid([4, 8, 16, 32], 4, 2)
    with pytest.raises(InsufficientData):
        decay_fit(xi, np.ones(xi.size), [4, 8, 16, 32])
    with pytest.raises(InsufficientData):
        decay_fit(xi, np.ones(xi.size), [4, 8, 16])


def test_fourier_decay_report(circle_measure):
    rep = fourier_decay(circle_measure, (2, 4, 8, 16), directions=8, moduli=4)
    # J0 decays like |xi|^(-1/2), so eps is close to 1
    assert rep.eps_fit == pytest.approx(1.0, abs=0.25)
    assert rep.to_csv().splitlines()[0] == "xi_re,xi_im,mu_re,mu_im,err"
    assert set(rep.to_dict()) == {"annuli", "eps_fit", "residual", "method"}


def test_zeta_values_are_unit_order(z5, z5_maxent):
    lam = ergodic_constants(z5, z5_maxent, 10).lam
    a = z5.tree.level(6).words[0]
    words, z = zeta_set(z5, 6, a, a, lam)
    assert words.shape == (2**5, 7)
    assert np.all(words[:, 0] == a[-1]) and np.all(words[:, -1] == a[0])
    assert 0.3 < np.abs(z).min() <= np.abs(z).max() < 3


def test_exp_sum_modulus_trivial_cases():
    z = [np.array([1.0, 1.0]), np.array([2.0])]
    assert exp_sum_modulus(z, [0.0], 1.0)[0] == pytest.approx(2.0)
    # half-integer phases cancel
    assert exp_sum_modulus([np.array([0.0, 0.5])], [1.0], 1.0)[0] == pytest.approx(0.0, abs=1e-12)


def test_exp_sum_assembly_below_trivial(z5, z5_maxent):
    ec = ergodic_constants(z5, z5_maxent, 10)
    n = 6
    lv = z5.tree.level(n)
    block = [lv.words[0], lv.words[5], lv.words[17]]
    eta = eta_sample(n, ec.lam / 2, 64, seed=1)
    out = exp_sum_assembly(z5, n, block, eta, ec.lam, ec.delta)
    assert np.all(out["moduli"] <= out["trivial"] * (1 + 1e-12))
    assert np.mean(out["moduli"] < 0.9 * out["trivial"]) >= 0.9
    with pytest.raises(ValidationError):
        exp_sum_assembly(z5, n, block[:1], eta, ec.lam, ec.delta)
    with pytest.raises(EmptyBlockFamily):
        exp_sum_assembly(z5, n, block, eta, ec.lam, ec.delta, mask=np.zeros(len(lv), bool))


def test_eta_sample_range():
    eta = eta_sample(10, 0.2, 500, seed=0)
    r = np.abs(eta)
    assert np.all((r >= np.exp(1.0) - 1e-9) & (r <= np.exp(4.0) + 1e-9))


def test_reduction_error_terms_decay():
    a = reduction_error_terms(2.0, 1.5, 0.1, 0.45, 10, 1e-3)
    b = reduction_error_terms(2.0, 1.5, 0.1, 0.45, 20, 1e-3)
    assert all(b[k] < a[k] for k in ("distortion", "frequency", "regularity"))
    assert a["irregular"] == pytest.approx(1e-6)
