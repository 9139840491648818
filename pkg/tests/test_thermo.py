import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from juliathermo.errors import BadBracket, ValidationError
from juliathermo.models import quadratic_full_shift
from juliathermo.potentials import constant, indicator, tau
from juliathermo.thermo import (
    aggregate,
    cylinder_log_sum,
    ergodic_constants,
    large_deviation_profile,
    leaf_masses,
    normalize,
    periodic_orbits,
    pfr_eigendata,
    pressure,
    pressure_gradient_check,
    regular_words,
    solve_bowen,
    transfer_apply,
    transfer_matrix,
    transfer_one_defect,
)

MODEL = quadratic_full_shift(5.0)
LOG2 = np.log(2.0)


@pytest.mark.parametrize("method", ["periodic", "cylinder"])
def test_zero_potential_has_entropy_pressure(method):
    assert pressure(MODEL, constant(0.0), 10, method) == pytest.approx(LOG2, abs=1e-12)


def test_literal_cylinder_sum_has_boundary_term():
    # (1/n) log Z_n overshoots by log 2 / n for the zero potential
    n = 10
    assert cylinder_log_sum(MODEL, constant(0.0), n) / n == pytest.approx(LOG2 + LOG2 / n)


@settings(max_examples=15, deadline=None)
@given(st.floats(-3, 3, allow_nan=False))
def test_constant_shift_is_exact(c):
    base = tau(-1.0)
    for method in ("periodic", "cylinder"):
        p0 = pressure(MODEL, base, 8, method)
        assert pressure(MODEL, base + c, 8, method) - p0 == pytest.approx(c, abs=1e-10)


def test_unknown_method():
    with pytest.raises(ValidationError):
        pressure(MODEL, tau(), 6, "magic")


def test_periodic_points_are_fixed_by_iterate():
    n = 5
    words, orbit = periodic_orbits(MODEL, n)
    assert words.shape == (2**n, n)
    z = orbit[0]
    f = MODEL.map
    for _ in range(n):
        z = f(z)
    assert np.allclose(z, orbit[0], atol=1e-10)
    assert np.allclose(f(orbit[0]), orbit[1])


def test_transfer_matrix_sums_weights():
    L = transfer_matrix(MODEL, constant(0.0), 6)
    assert L.shape == (2**7, 2**7)
    assert np.allclose(transfer_apply(MODEL, constant(0.0), np.ones(2**7), 6), 2.0)


@pytest.mark.parametrize("psi", [tau(-1.0), constant(0.0), tau(-0.5) + indicator(0, 0.3)], ids=["-tau", "zero", "mixed"])
def test_eigendata_residuals(psi):
    pd = pfr_eigendata(MODEL, psi, 8)
    assert pd.residual < 1e-10 and pd.duality_defect < 1e-10
    assert np.all(pd.h > 0) and np.all(pd.nu > 0)
    assert pd.nu.sum() == pytest.approx(1) and pd.mu.sum() == pytest.approx(1)
    assert pd.P == pytest.approx(pressure(MODEL, psi, 12, "periodic"), abs=1e-6)


def test_normalize_properties():
    phi = normalize(MODEL, tau(-1.0), 8)
    assert phi.normalized and phi.label == "normalize(-1.0*tau)"
    assert transfer_one_defect(MODEL, phi, 8) < 1e-12
    assert np.all(phi.on_level(MODEL, 8) < 0)
    # normalizing again changes nothing
    phi2 = normalize(MODEL, phi, 8)
    assert abs(phi2.info["P"]) < 1e-12
    assert np.allclose(phi2.on_level(MODEL, 10), phi.on_level(MODEL, 10), atol=1e-12)


def test_bowen_root_methods_agree():
    a = solve_bowen(MODEL, 10, method="cylinder")
    b = solve_bowen(MODEL, 10, method="periodic")
    assert 0 < a.delta < 1
    assert a.delta == pytest.approx(b.delta, abs=1e-4)
    assert abs(pressure(MODEL, tau(-a.delta), 10, "cylinder")) < 1e-10


def test_bowen_circle(circle):
    assert solve_bowen(circle, 10).delta == pytest.approx(1.0, abs=1e-9)


def test_bowen_bad_bracket():
    with pytest.raises(BadBracket):
        solve_bowen(MODEL, 8, bracket=(0.6, 2.0))


def test_ergodic_constants(z5_maxent, z5_conformal, circle_maxent, circle):
    me = ergodic_constants(MODEL, z5_maxent, 10)
    assert me.entropy == pytest.approx(LOG2, abs=1e-10)
    conf = ergodic_constants(MODEL, z5_conformal, 10)
    assert conf.delta == pytest.approx(solve_bowen(MODEL, 12).delta, abs=1e-8)
    # maximal entropy beats the conformal measure on entropy
    assert me.entropy > conf.entropy
    c = ergodic_constants(circle, circle_maxent, 10)
    assert c.lam == pytest.approx(LOG2) and c.delta == pytest.approx(1.0)


def test_pressure_derivative_defect_is_second_order(z5_maxent):
    out = pressure_gradient_check(MODEL, z5_maxent, tau(), (1e-2, 1e-3), depth=8)
    d1, d2 = out["defects"]
    assert abs(d2) < abs(d1) / 5
    # the defect behaves like t P''/2
    assert out["slope"] == pytest.approx(out["second_derivative"] / 2, rel=0.05)
    assert out["second_derivative"] > 0


def test_leaf_masses_and_aggregation(z5_maxent):
    leaf = leaf_masses(MODEL, z5_maxent, 10)
    assert leaf.sum() == pytest.approx(1)
    for k in (0, 4, 9):
        agg = aggregate(MODEL, leaf, 10, k)
        assert agg.size == 2 ** (k + 1) and agg.sum() == pytest.approx(1)
    # consecutive levels are consistent through prefixes
    up, lo = aggregate(MODEL, leaf, 10, 6), aggregate(MODEL, leaf, 10, 5)
    assert np.allclose(np.bincount(MODEL.tree.level(6).prefix, weights=up), lo)


def test_regular_words_widen_with_eps(z5_maxent):
    ec = ergodic_constants(MODEL, z5_maxent, 10)
    narrow = regular_words(MODEL, z5_maxent, 8, 0.005, ec.lam, ec.delta).sum()
    wide = regular_words(MODEL, z5_maxent, 8, 0.5, ec.lam, ec.delta).sum()
    assert narrow < wide == 2**9


def test_large_deviation_profile_shape(z5_maxent):
    ec = ergodic_constants(MODEL, z5_maxent, 10)
    prof = large_deviation_profile(MODEL, z5_maxent, 0.01 * ec.lam, range(6, 11), psi=tau())
    assert prof.n == [6, 7, 8, 9, 10]
    assert all(0 <= m <= 1 for m in prof.bad_mass)
    assert len(prof.psi_bad_mass) == 5
    assert prof.alpha_fit <= prof.alpha_bound
    assert set(prof.to_dict()) >= {"bad_fit", "count_ratio", "alpha_fit"}
