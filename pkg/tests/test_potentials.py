import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from juliathermo.errors import ValidationError
from juliathermo.models import quadratic_full_shift
from juliathermo.potentials import Tabulated, TabAtom, Potential, constant, indicator, parse_potential, tau, theta
from juliathermo.thermo import birkhoff_sum, conformal_potential, max_entropy_potential

MODEL = quadratic_full_shift(5.0)
coef = st.floats(-5, 5, allow_nan=False).map(lambda x: round(x, 6))


@pytest.mark.parametrize(
    "text, label",
    [("-1.0*tau", "-1.0*tau"), ("const:-0.6931", "const:-0.6931"), ("sym:0", "sym:0"), ("tau + 2*theta - 0.5", "tau + 2*theta - 0.5")],
)
def test_parse_labels(text, label):
    assert parse_potential(text).label == label


@pytest.mark.parametrize("text", ["", "tau +", "2*", "foo", "sym:-1", "normalize(tau", "tau tau"])
def test_parse_errors(text):
    with pytest.raises(ValidationError) as info:
        parse_potential(text, MODEL)
    assert info.value.field == "potential"


@pytest.mark.parametrize("name", ["conformal", "max_entropy"])
def test_named_equilibrium_potentials(name):
    phi = parse_potential(name, MODEL, 8)
    assert phi.normalized
    ref = conformal_potential(MODEL, 8) if name == "conformal" else max_entropy_potential(MODEL, 8)
    assert np.allclose(phi.on_level(MODEL, 8), ref.on_level(MODEL, 8))


def test_normalize_needs_model():
    with pytest.raises(ValidationError):
        parse_potential("normalize(tau)")


@settings(max_examples=30, deadline=None)
@given(coef, coef, coef)
def test_parsed_combination_evaluates_linearly(a, b, c):
    phi = parse_potential(f"{a}*tau + {b}*theta + const:{c}")
    pts = MODEL.tree.level(4).points
    itin = MODEL.tree.itineraries(4, 1)
    d = 2 * pts
    expected = a * np.log(np.abs(d)) + b * np.angle(d) + c
    assert np.allclose(phi.evaluate(MODEL, pts, itin), expected)


def test_algebra_merges_terms():
    phi = tau(2.0) + tau(-0.5) + 1.0 - constant(0.25)
    assert len(phi.terms) == 2
    assert dict((a.name, c) for c, a in phi.terms) == {"tau": 1.5, "const": 0.75}
    assert (3 * tau()).terms[0][0] == 3.0
    assert (1 - tau()).label == "-1.0*tau + const:1.0"


def test_indicator_counts_visits():
    s = indicator(0).birkhoff_level(MODEL, 6)
    words = MODEL.tree.level(6).words
    assert np.array_equal(s, (words[:, :6] == 0).sum(axis=1))


@pytest.mark.parametrize("text", ["-1.0*tau", "0.3*theta + sym:1", "const:2 - tau"])
def test_birkhoff_level_matches_orbit_sum(text):
    phi = parse_potential(text)
    k = 5
    lv = MODEL.tree.level(k)
    fast = phi.birkhoff_level(MODEL, k)
    for i in (0, 7, 33, len(lv) - 1):
        assert fast[i] == pytest.approx(birkhoff_sum(MODEL, phi, lv.words[i]), abs=1e-9)


def test_theta_sum_is_unwrapped():
    s = theta().birkhoff_level(MODEL, 8)
    # unwrapped sums can leave (-pi, pi]
    assert np.ptp(s) > 2 * np.pi or np.max(np.abs(s)) > np.pi


def test_tabulated_composition_with_map():
    depth = 3
    vals = np.arange(MODEL.word_count(depth), dtype=float)
    tab = Tabulated(MODEL, depth, vals)
    h, hf = Potential([(1.0, TabAtom(tab))]), Potential([(1.0, TabAtom(tab, 1))])
    lv = MODEL.tree.level(6)
    up = MODEL.tree.level(5)
    # h o f at x_a equals h at f(x_a), the parent representative
    assert np.allclose(hf.on_level(MODEL, 6), h.on_level(MODEL, 5)[lv.parent])
    assert up is MODEL.tree.level(5)


def test_tabulated_size_is_checked():
    with pytest.raises(ValidationError):
        Tabulated(MODEL, 3, np.zeros(5))


def test_call_on_arbitrary_points():
    pts = MODEL.tree.level(9).points[:20]
    assert np.allclose(tau()(MODEL, pts), np.log(np.abs(2 * pts)))
