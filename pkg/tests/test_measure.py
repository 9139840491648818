import numpy as np
import pytest

from juliathermo.errors import InsufficientData, ValidationError
from juliathermo.measure import (
    GibbsMeasure,
    ball_masses,
    build_measure,
    gibbs_bounded,
    gibbs_constant,
    regularity_scan,
    sample,
    samples_csv,
)
from juliathermo.potentials import tau
from juliathermo.thermo import solve_bowen


@pytest.fixture(scope="module")
def z5_measure(z5, z5_conformal):
    return build_measure(z5, z5_conformal, depth=12)


def test_needs_normalized_potential(z5):
    with pytest.raises(ValidationError):
        build_measure(z5, tau(-1.0), 8)


def test_weights_and_eigen_weights(z5_measure):
    m = z5_measure
    assert len(m) == 2**13 and m.weights.sum() == pytest.approx(1)
    assert m.eigen_weights.sum() == pytest.approx(1)
    # leaf weights and transfer eigendata describe the same measure
    assert np.max(np.abs(np.log(m.weights / m.eigen_weights))) < 0.01


def test_level_weights_consistent(z5_measure, z5):
    w8, w7 = z5_measure.level_weights(8), z5_measure.level_weights(7)
    assert np.allclose(np.bincount(z5.tree.level(8).prefix, weights=w8), w7)
    with pytest.raises(ValidationError):
        z5_measure.level_weights(13)


def test_gibbs_constant_converges(z5_measure):
    # levels within four of the leaf depth feel the leaf truncation, so
    # stop at depth - 4
    C = np.array([gibbs_constant(z5_measure, k) for k in range(2, 9)])
    assert np.all((C >= 1) & (C < 3))
    steps = np.abs(np.diff(C))
    assert steps[-1] < 1e-5 and steps[-1] <= steps[0]
    assert gibbs_bounded(z5_measure, 8, C[-1])


def test_maximal_entropy_ratios_are_exact(z5, z5_maxent):
    m = build_measure(z5, z5_maxent, depth=10, eigen=False)
    assert gibbs_bounded(m, 6, gibbs_constant(m, 3))


def test_from_points_validation():
    m = GibbsMeasure.from_points([0, 1j])
    assert m.weights.tolist() == [0.5, 0.5]
    with pytest.raises(ValidationError):
        GibbsMeasure([0.7, 0.7], [0, 1], [0, 0])
    with pytest.raises(ValidationError):
        m.level_weights(2)


def test_sampling_is_reproducible(z5_measure):
    a, ia = sample(z5_measure, 500, seed=5)
    b, ib = sample(z5_measure, 500, seed=5)
    c, _ = sample(z5_measure, 500, seed=6)
    assert np.array_equal(a, b) and np.array_equal(ia, ib)
    assert not np.array_equal(a, c)
    # jitter stays within a quarter diameter of the chosen leaf
    assert np.all(np.abs(a - z5_measure.points[ia]) <= 0.25 * z5_measure.diameters[ia] + 1e-15)


def test_sample_frequencies_follow_weights(z5_measure):
    _, idx = sample(z5_measure, 40000, seed=1)
    top = (z5_measure.words[idx, 0] == 0).mean()
    exact = z5_measure.level_weights(0)[0]
    assert top == pytest.approx(exact, abs=0.02)


def test_csv_headers(z5_measure):
    text = z5_measure.to_csv()
    assert text.splitlines()[0] == "word,weight,re,im"
    assert text.splitlines()[1].startswith("0.0.0")
    assert samples_csv([1 + 2j]).splitlines() == ["re,im", "1.0,2.0"]


def test_ball_masses_full_ball(z5_measure):
    m = ball_masses(z5_measure, [0j], [100.0])
    assert m[0, 0] == pytest.approx(1)


def test_regularity_of_conformal_measure(z5_measure, z5):
    rep = regularity_scan(z5_measure, seed=2)
    delta = solve_bowen(z5, 12).delta
    assert abs(rep.delta_ad - delta) / delta < 0.15
    assert rep.doubling < 50


def test_regularity_of_circle_measure(circle, circle_maxent):
    m = build_measure(circle, circle_maxent, depth=12, eigen=False)
    rep = regularity_scan(m, seed=0)
    assert rep.delta_ad == pytest.approx(1.0, abs=0.05)

    # Lebesgue mass of a chordal ball on the unit circle
    def arc(r):
        return np.where(r >= 2, 1.0, 2 * np.arcsin(np.minimum(r, 2) / 2) / np.pi)

    exact = np.max(arc(2 * rep.radii) / arc(rep.radii))
    assert rep.doubling == pytest.approx(exact, rel=0.02)


def test_regularity_needs_two_radii(z5_measure):
    with pytest.raises(InsufficientData):
        regularity_scan(z5_measure, radii=[0.1])
