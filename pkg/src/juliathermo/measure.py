"""Discrete equilibrium measures on cylinder trees, sampling and local
regularity."""

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import InsufficientData, ValidationError
from .thermo import aggregate, leaf_masses, pfr_eigendata


class GibbsMeasure:
    """Weighted point masses at cylinder representatives.

    Attributes
    ----------
    weights : (N,) float
        Leaf masses, summing to one.
    points : (N,) complex
    diameters : (N,) float
        Diameter estimates of the Julia pieces of the leaves.
    words : (N, depth+1) uint8 or None
    eigen_weights : (N,) float or None
        Masses from the eigendata of the transfer operator on the leaf depth.
    """

    def __init__(self, weights, points, diameters, words=None, model=None, potential=None, depth=None, eigen_weights=None):
        self.weights = np.asarray(weights, float)
        self.points = np.asarray(points, complex)
        self.diameters = np.asarray(diameters, float)
        if not (self.weights.shape == self.points.shape == self.diameters.shape):
            raise ValidationError("weights, points and diameters must have the same length", field="weights")
        if np.any(self.weights < 0) or not np.isclose(self.weights.sum(), 1.0, atol=1e-9):
            raise ValidationError("weights must be non-negative and sum to one", field="weights")
        self.words = words
        self.model = model
        self.potential = potential
        self.depth = depth
        self.eigen_weights = eigen_weights

    @classmethod
    def from_points(cls, points, weights=None, diameters=0.0):
        """Measure given directly by atoms, without a model."""
        points = np.atleast_1d(np.asarray(points, complex))
        if weights is None:
            weights = np.full(points.size, 1.0 / points.size)
        return cls(weights, points, np.broadcast_to(np.asarray(diameters, float), points.shape).copy())

    def __len__(self):
        return self.points.size

    @property
    def max_diameter(self):
        return float(self.diameters.max())

    def level_weights(self, k):
        """Masses of the cylinders of words of length ``k + 1``."""
        if self.model is None:
            raise ValidationError("measure has no cylinder structure", field="measure")
        if k > self.depth:
            raise ValidationError(f"level {k} is below the leaf depth {self.depth}", field="k")
        return aggregate(self.model, self.weights, self.depth, k)

    def integrate(self, values):
        return float(self.weights @ np.asarray(values))

    def to_csv(self):
        """CSV text with columns ``word, weight, re, im``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["word", "weight", "re", "im"])
        for i in range(self.points.size):
            word = self.model.format_word(self.words[i]) if self.words is not None else str(i)
            w.writerow([word, repr(float(self.weights[i])), repr(float(self.points[i].real)), repr(float(self.points[i].imag))])
        return buf.getvalue()


def build_measure(model, phi, depth=14, eigen=True):
    """Equilibrium measure of a normalized potential on words of length ``depth+1``.

    Leaf weights are proportional to ``exp(S_depth phi(x_a))``; with
    ``eigen`` the masses ``h * nu`` of the transfer operator on the leaf depth
    are also kept for comparison.
    """
    if not getattr(phi, "normalized", False):
        raise ValidationError("build_measure needs a normalized potential", field="potential")
    tree = model.tree
    lv = tree.level(depth)
    weights = leaf_masses(model, phi, depth)
    eig = pfr_eigendata(model, phi, depth).mu if eigen else None
    return GibbsMeasure(weights, lv.points.copy(), tree.diameters(depth), lv.words, model, phi, depth, eig)


def gibbs_ratios(measure, k):
    """``mu(P_a) / exp(S_k phi(x_a))`` over words of length ``k + 1``."""
    w = measure.level_weights(k)
    s = measure.potential.birkhoff_level(measure.model, k)
    return w / np.exp(s)


def gibbs_constant(measure, k):
    """Smallest ``C0`` with all ratios at level ``k`` in ``[1/C0, C0]``."""
    r = gibbs_ratios(measure, k)
    return float(np.exp(np.max(np.abs(np.log(r)))))


def gibbs_bounded(measure, k, C0, rtol=1e-12):
    """Whether every ratio at level ``k`` lies in ``[1/C0, C0]`` up to rounding."""
    r = gibbs_ratios(measure, k)
    return bool(np.all(r <= C0 * (1 + rtol)) and np.all(r >= (1 - rtol) / C0))


def sample(measure, count, seed=0):
    """Draw ``count`` points from the measure.

    A leaf is chosen with probability equal to its weight (the same law as
    descending the tree with conditional weights) and the point is jittered
    uniformly in a disk of radius a quarter of the leaf diameter. A
    counter-based generator keyed by ``seed`` makes the draw reproducible.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    idx = rng.choice(measure.points.size, size=count, p=measure.weights)
    r = 0.25 * measure.diameters[idx] * np.sqrt(rng.random(count))
    ang = 2 * np.pi * rng.random(count)
    return measure.points[idx] + r * np.exp(1j * ang), idx


def samples_csv(points):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re", "im"])
    for z in points:
        w.writerow([repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()


@dataclass
class RegularityReport:
    radii: np.ndarray
    masses: np.ndarray  # (centers, radii)
    delta_ad: float
    doubling: float

    def to_dict(self):
        return {"radii": self.radii.tolist(), "delta_ad": self.delta_ad, "doubling": self.doubling, "sup_mass": self.masses.max(axis=0).tolist()}


def ball_masses(measure, centers, radii):
    kd = cKDTree(np.column_stack([measure.points.real, measure.points.imag]))
    c = np.column_stack([np.real(centers), np.imag(centers)])
    out = np.empty((len(c), len(radii)))
    for j, r in enumerate(radii):
        for i, nb in enumerate(kd.query_ball_point(c, r)):
            out[i, j] = measure.weights[nb].sum() if nb else 0.0
    return out


def regularity_scan(measure, radii=None, centers=64, seed=0):
    """Fit the upper regularity exponent and a doubling constant.

    ``delta_ad`` is the log-log slope of ``sup_x mu(B(x, r))`` over the
    radius grid; the doubling constant is the largest
    ``mu(B(x, 2r)) / mu(B(x, r))`` over sampled centers ``x``.
    """
    if radii is None:
        span = np.ptp(measure.points.real) + np.ptp(measure.points.imag)
        span = span if span > 0 else 1.0
        radii = span * np.logspace(-2.5, -0.5, 9)
    radii = np.asarray(radii, float)
    if radii.size < 2:
        raise InsufficientData("need at least two radii")
    rng = np.random.Generator(np.random.Philox(seed))
    idx = rng.choice(measure.points.size, size=centers, p=measure.weights)
    x = measure.points[idx]
    both = np.concatenate([radii, 2 * radii])
    m = ball_masses(measure, x, both)
    m1, m2 = m[:, : radii.size], m[:, radii.size:]
    sup = m1.max(axis=0)
    slope = float(np.polyfit(np.log(radii), np.log(sup), 1)[0])
    doubling = float(np.max(m2 / m1))
    return RegularityReport(radii, m1, slope, doubling)
