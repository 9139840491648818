"""Fourier transforms of discrete measures, decay fits and the
exponential sums built from branch derivatives."""

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyBlockFamily, InsufficientData, ResolutionExceeded, ValidationError
from .measure import sample
from .symbolic import pull_back


def _phase_sum(points, weights, xi):
    ph = -2 * np.pi * (np.outer(points.real, xi.real) + np.outer(points.imag, xi.imag))
    return weights @ np.exp(1j * ph)


def fourier_transform(measure, xi, method="quadrature", mc_count=20000, seed=0, confidence=4.0, max_phase=1.0, chunk=32, threads=1):
    """``mu_hat(xi) = int exp(-2 pi i Re(x conj(xi))) dmu(x)``.

    Parameters
    ----------
    method : {"quadrature", "montecarlo"}
        Leaf quadrature, or an average over ``mc_count`` jittered samples.
    confidence : float
        Monte Carlo error bars are ``confidence / sqrt(mc_count)`` plus the
        quadrature bound of the jitter.
    max_phase : float
        Largest allowed ``2 pi |xi| * max leaf diameter``.

    Returns
    -------
    values, errors : ndarray
        Complex transform and an error bound per frequency.

    Raises
    ------
    ResolutionExceeded
        If some ``|xi|`` is too large for the leaf resolution.
    """
    xi = np.atleast_1d(np.asarray(xi, complex))
    quad = 2 * np.pi * np.abs(xi) * measure.max_diameter
    if np.any(quad > max_phase):
        raise ResolutionExceeded(f"2 pi |xi| diam = {quad.max():.3g} exceeds {max_phase:g}; deepen the measure")
    if method == "quadrature":
        pts, w, err = measure.points, measure.weights, quad
    elif method == "montecarlo":
        pts, _ = sample(measure, mc_count, seed)
        w = np.full(mc_count, 1.0 / mc_count)
        err = quad + confidence / np.sqrt(mc_count)
    else:
        raise ValidationError(f"unknown method {method!r}", field="method")
    blocks = [slice(i, i + chunk) for i in range(0, xi.size, chunk)]
    out = np.empty(xi.size, complex)
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            for sl, v in zip(blocks, ex.map(lambda s: _phase_sum(pts, w, xi[s]), blocks)):
                out[sl] = v
    else:
        for sl in blocks:
            out[sl] = _phase_sum(pts, w, xi[sl])
    return out, err


def annulus_grid(T_list, directions=32, moduli=4, ratio=2.0):
    """Frequencies on annuli ``T <= |xi| < ratio T``.

    Each annulus gets ``directions`` arguments at ``moduli`` log-spaced
    radii starting at ``T``.
    """
    xs, ts = [], []
    ang = np.exp(2j * np.pi * np.arange(directions) / directions)
    for T in T_list:
        r = T * ratio ** (np.arange(moduli) / moduli)
        pts = (r[:, None] * ang[None, :]).ravel()
        xs.append(pts)
        ts.append(np.full(pts.size, float(T)))
    return np.concatenate(xs), np.concatenate(ts)


@dataclass
class FourierReport:
    xi: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    method: str
    annuli: list = field(default_factory=list)
    eps_fit: float = float("nan")
    residual: float = float("nan")

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["xi_re", "xi_im", "mu_re", "mu_im", "err"])
        for x, v, e in zip(self.xi, self.values, self.errors):
            w.writerow([repr(float(x.real)), repr(float(x.imag)), repr(float(v.real)), repr(float(v.imag)), repr(float(e))])
        return buf.getvalue()

    def to_dict(self):
        return {"annuli": self.annuli, "eps_fit": self.eps_fit, "residual": self.residual, "method": self.method}


def decay_fit(xi, values, T_list, ratio=2.0, min_samples=32):
    """Fit ``sup_{T <= |xi| < ratio T} |mu_hat| ~ C (1 + T)^(-eps/2)``.

    Returns
    -------
    eps_fit : float
        Minus twice the least squares slope of ``log sup`` against
        ``log(1 + T)``.
    residual : float
        Root mean square of the log residuals.
    annuli : list of dict
    """
    xi = np.asarray(xi, complex)
    mod = np.abs(xi)
    absval = np.abs(np.asarray(values))
    if len(T_list) < 4:
        raise InsufficientData("need at least four annuli")
    annuli = []
    for T in T_list:
        m = (mod >= T * (1 - 1e-12)) & (mod < ratio * T)
        if m.sum() < min_samples:
            raise InsufficientData(f"annulus T={T} has {int(m.sum())} samples, need {min_samples}")
        annuli.append({"T": float(T), "sup": float(absval[m].max()), "count": int(m.sum())})
    x = np.log1p([a["T"] for a in annuli])
    y = np.log([max(a["sup"], 1e-300) for a in annuli])
    s, b = np.polyfit(x, y, 1)
    res = y - (b + s * x)
    return float(-2 * s), float(np.sqrt(np.mean(res**2))), annuli


def fourier_decay(measure, T_list=(4, 8, 16, 32, 64), directions=32, moduli=4, method="quadrature", **kw):
    """Transform on an annulus grid followed by :func:`decay_fit`."""
    xi, _ = annulus_grid(T_list, directions, moduli)
    vals, err = fourier_transform(measure, xi, method=method, **kw)
    eps, resid, annuli = decay_fit(xi, vals, T_list)
    return FourierReport(xi, vals, err, method, annuli, eps, resid)


# ---------------------------------------------------------------------------
# exponential sums of branch derivatives
# ---------------------------------------------------------------------------
def zeta_set(model, n, a_prev, a_next, lam, mask=None):
    """Scaled derivatives ``exp(2 lam n) g'_{a_prev' b}(x_{a_next})``.

    ``b`` runs over words of length ``n + 1`` starting with the last symbol
    of ``a_prev`` and ending with the first symbol of ``a_next``,
    restricted to ``mask`` when given.

    Returns
    -------
    words : (K, n+1) array
    zeta : (K,) complex
    """
    a_prev = np.asarray(a_prev, np.int64)
    a_next = np.asarray(a_next, np.int64)
    lv = model.tree.level(n)
    sel = (lv.words[:, 0] == a_prev[-1]) & (lv.words[:, -1] == a_next[0])
    if mask is not None:
        sel &= mask
    words = lv.words[sel].astype(np.int64)
    if words.shape[0] == 0:
        return words, np.zeros(0, complex)
    concat = np.hstack([np.broadcast_to(a_prev[:-1], (words.shape[0], a_prev.size - 1)), words])
    x = lv.points[model.rank(a_next[None, :])[0]]
    _, logd = pull_back(model, concat, x)
    return words, np.exp(2 * lam * n + logd)


def exp_sum_modulus(zeta_sets, eta, N):
    """``N^-k |sum_{b in Z_1 x ... x Z_k} exp(2 pi i Re(eta zeta_1 ... zeta_k))|``."""
    prod = np.ones(1, complex)
    for z in zeta_sets:
        prod = np.outer(prod, np.asarray(z, complex)).ravel()
    eta = np.atleast_1d(np.asarray(eta, complex))
    out = np.empty(eta.size)
    for i in range(0, eta.size, 16):
        e = eta[i:i + 16]
        ph = 2 * np.pi * (np.outer(e.real, prod.real) - np.outer(e.imag, prod.imag))
        out[i:i + 16] = np.abs(np.exp(1j * ph).sum(axis=1))
    return out / float(N) ** len(zeta_sets)


def eta_sample(n, eps0, count, seed=0):
    """Frequencies with ``exp(eps0 n / 2) <= |eta| <= exp(2 eps0 n)``."""
    rng = np.random.Generator(np.random.Philox(seed))
    r = np.exp(eps0 * n * (0.5 + 1.5 * rng.random(count)))
    return r * np.exp(2j * np.pi * rng.random(count))


def exp_sum_assembly(model, n, block, eta, lam, delta, mask=None, N=None):
    """Exponential sum over the product of zeta sets of a block.

    Parameters
    ----------
    block : sequence of k + 1 words of length n + 1
    mask : bool array over words of length n + 1, optional
        Admissible ``b`` (typically the regular words).
    N : float, optional
        Normalization, ``exp(lam delta n)`` by default.

    Returns
    -------
    dict
        ``moduli`` per eta, ``trivial`` bound ``prod |Z_j| / N^k`` and the
        zeta sets.
    """
    if len(block) < 2:
        raise ValidationError("a block needs at least two words", field="block")
    N = np.exp(lam * delta * n) if N is None else N
    sets = []
    for j in range(1, len(block)):
        _, z = zeta_set(model, n, block[j - 1], block[j], lam, mask)
        if z.size == 0:
            raise EmptyBlockFamily(f"no admissible b between block words {j - 1} and {j}")
        sets.append(z)
    k = len(sets)
    trivial = float(np.prod([z.size for z in sets])) / N**k
    return {"moduli": exp_sum_modulus(sets, eta, N), "trivial": trivial, "zeta": sets, "N": float(N)}


def reduction_error_terms(kappa, lam, eps0, delta_ad, n, bad_mass):
    """Magnitudes of the error terms accumulated when reducing the
    transform to exponential sums of derivatives at scale ``n``."""
    return {
        "distortion": float(kappa ** (-2 * n)),
        "frequency": float(np.exp(-(lam - eps0) * n)),
        "regularity": float(np.exp(-eps0 * delta_ad * n / 2)),
        "irregular": float(bad_mass**2),
    }
