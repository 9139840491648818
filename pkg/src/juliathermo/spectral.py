"""Twisted transfer operators and Dolgopyat-type diagnostics.

The twisted operator multiplies the weight of each branch by
``|g'|^{it} (g'/|g'|)^{-l} = exp(-i t tau + i l theta)`` evaluated at the
preimage, so ``(t, l) = (0, 0)`` is the plain transfer operator.
"""

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import InsufficientData, ValidationError
from .symbolic import pull_back
from .thermo import transfer_matrix


def twisted_apply(model, phi, t, l, h, depth=10):
    return transfer_matrix(model, phi, depth, t, l) @ np.asarray(h)


def probe_family(model, phi, depth=10, seed=0):
    """Columns: the constant 1, a smoothed complex Gaussian and its conjugate."""
    n = len(model.tree.level(depth))
    rng = np.random.Generator(np.random.Philox(seed))
    g = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    g = transfer_matrix(model, phi, depth) @ g
    g = g / np.max(np.abs(g))
    return np.column_stack([np.ones(n, complex), g, np.conj(g)])


def _cell_norms(model, phi, t, l, depth, family, n_hi):
    L = transfer_matrix(model, phi, depth, t, l)
    v = family.astype(complex)
    out = np.empty((n_hi, v.shape[1]))
    for n in range(n_hi):
        v = L @ v
        out[n] = np.max(np.abs(v), axis=0)
    return out


def _rate(norms, n_lo, n_hi):
    n = np.arange(n_lo, n_hi + 1)
    y = np.log(np.maximum(norms[n_lo - 1:n_hi], 1e-300))
    s = np.polyfit(n, y, 1)[0]
    mid = (n_lo + n_hi) // 2
    s1 = np.polyfit(n[: mid - n_lo + 1], y[: mid - n_lo + 1], 1)[0] if mid > n_lo else s
    s2 = np.polyfit(n[mid - n_lo:], y[mid - n_lo:], 1)[0] if n_hi > mid else s
    return float(np.exp(s)), bool(abs(s1 - s2) <= 0.05)


@dataclass
class SpectralReport:
    rows: list  # (t, l, rho_hat, converged)
    rho: float
    prefactor_exponent: float
    envelope: float
    max_cell: dict

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "l", "rho_hat", "converged"])
        for t, l, r, c in self.rows:
            w.writerow([repr(float(t)), int(l), repr(float(r)), int(bool(c))])
        return buf.getvalue()

    def to_dict(self):
        return {"rho": self.rho, "prefactor_exponent": self.prefactor_exponent, "envelope": self.envelope, "max_cell": self.max_cell}

    def rho_hat(self, t, l):
        for tt, ll, r, _ in self.rows:
            if tt == t and ll == l:
                return r
        raise KeyError((t, l))


def spectral_radius_profile(model, phi, t_grid, l_grid, depth=10, n_window=(8, 14), seed=0, threads=1):
    """Fitted contraction rates of twisted operators over a ``(t, l)`` grid.

    For every cell the norms ``||L^n h||_inf`` of each test function
    (see :func:`probe_family`) are fitted on the window, and the cell rate is
    the largest of the fitted rates. A single envelope
    ``C (|t| + |l|)^p rho^n`` is then fitted to all cells with
    ``|t| + |l| > 1``.
    """
    n_lo, n_hi = n_window
    if n_hi <= n_lo or n_lo < 1:
        raise ValidationError("n_window must satisfy 1 <= lo < hi", field="n_window")
    fam = probe_family(model, phi, depth, seed)
    cells = [(float(t), int(l)) for t in t_grid for l in l_grid]

    def work(cell):
        norms = _cell_norms(model, phi, cell[0], cell[1], depth, fam, n_hi)
        fits = [_rate(norms[:, j], n_lo, n_hi) for j in range(norms.shape[1])]
        j = int(np.argmax([f[0] for f in fits]))
        return fits[j][0], fits[j][1], norms.max(axis=1)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(work, cells))
    else:
        results = [work(c) for c in cells]
    rows = [(t, l, r, c) for (t, l), (r, c, _) in zip(cells, results)]
    far = [(abs(t) + abs(l), res[2]) for (t, l), res in zip(cells, results) if abs(t) + abs(l) > 1]
    if not far:
        return SpectralReport(rows, float("nan"), float("nan"), float("nan"), {})
    n = np.arange(n_lo, n_hi + 1)
    X, Y = [], []
    for size, norms in far:
        for k in n:
            X.append([1.0, np.log(size), k])
            Y.append(np.log(max(norms[k - 1], 1e-300)))
    X, Y = np.array(X), np.array(Y)
    coef = np.linalg.lstsq(X, Y, rcond=None)[0]
    envelope = float(np.exp(coef[0] + np.max(Y - X @ coef)))
    far_rows = [r for r in rows if abs(r[0]) + abs(r[1]) > 1]
    worst = max(far_rows, key=lambda r: r[2])
    return SpectralReport(rows, float(np.exp(coef[2])), float(coef[1]), envelope, {"t": worst[0], "l": worst[1], "rho_hat": worst[2]})


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------
def nli_determinant(model, word_a, word_b, probes):
    """Jacobian determinant of ``x -> (tau_tilde, theta_tilde)(x)``.

    ``tau_tilde + i theta_tilde = -log(g_a'(x) / g_b'(x))`` for two words
    ending in the same symbol; central differences in the real and
    imaginary directions give the 2x2 Jacobian at each probe.
    """
    a = np.asarray(word_a, np.int64)
    b = np.asarray(word_b, np.int64)
    if a.size != b.size or a[-1] != b[-1]:
        raise ValidationError("NLI words need equal length and a common last symbol", field="words")
    probes = np.atleast_1d(np.asarray(probes, complex))
    h = 1e-6 * max(1.0, float(np.max(np.abs(probes))))

    def G(z):
        out = np.empty(z.size, complex)
        for i, zi in enumerate(z):
            _, la = pull_back(model, a[None, :], zi)
            _, lb = pull_back(model, b[None, :], zi)
            out[i] = -(la[0] - lb[0])
        return out

    dx = (G(probes + h) - G(probes - h)) / (2 * h)
    dy = (G(probes + 1j * h) - G(probes - 1j * h)) / (2 * h)
    return dx.real * dy.imag - dy.real * dx.imag


def ncp_constant(points, scales, centers=None, directions=32):
    """Smallest ``delta`` such that every ball ``B(x, eps)`` around a center
    holds a point ``y`` with ``|<y - x, w>| > delta eps`` for all directions."""
    pts = np.asarray(points, complex)
    centers = pts if centers is None else np.asarray(centers, complex)
    kd = cKDTree(np.column_stack([pts.real, pts.imag]))
    w = np.exp(1j * np.pi * np.arange(directions) / directions)
    worst = np.inf
    for eps in scales:
        for x, nb in zip(centers, kd.query_ball_point(np.column_stack([centers.real, centers.imag]), eps)):
            d = pts[nb] - x
            if d.size == 0:
                raise InsufficientData(f"no sample points within {eps:g}")
            proj = np.abs(np.outer(np.conj(w), d).real)  # <d, w> = Re(conj(w) d)
            worst = min(worst, float(proj.max(axis=1).min() / eps))
    return worst


def dolgopyat_diagnostics(model, n=6, pairs=20, probe_radius=None, scales=None, depth=10, centers=32, seed=0, measure=None):
    """Nonlinearity, non-concentration and doubling diagnostics.

    Returns
    -------
    dict
        ``nli_min_det``: smallest ``|det|`` over word pairs and probes;
        ``ncp_delta``: smallest non-concentration constant over sampled
        centers; ``doubling``: largest doubling ratio (when ``measure`` is
        given).
    """
    rng = np.random.Generator(np.random.Philox(seed))
    lv = model.tree.level(n)
    dets = []
    for _ in range(pairs):
        last = int(rng.integers(model.size))
        cand = np.nonzero(lv.words[:, -1] == last)[0]
        i, j = rng.choice(cand, size=2, replace=False)
        r = model.r_P[last] * 0.1 if probe_radius is None else probe_radius
        x0 = model.centers[last]
        probes = x0 + r * np.exp(2j * np.pi * np.arange(4) / 4)
        dets.append(np.abs(nli_determinant(model, lv.words[i], lv.words[j], np.append(probes, x0))).min())
    pts = model.tree.level(depth).points
    if scales is None:
        span = np.ptp(pts.real) + np.ptp(pts.imag)
        scales = span * np.array([0.02, 0.05, 0.1])
    cidx = rng.choice(pts.size, size=min(centers, pts.size), replace=False)
    out = {"nli_min_det": float(min(dets)), "ncp_delta": ncp_constant(pts, scales, pts[cidx])}
    if measure is not None:
        from .measure import regularity_scan

        out["doubling"] = regularity_scan(measure, centers=centers, seed=seed).doubling
    return out
