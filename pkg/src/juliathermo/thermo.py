"""Transfer operators, pressure, normalization and large deviations.

The transfer operator of a potential ``phi`` acts on functions constant on
cylinders of depth ``D`` (words of length ``D + 1``)::

    (L h)[a] = sum_c exp(phi(x_{ca})) h[(ca)']

where ``(ca)'`` drops the last symbol of ``ca``. Row ``a`` collects the
level ``D + 1`` words whose shift is ``a``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import brentq
from scipy.special import logsumexp

from .errors import BadBracket, NoConvergence, ValidationError
from .potentials import TAU, Potential, TabAtom, Tabulated, constant, tau


# ---------------------------------------------------------------------------
# Birkhoff sums
# ---------------------------------------------------------------------------
def birkhoff_sum(model, phi, word, z=None):
    """``S_n phi(g_a(z))`` for a word ``a`` of length ``n + 1``.

    ``z`` defaults to the center of the last symbol, which gives the sum at
    the representative ``x_a``.
    """
    word = np.asarray(word, np.int64)
    n = word.size - 1
    tree = model.tree
    L = phi.itinerary_length
    if z is None:
        z = model.centers[word[-1]]
        tail = tree.center_itinerary(int(word[-1]), L)
    else:
        if not model.in_domain(int(word[-1]), z):
            raise ValidationError("point outside the branch domain of the last symbol", field="z")
        tail = tree.locate(z, L)[0]
    total = 0.0
    w = complex(z)
    for j in range(n - 1, -1, -1):
        w, _ = model.branch(int(word[j]), int(word[j + 1]), np.array([w]))
        w = complex(w[0])
        itin = np.concatenate([word[j:n], tail])[:L][None, :]
        total += float(phi.evaluate(model, np.array([w]), itin)[0])
    return total


# ---------------------------------------------------------------------------
# transfer operator
# ---------------------------------------------------------------------------
def _edge_data(model, phi, depth):
    tree = model.tree
    up = tree.level(depth + 1)
    vals = phi.on_level(model, depth + 1)
    return up, vals


def transfer_matrix(model, phi, depth, t=0.0, l=0):
    """Sparse matrix of ``L_phi`` on cylinder functions of depth ``depth``.

    With ``t`` or ``l`` nonzero the twisted weights
    ``exp(phi - i t tau + i l theta)`` are used.
    """
    up, vals = _edge_data(model, phi, depth)
    n = len(model.tree.level(depth))
    if t == 0 and l == 0:
        data = np.exp(vals)
    else:
        lf = np.log(model.fprime(up.words[:, 0], up.points))
        data = np.exp(vals - 1j * t * lf.real + 1j * l * lf.imag)
    return sparse.csr_matrix((data, (up.parent, up.prefix)), shape=(n, n))


def transfer_apply(model, phi, h, depth):
    """Apply ``L_phi`` to ``h`` given on words of length ``depth + 1``."""
    if isinstance(h, Tabulated):
        h = h.values
    h = np.asarray(h)
    return transfer_matrix(model, phi, depth) @ h


@dataclass
class PfrData:
    """Leading eigendata of a transfer operator on a fixed depth.

    ``h`` and ``nu`` are indexed by word rank; ``nu`` sums to one and
    ``sum(h * nu) == 1``.
    """

    P: float
    h: np.ndarray
    nu: np.ndarray
    depth: int
    residual: float
    duality_defect: float
    iterations: int
    matrix: object = field(repr=False, default=None)

    @property
    def eigenvalue(self):
        return float(np.exp(self.P))

    @property
    def mu(self):
        return self.h * self.nu


def _power(A, tol, max_iter):
    n = A.shape[0]
    v = np.ones(n)
    lam_old = np.nan
    for it in range(1, max_iter + 1):
        y = A @ v
        lam = float(v @ y / (v @ v))
        if not np.isfinite(lam) or lam <= 0:
            raise NoConvergence("transfer operator collapsed to zero")
        change = np.max(np.abs(y / lam - v)) / np.max(np.abs(v))
        v = y / np.max(np.abs(y))
        if it > 1 and abs(lam - lam_old) < tol * (1 + abs(np.log(lam))) and change < tol:
            return lam, v, it
        lam_old = lam
    raise NoConvergence(f"power iteration did not settle within {max_iter} iterations")


def pfr_eigendata(model, phi, depth=10, tol=1e-14, max_iter=20000, seed=0):
    """Pressure, eigenfunction and eigenmeasure by power iteration.

    Parameters
    ----------
    tol : float
        Stop when successive eigenvalue estimates differ by less than
        ``tol * (1 + |P|)`` and the eigenvector has settled to ``tol``.

    Returns
    -------
    PfrData
    """
    L = transfer_matrix(model, phi, depth)
    lam, h, it1 = _power(L, tol, max_iter)
    lam2, nu, it2 = _power(L.T.tocsr(), tol, max_iter)
    nu = nu / nu.sum()
    h = h / float(h @ nu)
    residual = float(np.max(np.abs(L @ h - lam * h)))
    rng = np.random.default_rng(seed)
    g = rng.random((h.size, 8))
    defect = float(np.max(np.abs(nu @ (L @ g) - lam * (nu @ g))))
    return PfrData(float(np.log(lam)), h, nu, depth, residual, defect, max(it1, it2), L)


def normalize(model, psi, depth=10):
    """Cohomologous normalized potential ``psi + log h - log h o f - P``.

    The result satisfies ``L_phi 1 = 1`` on words of length ``depth + 1``.
    """
    pd = pfr_eigendata(model, psi, depth)
    if np.any(pd.h <= 0):
        raise NoConvergence("eigenfunction is not positive")
    tab = Tabulated(model, depth, np.log(pd.h))
    corr = Potential([(1.0, TabAtom(tab, 0, "log h")), (-1.0, TabAtom(tab, 1, "log h"))])
    phi = psi + corr - pd.P
    phi._label = f"normalize({psi.label})"
    phi.normalized = True
    phi.info = {"P": pd.P, "depth": depth, "base": psi.label, "pfr": pd}
    return phi


def conformal_potential(model, depth=10, n=12):
    """Normalization of ``-delta tau`` with ``delta`` the Bowen root."""
    cache = model.__dict__.setdefault("_conformal", {})
    key = (depth, n)
    if key not in cache:
        delta = solve_bowen(model, n).delta
        phi = normalize(model, tau(-delta), depth)
        phi._label = "conformal"
        phi.info["delta"] = delta
        cache[key] = phi
    return cache[key]


def max_entropy_potential(model, depth=10):
    """Normalization of the zero potential."""
    phi = normalize(model, constant(0.0), depth)
    phi._label = "normalize(0)"
    return phi


def transfer_one_defect(model, phi, depth=None):
    """``max |L_phi 1 - 1|`` on the tabulation depth of ``phi``."""
    depth = phi.info.get("depth", 10) if depth is None else depth
    one = np.ones(len(model.tree.level(depth)))
    return float(np.max(np.abs(transfer_apply(model, phi, one, depth) - 1)))


# ---------------------------------------------------------------------------
# pressure
# ---------------------------------------------------------------------------
def periodic_orbits(model, n):
    """Fixed points of ``f^n`` coded by cyclic words of length ``n``.

    Returns
    -------
    words : (N, n) array
    orbit : (n, N) complex
        ``orbit[j]`` is ``f^j`` of the periodic point.
    """
    cache = model.__dict__.setdefault("_periodic", {})
    if n in cache:
        return cache[n]
    words = model.enumerate_words(n - 1).astype(np.int64)
    words = words[model.matrix[words[:, -1], words[:, 0]] == 1]
    cyc = np.hstack([words, words[:, :1]])
    w = model.centers[words[:, 0]].copy()

    def one_pass(w):
        orbit = np.empty((n, w.size), complex)
        logd = np.zeros(w.size, complex)
        for j in range(n - 1, -1, -1):
            pair = cyc[:, j] * model.size + cyc[:, j + 1]
            for p in np.unique(pair):
                m = pair == p
                wn, d = model.branch(int(p // model.size), int(p % model.size), w[m])
                w = w.copy()
                w[m] = wn
                logd[m] += np.log(d)
            orbit[j] = w
        return w, orbit, np.exp(logd)

    for _ in range(100):
        wn, orbit, dG = one_pass(w)
        # Newton on G(w) - w with G the composed branch
        wn = w - (wn - w) / (dG - 1)
        done = np.all(np.abs(wn - w) <= 1e-14 * (1 + np.abs(w)))
        w = wn
        if done:
            break
    else:
        raise NoConvergence("periodic points did not converge")
    _, orbit, _ = one_pass(w)
    cache[n] = (words, orbit)
    return words, orbit


def _periodic_sums(model, phi, n):
    words, orbit = periodic_orbits(model, n)
    L = phi.itinerary_length
    reps = -(-L // n) + 1
    tiled = np.tile(words, (1, reps + 1))
    total = np.zeros(words.shape[0])
    for j in range(n):
        total += phi.evaluate(model, orbit[j], tiled[:, j:j + L])
    return total


def cylinder_log_sum(model, phi, n):
    """``log sum_{a in W_{n+1}} exp(S_n phi(x_a))``."""
    return float(logsumexp(phi.birkhoff_level(model, n)))


def pressure(model, phi, n=12, method="periodic"):
    """Finite-depth pressure estimate.

    ``periodic`` uses ``(1/n) log sum_{f^n p = p} exp(S_n phi(p))``;
    ``cylinder`` uses the ratio ``log Z_{n+1} - log Z_n`` of cylinder
    partition sums, which removes the boundary term of ``(1/n) log Z_n``.
    """
    if method == "periodic":
        return float(logsumexp(_periodic_sums(model, phi, n)) / n)
    if method == "cylinder":
        return cylinder_log_sum(model, phi, n + 1) - cylinder_log_sum(model, phi, n)
    raise ValidationError(f"unknown pressure method {method!r}", field="method")


@dataclass(frozen=True)
class BowenResult:
    delta: float
    residual: float
    iterations: int
    n: int
    method: str


def solve_bowen(model, n=12, bracket=(0.0, 4.0), method="cylinder", tol=1e-12):
    """Root ``delta`` of ``s -> P(-s tau)``.

    Raises
    ------
    BadBracket
        If the pressure does not change sign on ``bracket``.
    """
    if method == "cylinder":
        s1 = model.tree.level(n).logder.real
        s2 = model.tree.level(n + 1).logder.real

        def fun(s):
            return float(logsumexp(-s * s2) - logsumexp(-s * s1))
    else:
        def fun(s):
            return pressure(model, tau(-s), n, method)

    lo, hi = bracket
    flo, fhi = fun(lo), fun(hi)
    if not flo > 0 > fhi:
        raise BadBracket(f"P(-s tau) has no sign change on [{lo}, {hi}]: values {flo:.4g}, {fhi:.4g}")
    root, info = brentq(fun, lo, hi, xtol=tol, full_output=True)
    return BowenResult(float(root), abs(fun(root)), int(info.iterations), n, method)


# ---------------------------------------------------------------------------
# equilibrium quantities
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ErgodicConstants:
    lam: float
    entropy: float
    delta: float
    depth: int

    def to_dict(self):
        return {"lambda": self.lam, "entropy": self.entropy, "delta": self.delta, "depth": self.depth}


def ergodic_constants(model, phi, depth=10, kappa=None):
    """Lyapunov exponent, entropy and their ratio for the measure of ``phi``.

    ``phi`` should be normalized; the integrals use the eigenmeasure of
    ``L_phi`` on words of length ``depth + 1``.
    """
    pd = pfr_eigendata(model, phi, depth)
    mu = pd.mu
    lam = float(mu @ Potential([(1.0, TAU)]).on_level(model, depth))
    ent = float(-(mu @ phi.on_level(model, depth)))
    if kappa is not None and lam < np.log(kappa) - 1e-9:
        raise NoConvergence(f"Lyapunov exponent {lam:.6g} below log kappa {np.log(kappa):.6g}")
    if ent <= 0:
        raise NoConvergence(f"entropy {ent:.6g} is not positive")
    return ErgodicConstants(lam, ent, ent / lam, depth)


def pressure_gradient_check(model, phi, psi, t_list=(1e-2, 3e-3, 1e-3), depth=10):
    """Forward-difference defect ``(P(phi + t psi) - P(phi))/t - int psi dmu``.

    Pressures are leading eigenvalues on the given depth and the integral
    uses the matching equilibrium measure on edges, so the defect is the
    second-order Taylor term ``t P''/2 + O(t^2)``.

    Returns
    -------
    dict
        ``defects`` per t, ``slope`` of defect against t and the central
        second difference ``second_derivative`` at the smallest t.
    """
    pd = pfr_eigendata(model, phi, depth)
    up = model.tree.level(depth + 1)
    lam = pd.eigenvalue
    w = np.exp(phi.on_level(model, depth + 1))
    edge = pd.nu[up.parent] * w * pd.h[up.prefix] / lam
    integral = float(edge @ psi.on_level(model, depth + 1))
    t = np.asarray(t_list, float)
    P0 = pd.P
    fwd = np.array([(pfr_eigendata(model, phi + psi * ti, depth).P - P0) / ti for ti in t])
    defects = fwd - integral
    slope = float(np.polyfit(t, defects, 1)[0]) if t.size > 1 else float("nan")
    tm = float(t.min())
    second = (pfr_eigendata(model, phi + psi * tm, depth).P - 2 * P0 + pfr_eigendata(model, phi - psi * tm, depth).P) / tm**2
    return {"integral": integral, "t": t.tolist(), "defects": defects.tolist(), "slope": slope, "second_derivative": float(second)}


def leaf_masses(model, phi, depth):
    """Weights proportional to ``exp(S_n phi(x_a))`` on words of length ``depth+1``."""
    s = phi.birkhoff_level(model, depth)
    w = np.exp(s - s.max())
    return w / w.sum()


def aggregate(model, leaf, depth, k):
    """Masses of the length ``k + 1`` prefixes of leaves at ``depth``."""
    if k == depth:
        return leaf
    words = model.tree.level(depth).words
    r = model.rank(words[:, : k + 1])
    return np.bincount(r, weights=leaf, minlength=len(model.tree.level(k)))


def regular_words(model, phi, n, eps, lam, delta):
    """Boolean mask of regular words of length ``n + 1``.

    A word is regular when the representative has
    ``|S_n tau / n - lam| < eps`` and ``|S_n phi / S_n tau + delta| < eps``.
    """
    st = model.tree.level(n).logder.real
    sp = phi.birkhoff_level(model, n)
    return (np.abs(st / n - lam) < eps) & (np.abs(sp / st + delta) < eps)


def _exp_fit(n, y):
    """Least squares fit of ``log y = b + s n`` on positive entries."""
    m = y > 0
    if m.sum() < 2:
        return {"rate": float("nan"), "intercept": float("nan"), "r2": float("nan"), "points": int(m.sum())}
    x, ly = n[m], np.log(y[m])
    s, b = np.polyfit(x, ly, 1)
    res = ly - (b + s * x)
    sst = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1 - float(np.sum(res**2)) / sst if sst > 0 else float("nan")
    return {"rate": float(s), "intercept": float(b), "r2": r2, "points": int(m.sum())}


@dataclass
class LargeDeviationProfile:
    n: list
    eps: float
    lam: float
    delta: float
    bad_mass: list
    regular_count: list
    bad_fit: dict
    count_ratio: list
    alpha_fit: float
    alpha_bound: float
    psi_bad_mass: list = None
    psi_fit: dict = None

    def to_dict(self):
        return {k: v for k, v in self.__dict__.items()}


def large_deviation_profile(model, phi, eps, n_range=range(6, 15), psi=None, depth=10):
    """Mass of non-regular cylinders and the count of regular words.

    Parameters
    ----------
    phi : Potential
        Normalized potential of the measure.
    eps : float
    psi : Potential, optional
        Also report ``mu(|S_n psi / n - int psi| >= eps)``.

    Returns
    -------
    LargeDeviationProfile
        ``bad_fit`` is a log-linear fit of the bad mass against n (rate is
        the slope); ``count_ratio`` is ``#R_{n+1} exp(-delta lam n)`` and
        ``alpha_fit`` the smallest ``alpha`` such that its logarithm stays
        within ``alpha eps n`` of the fitted constant.
    """
    n_range = np.asarray(list(n_range), int)
    ec = ergodic_constants(model, phi, depth)
    lam, delta = ec.lam, ec.delta
    top = int(n_range.max())
    leaf = leaf_masses(model, phi, top)
    bad, count, psi_bad = [], [], []
    if psi is not None:
        pd = pfr_eigendata(model, phi, depth)
        psi_mean = float(pd.mu @ psi.on_level(model, depth))
    for n in n_range:
        mass = aggregate(model, leaf, top, n)
        reg = regular_words(model, phi, n, eps, lam, delta)
        bad.append(float(mass[~reg].sum()))
        count.append(int(reg.sum()))
        if psi is not None:
            sp = psi.birkhoff_level(model, n) / n
            psi_bad.append(float(mass[np.abs(sp - psi_mean) >= eps].sum()))
    bad = np.array(bad)
    ratio = np.array(count, float) * np.exp(-delta * lam * n_range)
    lr = np.log(np.maximum(ratio, 1e-300))
    b = float(np.mean(lr))
    alpha = float(np.max(np.abs(lr - b) / (eps * n_range)))
    return LargeDeviationProfile(
        n=n_range.tolist(),
        eps=float(eps),
        lam=lam,
        delta=delta,
        bad_mass=bad.tolist(),
        regular_count=count,
        bad_fit=_exp_fit(n_range.astype(float), bad),
        count_ratio=ratio.tolist(),
        alpha_fit=alpha,
        alpha_bound=lam + delta + eps,
        psi_bad_mass=psi_bad if psi is not None else None,
        psi_fit=_exp_fit(n_range.astype(float), np.array(psi_bad)) if psi is not None else None,
    )
