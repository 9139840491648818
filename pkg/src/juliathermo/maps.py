"""Rational maps of the sphere seen in a bounded chart.

Evaluation with a pole floor, critical points, preimages, attracting
cycles and a sampled hyperbolicity certificate.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import NoConvergence, NotCertified, PoleProximity, ValidationError

POLE_FLOOR = 1e-12
ESCAPE_RADIUS = 1e8
# a cycle counts as attracting only if its multiplier is this far inside the unit disk
ATTRACT_MARGIN = 1e-6


def _as_complex_coeffs(c, name):
    arr = np.asarray(c)
    if arr.ndim == 2 and arr.shape[1] == 2 and not np.iscomplexobj(arr):
        arr = arr[:, 0] + 1j * arr[:, 1]
    try:
        arr = np.asarray(arr, dtype=complex).ravel()
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name}: coefficients must be numbers", field=name) from exc
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name}: coefficients must be finite and non-empty", field=name)
    nz = np.nonzero(arr)[0]
    if nz.size == 0:
        raise ValidationError(f"{name}: polynomial is identically zero", field=name)
    return arr[: nz[-1] + 1]


class RationalMap:
    """Rational map ``f = num / den`` with ascending complex coefficients.

    Parameters
    ----------
    num, den : array_like
        Ascending coefficients. Either complex numbers or ``[re, im]`` pairs.

    Examples
    --------
    >>> f = RationalMap([5, 0, 1])
    >>> f(0.0)
    (5+0j)
    """

    def __init__(self, num, den=(1.0,)):
        self.num = _as_complex_coeffs(num, "num")
        self.den = _as_complex_coeffs(den, "den")
        self.degree = max(self.num.size, self.den.size) - 1
        if self.degree < 2:
            raise ValidationError("degree must be at least 2", field="num")
        self._dnum = npoly.polyder(self.num) if self.num.size > 1 else np.zeros(1, complex)
        self._dden = npoly.polyder(self.den) if self.den.size > 1 else np.zeros(1, complex)
        self._check_coprime()

    def _check_coprime(self):
        if self.den.size < 2:
            return
        roots = np.roots(self.den[::-1])
        scale = np.abs(self.num).sum()
        for r in roots:
            s = np.abs(self.num * r ** np.arange(self.num.size)).sum()
            if abs(npoly.polyval(r, self.num)) <= 1e-10 * max(s, scale):
                raise ValidationError("numerator and denominator share a root (zero resultant)", field="den")

    @classmethod
    def quadratic(cls, c):
        """``z**2 + c``."""
        return cls([c, 0.0, 1.0])

    # -- evaluation ---------------------------------------------------------
    def eval(self, z):
        """Return ``(f(z), f'(z))``; raise PoleProximity near a pole."""
        z = np.asarray(z, dtype=complex)
        n = npoly.polyval(z, self.num)
        d = npoly.polyval(z, self.den)
        if np.any(np.abs(d) < POLE_FLOOR):
            raise PoleProximity(f"|den| < {POLE_FLOOR:g} near z={np.ravel(z)[np.argmin(np.abs(np.ravel(d)))]}")
        dn = npoly.polyval(z, self._dnum)
        dd = npoly.polyval(z, self._dden)
        return n / d, (dn * d - n * dd) / (d * d)

    def __call__(self, z):
        return self.eval(z)[0]

    def derivative(self, z):
        return self.eval(z)[1]

    def _eval_scalar(self, z):
        # Horner on python complex, several times faster than numpy for scalars
        n = 0j
        dn = 0j
        for c in self.num[::-1]:
            dn = dn * z + n
            n = n * z + c
        d = 0j
        dd = 0j
        for c in self.den[::-1]:
            dd = dd * z + d
            d = d * z + c
        if abs(d) < POLE_FLOOR:
            raise PoleProximity(f"|den| < {POLE_FLOOR:g} near z={z}")
        return n / d, (dn * d - n * dd) / (d * d)

    # -- structure ------------------------------------------------------------
    @property
    def infinity_multiplier(self):
        """Multiplier of the fixed point at infinity, or None if not fixed."""
        dn, dd = self.num.size - 1, self.den.size - 1
        if dn >= dd + 2:
            return 0j
        if dn == dd + 1:
            return complex(self.den[-1] / self.num[-1])
        return None

    @property
    def infinity_attracting(self):
        m = self.infinity_multiplier
        return m is not None and abs(m) < 1 - ATTRACT_MARGIN

    def critical_points(self):
        """Finite critical points (with multiplicity removed) as an array."""
        w = npoly.polysub(npoly.polymul(self._dnum, self.den), npoly.polymul(self.num, self._dden))
        w = np.trim_zeros(np.asarray(w, complex), "b")
        if w.size <= 1:
            return np.zeros(0, complex)
        roots = np.roots(w[::-1])
        out = []
        for r in roots:
            if all(abs(r - q) > 1e-9 * (1 + abs(r)) for q in out):
                out.append(r)
        return np.array(sorted(out, key=lambda c: (round(c.real, 12), round(c.imag, 12))))

    def critical_values(self):
        return self(self.critical_points())

    def preimages(self, z):
        """All ``degree`` preimages of each point in ``z``; shape ``(..., d)``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        d = self.degree
        num = np.zeros(d + 1, complex)
        den = np.zeros(d + 1, complex)
        num[: self.num.size] = self.num
        den[: self.den.size] = self.den
        q = num[None, :] - z.ravel()[:, None] * den[None, :]
        lead = q[:, -1]
        if np.any(np.abs(lead) < POLE_FLOOR):
            raise PoleProximity("a preimage lies at infinity")
        comp = np.zeros((q.shape[0], d, d), complex)
        comp[:, 1:, :-1] = np.eye(d - 1)
        comp[:, :, -1] = -q[:, :-1] / lead[:, None]
        return np.linalg.eigvals(comp).reshape(z.shape + (d,))

    # -- serialization --------------------------------------------------------
    def to_dict(self):
        return {
            "num": [[float(c.real), float(c.imag)] for c in self.num],
            "den": [[float(c.real), float(c.imag)] for c in self.den],
        }

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict) or "num" not in d:
            raise ValidationError("map JSON needs 'num' (and optionally 'den')", field="map")
        return cls(d["num"], d.get("den", [[1.0, 0.0]]))

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return f"RationalMap(num={self.num.tolist()}, den={self.den.tolist()})"


def evaluate(fmap, z):
    """Functional form of :meth:`RationalMap.eval`."""
    return fmap.eval(z)


@dataclass(frozen=True)
class Cycle:
    """Attracting periodic orbit; ``points`` start at a canonical rotation."""

    period: int
    points: tuple
    multiplier: complex

    @property
    def at_infinity(self):
        return np.isinf(self.points[0])


def _canonical(points):
    keys = [(round(p.real, 8), round(p.imag, 8)) for p in points]
    k = keys.index(min(keys))
    pts = [complex(p) for p in points]
    return tuple(pts[k:] + pts[:k])


def _refine_cycle(fmap, z, p, tol):
    """Newton on ``f^p(w) - w`` started at ``z``; returns (points, multiplier)."""
    w = z
    for _ in range(60):
        pts = []
        u, du = w, 1.0 + 0j
        for _ in range(p):
            pts.append(u)
            u, d = fmap._eval_scalar(u)
            du *= d
        g = u - w
        if du == 1:
            break
        step = g / (du - 1)
        w = w - step
        if abs(step) <= 1e-15 * (1 + abs(w)):
            break
    pts = []
    u, mult = w, 1.0 + 0j
    for _ in range(p):
        pts.append(u)
        u, d = fmap._eval_scalar(u)
        mult *= d
    if abs(u - w) > max(tol, 1e-12 * (1 + abs(w))):
        return None, None
    return pts, mult


def _settle(fmap, z, max_period, max_iter, tol):
    """Follow one forward orbit; return ('inf', n) | ('cycle', Cycle, n) | (None, n)."""
    hist = []
    candidate = None
    for n in range(max_iter):
        try:
            z, _ = fmap._eval_scalar(z)
        except PoleProximity:
            z = complex(np.inf)
        if not np.isfinite(z) or abs(z) > ESCAPE_RADIUS:
            if fmap.infinity_attracting:
                return "inf", n
            return None, n
        if candidate is not None:
            if min(abs(z - q) for q in candidate.points) < tol:
                return "cycle", candidate, n
            continue
        hist.append(z)
        if len(hist) > max_period + 1:
            hist.pop(0)
        if n % 16 or len(hist) <= max_period:
            continue
        for p in range(1, max_period + 1):
            if abs(hist[-1] - hist[-1 - p]) < 1e-6 * (1 + abs(z)):
                pts, mult = _refine_cycle(fmap, z, p, tol)
                if pts is not None and abs(mult) < 1 - ATTRACT_MARGIN:
                    candidate = Cycle(p, _canonical(pts), complex(mult))
                break
    return None, max_iter


def find_attracting_cycles(fmap, max_period=16, seeds=None, max_iter=20000, tol=1e-10):
    """Attracting cycles reached by forward orbits of ``seeds``.

    Default seeds are the finite critical points. An orbit is credited to a
    cycle only after it comes within ``tol`` of it, which rules out
    parabolic (sub-geometric) convergence inside the budget.

    Returns
    -------
    list of Cycle
        Deduplicated up to rotation; infinity is included when it is an
        attracting fixed point.
    """
    if seeds is None:
        seeds = fmap.critical_points()
    seeds = list(np.atleast_1d(np.asarray(seeds, complex)))
    cycles = []
    settled = 0
    for s in seeds:
        status, *rest = _settle(fmap, complex(s), max_period, max_iter, tol)
        if status == "cycle":
            settled += 1
            cyc = rest[0]
            if not any(c.period == cyc.period and abs(c.points[0] - cyc.points[0]) < 1e-7 for c in cycles if not c.at_infinity):
                cycles.append(cyc)
        elif status == "inf":
            settled += 1
    if fmap.infinity_attracting:
        cycles.append(Cycle(1, (complex(np.inf),), fmap.infinity_multiplier))
    if settled == 0 and seeds:
        raise NoConvergence("no seed orbit settled on an attracting cycle within budget")
    return cycles


def julia_sample(fmap, count=512, seed=0, burn_in=64):
    """Points near the Julia set by random backward iteration."""
    rng = np.random.default_rng(seed)
    crit = fmap.critical_values()
    scale = 1.0 + (np.abs(crit).max() if crit.size else 0.0)
    z = scale * (0.3 + 0.4 * rng.random(count)) * np.exp(2j * np.pi * rng.random(count))
    for _ in range(burn_in):
        pre = fmap.preimages(z)
        pick = rng.integers(0, fmap.degree, size=count)
        z = pre[np.arange(count), pick]
    return z


@dataclass(frozen=True)
class HyperbolicityCertificate:
    """Sampled expansion constants: ``c0 kappa**n <= |(f^n)'| <= kappa1**n``."""

    c0: float
    kappa: float
    kappa1: float
    n_max: int
    neighborhood_radius: float
    cycles: tuple
    seed: int
    sample_size: int
    log_min: tuple = field(repr=False, default=())
    log_max: tuple = field(repr=False, default=())

    def to_dict(self):
        return {
            "c0": self.c0,
            "kappa": self.kappa,
            "kappa1": self.kappa1,
            "n_max": self.n_max,
            "neighborhood_radius": self.neighborhood_radius,
            "seed": self.seed,
            "sample_size": self.sample_size,
            "cycles": [
                {
                    "period": c.period,
                    "points": [[float(p.real), float(p.imag)] if np.isfinite(p) else "inf" for p in c.points],
                    "multiplier": [float(c.multiplier.real), float(c.multiplier.imag)],
                }
                for c in self.cycles
            ],
        }


def log_derivative_growth(fmap, z, n_max):
    """``log|(f^n)'(z)|`` for n = 1..n_max, shape ``(n_max, len(z))``."""
    z = np.asarray(z, complex).copy()
    out = np.empty((n_max, z.size))
    acc = np.zeros(z.size)
    for n in range(n_max):
        fz, dz = fmap.eval(z)
        acc = acc + np.log(np.abs(dz))
        out[n] = acc
        z = fz
    return out


def certify_hyperbolic(fmap, max_iter=20000, max_period=16, n_max=10, sample_size=1024, seed=0, neighborhood_radius=1e-9):
    """Check critical orbits settle and fit expansion constants on a Julia sample.

    Raises
    ------
    NotCertified
        If a critical orbit fails to converge geometrically to an attracting
        cycle within ``max_iter`` steps, or the fitted ``kappa <= 1``.
    """
    crit = fmap.critical_points()
    for c in crit:
        status, *_ = _settle(fmap, complex(c), max_period, max_iter, 1e-10)
        if status is None:
            raise NotCertified(f"critical orbit of {complex(c):.6g} does not converge geometrically to an attracting cycle within {max_iter} steps")
    try:
        cycles = find_attracting_cycles(fmap, max_period, crit, max_iter)
    except NoConvergence as exc:
        raise NotCertified(str(exc)) from exc

    rng = np.random.default_rng(seed)
    x = julia_sample(fmap, sample_size, seed)
    pert = x + neighborhood_radius * np.exp(2j * np.pi * rng.random(x.size))
    growth = log_derivative_growth(fmap, np.concatenate([x, pert]), n_max)
    lo = growth.min(axis=1)
    hi = growth.max(axis=1)
    n = np.arange(1, n_max + 1)
    # slowest per-step growth over the second half of the horizon; the
    # transient of the first steps is absorbed into c0
    half = n_max // 2
    log_kappa = float(np.min(lo[half:] / n[half:]))
    if log_kappa <= 1e-9:
        raise NotCertified(f"fitted expansion rate kappa={np.exp(log_kappa):.6g} is not above 1")
    log_c0 = min(0.0, float(np.min(lo - n * log_kappa)))
    log_kappa1 = max(float(np.max(hi / n)), log_kappa + 1e-12)
    return HyperbolicityCertificate(
        c0=float(np.exp(log_c0)),
        kappa=float(np.exp(log_kappa)),
        kappa1=float(np.exp(log_kappa1)),
        n_max=n_max,
        neighborhood_radius=neighborhood_radius,
        cycles=tuple(cycles),
        seed=seed,
        sample_size=sample_size,
        log_min=tuple(lo.tolist()),
        log_max=tuple(hi.tolist()),
    )
