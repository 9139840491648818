"""Counting how many complex values fall in thin strips, disks and
log-squares, and fitting the resulting non-concentration exponent."""

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientData, ZeroValue


def _values(z):
    z = np.asarray(z, complex).ravel()
    if z.size == 0:
        raise InsufficientData("empty value set")
    return z


def strip_count(values, a, theta, sigma):
    """``#{z : |Re(exp(i theta) z) - a| <= sigma}``."""
    z = _values(values)
    return int(np.sum(np.abs((np.exp(1j * theta) * z).real - a) <= sigma))


def disk_count(values, center, sigma):
    z = _values(values)
    return int(np.sum(np.abs(z - center) <= sigma))


def logsquare_count(values, center, sigma):
    """Values within ``sigma`` of ``center`` in both log-modulus and argument."""
    z = _values(values)
    if center == 0 or np.any(z == 0):
        raise ZeroValue("log-square counts need nonzero values")
    w = np.log(z / center)
    return int(np.sum((np.abs(w.real) <= sigma) & (np.abs(w.imag) <= sigma)))


def _bump(x):
    out = np.zeros_like(x)
    m = np.abs(x) < 1
    out[m] = np.exp(1 - 1 / (1 - x[m] ** 2))
    return out


def smoothed_strip_count(values, a, theta, sigma):
    """Smooth surrogate ``sum beta((Re(e^{i theta} z) - a) / sigma)``.

    ``beta`` is a bump with ``beta(0) = 1`` supported on ``(-1, 1)``, so the
    result lies between ``exp(-1/3)`` times the count at ``sigma/2`` and the
    count at ``sigma``.
    """
    z = _values(values)
    return float(_bump(((np.exp(1j * theta) * z).real - a) / sigma).sum())


def _best_offset(p_sorted, sigma):
    # largest number of projections in a window of width 2 sigma
    hi = np.searchsorted(p_sorted, p_sorted + 2 * sigma, side="right")
    cnt = hi - np.arange(p_sorted.size)
    i = int(np.argmax(cnt))
    return int(cnt[i]), float(p_sorted[i] + sigma)


def max_strip_counts(values, sigmas, theta_step=np.pi / 64, refine=8):
    """Supremum over strips of width ``2 sigma`` for each sigma.

    For a fixed direction the best offset is found exactly from sorted
    projections; directions are scanned on a grid of step ``theta_step`` and
    then refined by halving steps around the best one.

    Returns
    -------
    counts, a_star, theta_star : ndarray
    """
    z = _values(values)
    sigmas = np.atleast_1d(np.asarray(sigmas, float))
    best = np.zeros(sigmas.size, int)
    a_star = np.zeros(sigmas.size)
    t_star = np.zeros(sigmas.size)

    def scan(theta, j=None):
        p = np.sort((np.exp(1j * theta) * z).real)
        idx = range(sigmas.size) if j is None else [j]
        for i in idx:
            c, a = _best_offset(p, sigmas[i])
            if c > best[i]:
                best[i], a_star[i], t_star[i] = c, a, theta

    for theta in np.arange(0, np.pi, theta_step):
        scan(theta)
    for i in range(sigmas.size):
        step = theta_step / 2
        for _ in range(refine):
            t0 = t_star[i]
            for cand in (t0 - step, t0 + step):
                scan(cand, i)
            step /= 2
    return best, a_star, t_star


@dataclass
class NonconcReport:
    sigma: np.ndarray
    sup_count: np.ndarray
    a_star: np.ndarray
    theta_star: np.ndarray
    gamma_fit: float
    N: float
    gamma_config: float
    violations: list

    @property
    def passed(self):
        return not self.violations

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["sigma", "sup_count", "a_star", "theta_star"])
        for row in zip(self.sigma, self.sup_count, self.a_star, self.theta_star):
            w.writerow([repr(float(row[0])), int(row[1]), repr(float(row[2])), repr(float(row[3]))])
        return buf.getvalue()

    def to_dict(self):
        return {
            "gamma_fit": self.gamma_fit,
            "gamma_config": self.gamma_config,
            "N": self.N,
            "violations": self.violations,
            "passed": self.passed,
        }


def nonconc_exponent(values, sigmas, N=None, gamma_config=0.1, theta_step=np.pi / 64):
    """Check ``sup_strip #{z in strip} <= N sigma^gamma_config`` on a grid.

    ``N`` defaults to the number of values. ``gamma_fit`` is the log-log
    slope of the supremum count against sigma.
    """
    z = _values(values)
    sigmas = np.sort(np.atleast_1d(np.asarray(sigmas, float)))
    if sigmas.size < 2:
        raise InsufficientData("need at least two scales")
    N = float(z.size) if N is None else float(N)
    counts, a, t = max_strip_counts(z, sigmas, theta_step)
    gamma = float(np.polyfit(np.log(sigmas), np.log(np.maximum(counts, 1)), 1)[0])
    bound = N * sigmas**gamma_config
    viol = [float(s) for s, c, b in zip(sigmas, counts, bound) if c > b]
    return NonconcReport(sigmas, counts, a, t, gamma, N, gamma_config, viol)
