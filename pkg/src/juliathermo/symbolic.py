"""Markov models: alphabets, transition matrices, inverse branches and the
tree of cylinder representatives.

A word is a row of symbols ``a_1 ... a_{n+1}`` with ``M[a_i, a_{i+1}] = 1``.
Its representative is ``x_a = g_a(x_{a_{n+1}})`` where ``x_b`` is the
center of symbol ``b`` and ``g_a`` the composed inverse branch.
"""

import json

import numpy as np
from scipy.spatial import cKDTree

from .errors import BranchLost, NotFullShift, ValidationError
from .maps import RationalMap

NEWTON_TOL = 1e-12


# ---------------------------------------------------------------------------
# branch oracles
# ---------------------------------------------------------------------------
class AffineBranches:
    """Contractions ``g_a(z) = scale[a] * z + shift[a]`` for every allowed pair."""

    kind = "affine"

    def __init__(self, scale, shift):
        self.scale = np.asarray(scale, complex)
        self.shift = np.asarray(shift, complex)
        if np.any(np.abs(self.scale) >= 1) or np.any(self.scale == 0):
            raise ValidationError("affine scales must satisfy 0 < |s| < 1", field="affine.scale")

    def inverse(self, a, b, z):
        z = np.asarray(z, complex)
        return self.scale[a] * z + self.shift[a], np.full(z.shape, self.scale[a])

    def fprime(self, a, w):
        return np.broadcast_to(1.0 / self.scale[a], np.shape(w)).astype(complex)

    def to_dict(self):
        return {"scale": _cplx_list(self.scale), "shift": _cplx_list(self.shift)}


class RationalBranches:
    """Inverse branches of a rational map picked out by seeds and disks.

    ``seeds[a, b]`` is ``g_ab(centers[b])``; Newton on ``f(w) = z`` from the
    linear predictor finds the branch, and membership of the result in the
    disk of symbol ``a`` certifies that the right preimage was found.
    """

    kind = "rational"

    def __init__(self, fmap, seeds, centers, disk_centers, radii):
        self.fmap = fmap
        self.seeds = np.asarray(seeds, complex)
        self.centers = np.asarray(centers, complex)
        self.disk_centers = np.asarray(disk_centers, complex)
        self.radii = np.asarray(radii, float)
        with np.errstate(all="ignore"):
            self.dseeds = np.where(np.isfinite(self.seeds), 1.0 / fmap.derivative(np.nan_to_num(self.seeds)), 0)

    def _newton(self, w, z):
        f = self.fmap
        for _ in range(40):
            fw, dfw = f.eval(w)
            step = (fw - z) / dfw
            w = w - step
            if np.all(np.abs(step) <= 1e-15 * (1 + np.abs(w))):
                break
        fw = f(w)
        ok = np.abs(fw - z) <= NEWTON_TOL * (1 + np.abs(z))
        return w, ok

    def _inside(self, a, w):
        return np.abs(w - self.disk_centers[a]) <= self.radii[a] * (1 + 1e-9)

    def inverse(self, a, b, z):
        z = np.asarray(z, complex)
        shape = z.shape
        z = z.ravel()
        w0 = self.seeds[a, b] + self.dseeds[a, b] * (z - self.centers[b])
        w, ok = self._newton(w0, z)
        ok &= self._inside(a, w)
        if not np.all(ok):
            idx = np.nonzero(~ok)[0]
            w2, ok2 = self._continue(a, b, z[idx])
            if not np.all(ok2):
                bad = z[idx][~ok2][0]
                raise BranchLost(f"branch ({a},{b}) lost at z={complex(bad):.6g}")
            w[idx] = w2
        return w.reshape(shape), (1.0 / self.fmap.derivative(w)).reshape(shape)

    def _continue(self, a, b, z, steps=64):
        # straight-line continuation from the symbol center
        xb = self.centers[b]
        w = np.full(z.shape, self.seeds[a, b])
        ok = np.ones(z.shape, bool)
        for s in range(1, steps + 1):
            zs = xb + (z - xb) * (s / steps)
            w, ok = self._newton(w, zs)
        return w, ok & self._inside(a, w)

    def fprime(self, a, w):
        return self.fmap.derivative(w)

    def to_dict(self):
        return {"map": self.fmap.to_dict()}


def _cplx_list(arr):
    return [[float(c.real), float(c.imag)] for c in np.asarray(arr, complex).ravel()]


def _cplx_array(obj, name):
    try:
        arr = np.asarray(obj, float)
        if arr.ndim >= 1 and arr.shape[-1] == 2:
            return arr[..., 0] + 1j * arr[..., 1]
    except (TypeError, ValueError):
        pass
    raise ValidationError(f"{name}: expected [re, im] pairs", field=name)


# ---------------------------------------------------------------------------
# the model
# ---------------------------------------------------------------------------
class MarkovModel:
    """Finite Markov model for a hyperbolic map restricted to its Julia set.

    Parameters
    ----------
    matrix : (A, A) array of 0/1
        Transition matrix; must be mixing.
    centers : (A,) complex
        Point ``x_a`` of the piece ``P_a``; representatives are built on them.
    r_P, r_U, r_D : (A,) float
        Radii of nested disks around ``disk_centers`` standing in for the
        piece, its neighborhood and the injectivity domain.
    branches : RationalBranches or AffineBranches
    domain : tuple, optional
        ``(center, radius)`` of a single disk on which every branch is
        defined (full shifts). Otherwise branch ``g_ab`` accepts the disk of
        ``b``.
    """

    def __init__(self, matrix, centers, r_P, r_U, r_D, branches, disk_centers=None, domain=None, alphabet=None, name=""):
        M = np.asarray(matrix)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 2:
            raise ValidationError("transition matrix must be square with at least 2 symbols", field="matrix")
        if not np.all((M == 0) | (M == 1)):
            raise ValidationError("transition matrix must be 0/1", field="matrix")
        self.matrix = M.astype(np.int8)
        A = M.shape[0]
        if not is_mixing(self.matrix):
            raise ValidationError("transition matrix is not mixing", field="matrix")
        self.centers = np.asarray(centers, complex).reshape(A)
        self.disk_centers = self.centers.copy() if disk_centers is None else np.asarray(disk_centers, complex).reshape(A)
        self.r_P = np.asarray(r_P, float).reshape(A)
        self.r_U = np.asarray(r_U, float).reshape(A)
        self.r_D = np.asarray(r_D, float).reshape(A)
        if not (np.all(self.r_P <= self.r_U) and np.all(self.r_U <= self.r_D)):
            raise ValidationError("radii must satisfy r_P <= r_U <= r_D", field="radii")
        self.branches = branches
        self.domain = domain
        self.alphabet = [str(i) for i in range(A)] if alphabet is None else [str(s) for s in alphabet]
        self.name = name
        self._cnt = None
        self._tree = None

    # -- basic combinatorics --------------------------------------------------
    @property
    def size(self):
        return self.matrix.shape[0]

    @property
    def map(self):
        return getattr(self.branches, "fmap", None)

    @property
    def is_full_shift(self):
        return bool(np.all(self.matrix == 1))

    def word_count(self, n):
        """Number of admissible words of length ``n + 1``."""
        v = np.ones(self.size, dtype=object)
        Mo = self.matrix.astype(object)
        for _ in range(n):
            v = Mo.dot(v)
        return int(sum(v))

    def _counts(self, length):
        if self._cnt is None or len(self._cnt) <= length:
            cnt = [np.zeros(self.size, np.int64), np.ones(self.size, np.int64)]
            M = self.matrix.astype(np.int64)
            for _ in range(2, max(length, 2) + 1):
                cnt.append(M @ cnt[-1])
            self._cnt = cnt
        return self._cnt

    def rank(self, words):
        """Lexicographic rank of admissible words of a common length."""
        w = np.atleast_2d(np.asarray(words, np.int64))
        L = w.shape[1]
        cnt = self._counts(L)
        M = self.matrix.astype(np.int64)
        # first[m][v] = sum_{s<v} cnt[m][s]; after[m][p, v] = sum_{s<v} M[p,s] cnt[m][s]
        first = np.concatenate([[0], np.cumsum(cnt[L])])[:-1]
        r = first[w[:, 0]].copy()
        for i in range(1, L):
            row = M * cnt[L - i][None, :]
            after = np.concatenate([np.zeros((self.size, 1), np.int64), np.cumsum(row, axis=1)], axis=1)[:, :-1]
            r += after[w[:, i - 1], w[:, i]]
        return r

    def admissible(self, word):
        w = np.asarray(word)
        return bool(np.all(self.matrix[w[:-1], w[1:]] == 1))

    def enumerate_words(self, n):
        """All admissible words of length ``n + 1`` in lexicographic order."""
        words = np.arange(self.size, dtype=np.uint8)[:, None]
        for _ in range(n):
            rows, cols = np.nonzero(self.matrix[words[:, -1]])
            words = np.hstack([words[rows], cols.astype(np.uint8)[:, None]])
        return words

    def iter_words(self, n, start=0, stop=None):
        """Iterate over words of length ``n + 1``; ``start``/``stop`` are ranks."""
        words = self.enumerate_words(n)
        for w in words[start:stop]:
            yield tuple(int(s) for s in w)

    def format_word(self, word):
        return ".".join(self.alphabet[int(s)] for s in word)

    def parse_word(self, text):
        index = {s: i for i, s in enumerate(self.alphabet)}
        try:
            w = [index[s] for s in str(text).split(".")]
        except KeyError as exc:
            raise ValidationError(f"unknown symbol {exc} in word {text!r}", field="word") from exc
        if not self.admissible(w):
            raise ValidationError(f"word {text!r} is not admissible", field="word")
        return np.array(w, np.uint8)

    # -- branches -------------------------------------------------------------
    def branch(self, a, b, z):
        """One-step inverse branch ``g_ab`` and its derivative."""
        if not self.matrix[a, b]:
            raise ValidationError(f"transition {a}->{b} not allowed", field="word")
        return self.branches.inverse(a, b, z)

    def fprime(self, symbols, w):
        """Forward derivative at ``w`` lying in the piece of ``symbols``."""
        w = np.asarray(w, complex)
        s = np.broadcast_to(np.asarray(symbols), w.shape)
        if self.branches.kind == "rational":
            return self.branches.fprime(None, w)
        out = np.empty(w.shape, complex)
        for a in np.unique(s):
            m = s == a
            out[m] = self.branches.fprime(int(a), w[m])
        return out

    def in_domain(self, b, z):
        z = np.asarray(z, complex)
        if self.domain is not None:
            c, R = self.domain
            return np.abs(z - c) <= R
        return np.abs(z - self.disk_centers[b]) <= self.r_D[b] * (1 + 1e-9)

    def domain_disk(self, b):
        if self.domain is not None:
            return self.domain
        return self.disk_centers[b], self.r_D[b]

    def check_containment(self, samples=64):
        """Worst relative margin of sampled ``g_ab(D_b)`` inside ``D_a``.

        Positive means inside. Raises BranchLost if a branch cannot be
        followed over the sampled boundary.
        """
        th = np.exp(2j * np.pi * np.arange(samples) / samples)
        worst = np.inf
        for a in range(self.size):
            for b in range(self.size):
                if not self.matrix[a, b]:
                    continue
                c, R = self.domain_disk(b)
                w, _ = self.branch(a, b, c + R * (1 - 1e-9) * th)
                dist = np.abs(w - self.disk_centers[a])
                worst = min(worst, float(np.min(1 - dist / self.r_D[a])))
        return worst

    @property
    def tree(self):
        if self._tree is None:
            self._tree = CylinderTree(self)
        return self._tree

    # -- serialization --------------------------------------------------------
    def to_dict(self):
        A = self.size
        seeds = []
        for a in range(A):
            row = []
            for b in range(A):
                if self.matrix[a, b]:
                    w, _ = self.branch(a, b, self.centers[b])
                    row.append([float(w.real), float(w.imag)])
                else:
                    row.append(None)
            seeds.append(row)
        d = {
            "name": self.name,
            "alphabet": list(self.alphabet),
            "matrix": self.matrix.astype(int).tolist(),
            "centers": _cplx_list(self.centers),
            "disk_centers": _cplx_list(self.disk_centers),
            "radii": {"P": self.r_P.tolist(), "U": self.r_U.tolist(), "D": self.r_D.tolist()},
            "seeds": seeds,
        }
        if self.domain is not None:
            d["domain"] = {"center": [float(np.real(self.domain[0])), float(np.imag(self.domain[0]))], "radius": float(self.domain[1])}
        if self.branches.kind == "affine":
            d["affine"] = self.branches.to_dict()
        else:
            d["map"] = self.branches.fmap.to_dict()
        return d

    def to_json(self, indent=None):
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d, check=True):
        for key in ("matrix", "centers", "radii"):
            if key not in d:
                raise ValidationError(f"model JSON is missing '{key}'", field=key)
        M = np.asarray(d["matrix"])
        A = M.shape[0] if M.ndim == 2 else 0
        centers = _cplx_array(d["centers"], "centers")
        disk_centers = _cplx_array(d["disk_centers"], "disk_centers") if "disk_centers" in d else None
        radii = d["radii"]
        try:
            rP, rU, rD = (np.asarray(radii[k], float) for k in ("P", "U", "D"))
        except (KeyError, TypeError) as exc:
            raise ValidationError("radii needs P, U and D lists", field="radii") from exc
        domain = None
        if "domain" in d:
            domain = (complex(*d["domain"]["center"]), float(d["domain"]["radius"]))
        if "affine" in d:
            br = AffineBranches(_cplx_array(d["affine"]["scale"], "affine.scale"), _cplx_array(d["affine"]["shift"], "affine.shift"))
        elif "map" in d:
            fmap = RationalMap.from_dict(d["map"])
            if "seeds" not in d:
                raise ValidationError("rational model JSON needs a branch-seed table", field="seeds")
            seeds = np.full((A, A), np.nan + 0j)
            for a, row in enumerate(d["seeds"]):
                for b, s in enumerate(row):
                    if s is not None:
                        seeds[a, b] = complex(*s)
            if np.any(np.isnan(seeds[M == 1])):
                raise ValidationError("missing seeds for allowed transitions", field="seeds")
            br = RationalBranches(fmap, seeds, centers, centers if disk_centers is None else disk_centers, rD)
        else:
            raise ValidationError("model JSON needs 'map' or 'affine'", field="map")
        model = cls(M, centers, rP, rU, rD, br, disk_centers=disk_centers, domain=domain, alphabet=d.get("alphabet"), name=d.get("name", ""))
        if check:
            try:
                margin = model.check_containment()
            except BranchLost as exc:
                raise ValidationError(f"branch images leave their disks: {exc}", field="radii") from exc
            if margin < 0:
                raise ValidationError(f"sampled branch images leave their disks (margin {margin:.3g})", field="radii")
        return model

    @classmethod
    def from_json(cls, text, check=True):
        return cls.from_dict(json.loads(text), check=check)

    def __repr__(self):
        return f"MarkovModel(name={self.name!r}, size={self.size}, branches={self.branches.kind})"


def is_mixing(M):
    A = M.shape[0]
    P = (M > 0).astype(np.int64)
    Q = P.copy()
    for _ in range((A - 1) ** 2 + 1):
        if np.all(Q > 0):
            return True
        Q = np.minimum(Q @ P, 1)
    return bool(np.all(Q > 0))


# ---------------------------------------------------------------------------
# words and branches
# ---------------------------------------------------------------------------
def enumerate_words(model, n):
    return model.enumerate_words(n)


def word_count(model, n):
    return model.word_count(n)


def inverse_branch(model, word, z):
    """Composed branch ``g_a`` of ``word`` at ``z`` and its derivative."""
    word = [int(s) for s in word]
    if not model.admissible(word):
        raise ValidationError("word is not admissible", field="word")
    z = np.asarray(z, complex)
    if not np.all(model.in_domain(word[-1], z)):
        raise ValidationError("point outside the branch domain of the last symbol", field="z")
    w = z
    dg = np.ones(z.shape, complex)
    for j in range(len(word) - 2, -1, -1):
        w, d = model.branch(word[j], word[j + 1], w)
        dg = dg * d
    return w, dg


def pull_back(model, words, z):
    """Pull ``z`` back along many words sharing their last symbol.

    Returns points ``g_a(z)`` and ``log g_a'(z)`` where the imaginary part is
    the accumulated (unwrapped) argument.
    """
    words = np.atleast_2d(np.asarray(words, np.int64))
    N, L = words.shape
    w = np.broadcast_to(np.asarray(z, complex), (N,)).copy()
    logd = np.zeros(N, complex)
    for j in range(L - 2, -1, -1):
        pair = words[:, j] * model.size + words[:, j + 1]
        for p in np.unique(pair):
            m = pair == p
            wn, d = model.branch(int(p // model.size), int(p % model.size), w[m])
            w[m] = wn
            logd[m] += np.log(d)
    return w, logd


def cylinder_geometry(model, word, boundary_points=64):
    """Push the boundary of the last symbol's domain through ``g_word``.

    Returns
    -------
    dict
        ``center`` (representative), ``inner`` and ``outer`` radius of the
        image curve about it, ``derivative`` ``|g'|`` at the symbol center
        and ``distortion`` ``log(outer / inner)``.
    """
    word = [int(s) for s in word]
    c, R = model.domain_disk(word[-1])
    bd = c + R * (1 - 1e-9) * np.exp(2j * np.pi * np.arange(boundary_points) / boundary_points)
    img, _ = inverse_branch(model, word, bd)
    x, dg = inverse_branch(model, word, model.centers[word[-1]])
    dist = np.abs(img - x)
    return {
        "center": complex(x),
        "inner": float(dist.min()),
        "outer": float(dist.max()),
        "derivative": float(abs(dg)),
        "distortion": float(np.log(dist.max() / dist.min())),
    }


# ---------------------------------------------------------------------------
# cylinder tree
# ---------------------------------------------------------------------------
class Level:
    """Words of length ``k + 1`` with their representatives.

    Attributes
    ----------
    words : (N, k+1) uint8
    points : (N,) complex
        Representatives ``x_a``.
    parent : (N,) int
        Index in level ``k-1`` of the shifted word, so
        ``points[k-1][parent] == f(points)``.
    prefix : (N,) int
        Index in level ``k-1`` of the word with its last symbol dropped.
    logder : (N,) complex
        ``log (f^k)'(x_a)``: real part ``S_k tau``, imaginary part the
        unwrapped ``S_k theta``.
    """

    def __init__(self, k, words, points, parent, prefix, logder):
        self.k = k
        self.words = words
        self.points = points
        self.parent = parent
        self.prefix = prefix
        self.logder = logder

    def __len__(self):
        return self.points.size


class CylinderTree:
    """Levels of representatives built by prepending symbols."""

    def __init__(self, model):
        self.model = model
        A = model.size
        self.levels = [Level(0, np.arange(A, dtype=np.uint8)[:, None], model.centers.copy(), np.full(A, -1), np.full(A, -1), np.zeros(A, complex))]
        self._itin = {}
        self._kd = {}

    def level(self, k):
        while len(self.levels) <= k:
            self.levels.append(self._grow(self.levels[-1]))
        return self.levels[k]

    def _grow(self, prev):
        model = self.model
        first = prev.words[:, 0]
        words, points, parent, logder = [], [], [], []
        for c in range(model.size):
            idx = np.nonzero(model.matrix[c, first])[0]
            if idx.size == 0:
                continue
            w = np.empty(idx.size, complex)
            lf = np.empty(idx.size, complex)
            for b in np.unique(first[idx]):
                m = first[idx] == b
                wb, _ = model.branch(c, int(b), prev.points[idx[m]])
                w[m] = wb
                lf[m] = np.log(model.fprime(c, wb))
            words.append(np.hstack([np.full((idx.size, 1), c, np.uint8), prev.words[idx]]))
            points.append(w)
            parent.append(idx)
            logder.append(lf + prev.logder[idx])
        words = np.vstack(words)
        k = prev.k + 1
        prefix = model.rank(words[:, :-1]) if k > 1 else words[:, 0].astype(np.int64)
        return Level(k, words, np.concatenate(points), np.concatenate(parent), prefix, np.concatenate(logder))

    def diameters(self, k):
        """First-order diameter estimate of the Julia piece of each word."""
        lv = self.level(k)
        last = lv.words[:, -1]
        return 2 * self.model.r_P[last] * np.exp(-lv.logder.real)

    def center_itinerary(self, b, length):
        """Symbolic itinerary of the center of symbol ``b``."""
        key = (b, length)
        if key not in self._itin:
            m = self.model
            if m.matrix[b, b] and abs(m.branch(b, b, m.centers[b])[0] - m.centers[b]) < 1e-12 * (1 + abs(m.centers[b])):
                it = np.full(length, b, np.uint8)
            else:
                lv = self.level(length - 1)
                cand = np.nonzero(lv.words[:, 0] == b)[0]
                j = cand[np.argmin(np.abs(lv.points[cand] - m.centers[b]))]
                it = lv.words[j].copy()
            self._itin[key] = it
        return self._itin[key]

    def itineraries(self, k, length):
        """Itineraries of length ``length`` for the representatives at level ``k``.

        The word supplies the first ``k`` symbols; the remainder is the
        itinerary of the center the word was built on.
        """
        lv = self.level(k)
        if length <= k + 1:
            return lv.words[:, :length]
        tail = length - k
        ext = np.vstack([self.center_itinerary(b, tail) for b in range(self.model.size)])
        return np.hstack([lv.words[:, :k], ext[lv.words[:, -1]]])

    def locate(self, z, length):
        """Itineraries of arbitrary points by nearest representative."""
        k = length - 1
        if k not in self._kd:
            p = self.level(k).points
            self._kd[k] = cKDTree(np.column_stack([p.real, p.imag]))
        z = np.atleast_1d(np.asarray(z, complex))
        _, j = self._kd[k].query(np.column_stack([z.real, z.imag]))
        return self.level(k).words[j]


# ---------------------------------------------------------------------------
# automatic full-shift models
# ---------------------------------------------------------------------------
def _match(prev, cur):
    """Reorder ``cur`` so each entry continues the nearest entry of ``prev``."""
    d = np.abs(prev[:, None] - cur[None, :])
    j = np.argmin(d, axis=1)
    if len(set(j.tolist())) != len(j):
        return None
    return cur[j]


def _winding(curve, p):
    ang = np.angle(np.roll(curve, -1) - p) - np.angle(curve - p)
    ang = (ang + np.pi) % (2 * np.pi) - np.pi
    return int(round(ang.sum() / (2 * np.pi)))


def build_full_shift_model(fmap, center, radius, boundary_points=720, depth_probe=8, name=""):
    """Full-shift model when every branch of ``f^{-1}`` maps ``D`` into itself.

    Parameters
    ----------
    fmap : RationalMap
    center, radius : complex, float
        The disk ``D``. Symbols are the ``d`` branches of ``f^{-1}`` on ``D``
        ordered by decreasing imaginary part of ``g_a(center)``.

    Raises
    ------
    NotFullShift
        If a critical value lies in the closed disk, a branch image leaves
        ``D`` or two branch images meet.
    """
    center = complex(center)
    cv = fmap.critical_values()
    if cv.size and np.any(np.abs(cv - center) <= radius):
        raise NotFullShift("a critical value lies in the closed disk, so inverse branches are not single valued")
    d = fmap.degree
    roots = fmap.preimages(center)[0]
    order = np.lexsort((roots.real, -roots.imag))
    roots = roots[order]

    # follow every preimage along a ray to the boundary and once around it
    path = np.concatenate([
        center + radius * np.linspace(0, 1, 65)[1:],
        center + radius * np.exp(2j * np.pi * np.arange(1, boundary_points + 1) / boundary_points),
    ])
    cur = roots.copy()
    curves = []
    for z in path:
        nxt = _match(cur, fmap.preimages(z)[0])
        if nxt is None:
            raise NotFullShift("preimage tracking became ambiguous along the boundary")
        cur = nxt
        curves.append(cur)
    track = np.array(curves)
    # track[63] images the boundary start point, track[-1] the same point after one loop
    if np.any(np.abs(track[-1] - track[63]) > 1e-8 * (1 + radius)):
        raise NotFullShift("nontrivial monodromy around the boundary")
    curves = track[63:-1].T  # (d, boundary_points)
    dist_in = np.abs(curves - center)
    if np.any(dist_in >= radius):
        raise NotFullShift("a branch image of the disk is not compactly inside the disk")
    for a in range(d):
        for b in range(d):
            if a != b:
                if _winding(curves[b], roots[a]) != 0:
                    raise NotFullShift("branch images are nested")
                if np.min(np.abs(curves[a][:, None] - curves[b][None, :])) <= 0:
                    raise NotFullShift("branch images touch")

    # provisional branches centered at the preimages of the disk center
    rD0 = np.array([np.abs(curves[a] - roots[a]).max() for a in range(d)])
    seeds0 = np.repeat(roots[:, None], d, axis=1)
    br = RationalBranches(fmap, seeds0, np.full(d, center), roots, rD0 * 1.0001)
    x = roots.copy()
    for a in range(d):
        w = np.array([roots[a]])
        for _ in range(200):
            wn, _ = br.inverse(a, a, w)
            if abs(wn[0] - w[0]) < 1e-15 * (1 + abs(w[0])):
                w = wn
                break
            w = wn
        x[a] = w[0]
    rD = np.array([np.abs(curves[a] - x[a]).max() for a in range(d)]) * 1.0001
    for a in range(d):
        for b in range(d):
            if a != b and np.min(np.abs(curves[b] - x[a])) <= rD[a]:
                raise NotFullShift("disk proxies of distinct branches overlap")
    seeds = np.empty((d, d), complex)
    for a in range(d):
        for b in range(d):
            seeds[a, b] = br._continue(a, a, np.array([x[b]]), steps=64)[0][0]
    br = RationalBranches(fmap, seeds, x, x, rD)
    model = MarkovModel(np.ones((d, d), int), x, rD, rD, rD, br, domain=(center, float(radius)), name=name)
    lv = model.tree.level(depth_probe)
    first_sym = lv.words[:, 0]
    rP = np.array([np.abs(lv.points[first_sym == a] - x[a]).max() for a in range(d)]) * 1.05
    rP = np.minimum(rP, rD)
    rU = 0.5 * (rP + rD)
    out = MarkovModel(np.ones((d, d), int), x, rP, rU, rD, br, domain=(center, float(radius)), name=name)
    out._tree = model._tree
    out._tree.model = out
    return out
