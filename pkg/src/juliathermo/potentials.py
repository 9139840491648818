"""Potentials: Hölder functions on the Julia set built from a few atoms.

A potential is a linear combination of

* ``tau``: ``log|f'|``
* ``theta``: ``arg f'``
* ``const``: the constant 1
* ``sym:b``: indicator of the piece of symbol ``b``
* tabulated functions, constant on cylinders of a fixed depth, possibly
  composed with ``f``.

Values are computed from a point together with its symbolic itinerary, so
tabulated atoms never need a search.

The string form accepted by :func:`parse_potential` is a sum of terms like
``-1.0*tau``, ``const:-0.6931`` or ``0.5*sym:0``; ``normalize(<expr>)``,
``conformal`` and ``max_entropy`` ask for normalization against a model.
"""

import re

import numpy as np

from .errors import ValidationError


class Atom:
    length = 1
    name = "?"

    def values(self, model, points, itin):
        raise NotImplementedError


class Const(Atom):
    name = "const"

    def values(self, model, points, itin):
        return np.ones(np.shape(points))


class Tau(Atom):
    name = "tau"

    def values(self, model, points, itin):
        return np.log(np.abs(model.fprime(itin[:, 0], points)))


class Theta(Atom):
    name = "theta"

    def values(self, model, points, itin):
        return np.angle(model.fprime(itin[:, 0], points))


class Indicator(Atom):
    def __init__(self, symbol):
        self.symbol = int(symbol)
        self.name = f"sym:{self.symbol}"

    def values(self, model, points, itin):
        return (itin[:, 0] == self.symbol).astype(float)


class Tabulated:
    """Function constant on the cylinders of words of length ``depth + 1``.

    ``values[r]`` belongs to the word of lexicographic rank ``r``.
    """

    def __init__(self, model, depth, values):
        self.model = model
        self.depth = int(depth)
        self.values = np.asarray(values, float)
        if self.values.size != model.word_count(depth):
            raise ValidationError("tabulated values do not match the word count", field="values")

    def lookup(self, itin):
        return self.values[self.model.rank(itin[:, : self.depth + 1])]

    def at(self, z):
        """Values at arbitrary points via nearest representative."""
        itin = self.model.tree.locate(z, self.depth + 1)
        return self.lookup(itin)


class TabAtom(Atom):
    """``tab`` composed with ``f`` ``shift`` times (``shift`` 0 or 1)."""

    def __init__(self, tab, shift=0, label="tab"):
        self.tab = tab
        self.shift = int(shift)
        self.length = tab.depth + 1 + self.shift
        self.name = f"{label} o f" if shift else label

    def values(self, model, points, itin):
        return self.tab.lookup(itin[:, self.shift:])


TAU, THETA, CONST = Tau(), Theta(), Const()
_FAST = (Const, Tau, Theta)


class Potential:
    """Linear combination ``sum c_i * atom_i``.

    Parameters
    ----------
    terms : sequence of (float, Atom)
    label : str, optional
        String form; defaults to one generated from the terms.
    normalized : bool
        Set by normalization: ``L_phi 1 = 1`` on the tabulation depth.
    """

    def __init__(self, terms, label=None, normalized=False, info=None):
        merged = {}
        order = []
        for c, atom in terms:
            key = id(atom) if not isinstance(atom, _FAST) else type(atom).__name__
            if key not in merged:
                merged[key] = [0.0, atom]
                order.append(key)
            merged[key][0] += float(c)
        self.terms = tuple((merged[k][0], merged[k][1]) for k in order)
        self._label = label
        self.normalized = normalized
        self.info = {} if info is None else dict(info)
        self._cache = {}

    # -- algebra ----------------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = constant(other)
        return Potential(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return Potential([(-c, a) for c, a in self.terms])

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, s):
        s = float(s)
        return Potential([(s * c, a) for c, a in self.terms])

    __rmul__ = __mul__

    # -- evaluation -------------------------------------------------------------
    @property
    def itinerary_length(self):
        return max([a.length for _, a in self.terms] + [1])

    @property
    def label(self):
        if self._label is not None:
            return self._label
        parts = []
        for c, a in self.terms:
            parts.append(f"const:{c!r}" if isinstance(a, Const) else f"{c!r}*{a.name}")
        return " + ".join(parts) if parts else "const:0.0"

    def __repr__(self):
        return f"Potential({self.label!r})"

    def evaluate(self, model, points, itin):
        """Values at ``points`` whose itineraries are the rows of ``itin``."""
        points = np.asarray(points, complex)
        out = np.zeros(points.shape)
        for c, a in self.terms:
            if c != 0:
                out += c * a.values(model, points, itin)
        return out

    def __call__(self, model, z):
        z = np.atleast_1d(np.asarray(z, complex))
        itin = model.tree.locate(z, self.itinerary_length)
        return self.evaluate(model, z, itin)

    def on_level(self, model, k):
        """Values at the representatives of words of length ``k + 1``."""
        tree = model.tree
        return self.evaluate(model, tree.level(k).points, tree.itineraries(k, self.itinerary_length))

    def birkhoff_level(self, model, k):
        """``S_k phi(x_a)`` for all words of length ``k + 1``."""
        key = (model, k)
        if key in self._cache:
            return self._cache[key]
        tree = model.tree
        lv = tree.level(k)
        out = np.zeros(len(lv))
        slow = []
        for c, a in self.terms:
            if c == 0:
                continue
            if isinstance(a, Const):
                out += c * k
            elif isinstance(a, Tau):
                out += c * lv.logder.real
            elif isinstance(a, Theta):
                out += c * lv.logder.imag
            else:
                slow.append((c, a))
        if slow:
            rest = Potential(slow)
            L = rest.itinerary_length
            acc = np.zeros(len(tree.level(0)))
            for j in range(1, k + 1):
                lj = tree.level(j)
                acc = rest.evaluate(model, lj.points, tree.itineraries(j, L)) + acc[lj.parent]
            out += acc
        self._cache[key] = out
        return out


def constant(c):
    return Potential([(float(c), CONST)])


def tau(c=1.0):
    return Potential([(float(c), TAU)])


def theta(c=1.0):
    return Potential([(float(c), THETA)])


def indicator(symbol, c=1.0):
    return Potential([(float(c), Indicator(symbol))])


# ---------------------------------------------------------------------------
# string form
# ---------------------------------------------------------------------------
_NUM = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


class _Parser:
    def __init__(self, text):
        self.s = text
        self.i = 0

    def error(self, msg):
        raise ValidationError(f"potential {self.s!r}: {msg} at position {self.i}", field="potential")

    def ws(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self, lit):
        self.ws()
        return self.s.startswith(lit, self.i)

    def take(self, lit):
        if self.peek(lit):
            self.i += len(lit)
            return True
        return False

    def number(self, signed=True):
        self.ws()
        m = _NUM.match(self.s, self.i)
        if not m or (not signed and m.group(0)[0] in "+-"):
            self.error("expected a number")
        self.i = m.end()
        return float(m.group(0))

    def expr(self):
        node = [self.term(1.0)]
        while True:
            if self.take("+"):
                node.append(self.term(1.0))
            elif self.take("-"):
                node.append(self.term(-1.0))
            else:
                return node

    def term(self, sign):
        if self.take("-"):
            sign = -sign
        else:
            self.take("+")
        self.ws()
        coef = sign
        if _NUM.match(self.s, self.i):
            coef *= self.number(signed=False)
            if not self.take("*"):
                return ("const", coef)
        return self.atom(coef)

    def atom(self, coef):
        if self.take("normalize("):
            inner = self.expr()
            if not self.take(")"):
                self.error("expected ')'")
            return ("normalize", coef, inner)
        if self.take("conformal"):
            return ("conformal", coef)
        if self.take("max_entropy"):
            return ("max_entropy", coef)
        if self.take("const:"):
            return ("const", coef * self.number())
        if self.take("sym:"):
            return ("sym", coef, int(self.number(signed=False)))
        for name in ("tau", "theta"):
            if self.take(name):
                return (name, coef)
        self.error("expected an atom (tau, theta, const:<v>, sym:<b>, normalize(...), conformal, max_entropy)")


def _build(nodes, model, depth):
    parts = []
    for node in nodes:
        kind = node[0]
        if kind == "const":
            parts.append(constant(node[1]))
        elif kind == "tau":
            parts.append(tau(node[1]))
        elif kind == "theta":
            parts.append(theta(node[1]))
        elif kind == "sym":
            parts.append(indicator(node[2], node[1]))
        else:
            if model is None:
                raise ValidationError("normalization needs a model", field="potential")
            from .thermo import conformal_potential, max_entropy_potential, normalize

            if kind == "normalize":
                phi = normalize(model, _build(node[2], model, depth), depth)
            elif kind == "max_entropy":
                phi = max_entropy_potential(model, depth)
            else:
                phi = conformal_potential(model, depth)
            parts.append(phi if node[1] == 1.0 else phi * node[1])
    total = parts[0]
    for q in parts[1:]:
        total = total + q
    return total


def parse_potential(text, model=None, depth=10):
    """Build a potential from its string form.

    ``normalize(...)``, ``conformal`` and ``max_entropy`` are resolved against ``model`` with
    tabulation depth ``depth``.

    Examples
    --------
    >>> parse_potential("-1.0*tau").label
    '-1.0*tau'
    """
    p = _Parser(str(text))
    nodes = p.expr()
    p.ws()
    if p.i != len(p.s):
        p.error("unexpected trailing input")
    pot = _build(nodes, model, depth)
    if all(n[0] in ("const", "tau", "theta", "sym") for n in nodes):
        pot._label = str(text).strip()
    return pot
