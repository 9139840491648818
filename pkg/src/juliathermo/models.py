"""Ready-made models used by tests, demos and the command line."""

import numpy as np

from .maps import RationalMap
from .symbolic import AffineBranches, MarkovModel, RationalBranches, build_full_shift_model


def quadratic_full_shift(c=5.0, radius=None):
    """Full shift on two symbols for ``z**2 + c`` with ``|c|`` large.

    The disk is ``B(0, sqrt|c| + 1)`` unless ``radius`` is given; this works
    once ``|c|`` exceeds the square of the golden ratio.
    """
    if radius is None:
        radius = abs(c) ** 0.5 + 1
    return build_full_shift_model(RationalMap.quadratic(c), 0.0, radius, name=f"z^2+{c}")


def circle_model(radius=0.9):
    """Four quarter arcs of the unit circle for ``z**2``.

    Arc ``a`` covers angles ``[a, a+1] * pi/2`` and maps onto arcs ``2a`` and
    ``2a+1`` (mod 4). Centers sit a third of the way along each arc, so no
    forward orbit of a center hits an arc endpoint.
    """
    fmap = RationalMap([0, 0, 1])
    M = np.zeros((4, 4), int)
    for a in range(4):
        M[a, (2 * a) % 4] = M[a, (2 * a + 1) % 4] = 1
    x = np.exp(1j * (np.arange(4) + 1 / 3) * np.pi / 2)
    mid = np.exp(1j * (np.arange(4) + 0.5) * np.pi / 2)
    seeds = np.full((4, 4), np.nan + 0j)
    for a in range(4):
        for b in range(4):
            if M[a, b]:
                r = np.sqrt(x[b])
                seeds[a, b] = r if a * np.pi / 2 <= np.angle(r) % (2 * np.pi) <= (a + 1) * np.pi / 2 else -r
    rP = 2 * np.sin(np.pi / 8)
    br = RationalBranches(fmap, seeds, x, mid, np.full(4, radius))
    return MarkovModel(M, x, np.full(4, rP), np.full(4, 0.5 * (rP + radius)), np.full(4, radius), br, disk_centers=mid, name="circle z^2")


def middle_thirds_cantor():
    """Middle-thirds Cantor set as the attractor of ``z/3`` and ``z/3 + 2/3``."""
    br = AffineBranches([1 / 3, 1 / 3], [0.0, 2 / 3])
    return MarkovModel(
        np.ones((2, 2), int),
        [0.0, 1.0],
        [1 / 6, 1 / 6],
        [0.2, 0.2],
        [0.25, 0.25],
        br,
        disk_centers=[1 / 6, 5 / 6],
        name="middle thirds",
    )
