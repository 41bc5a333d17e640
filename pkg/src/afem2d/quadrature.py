"""Gaussian quadrature rules in barycentric form.

Three kinds of rules are provided:

* :func:`quadpts1` -- Gauss-Legendre on the unit interval, points as
  barycentric pairs ``(r, 1 - r)`` sorted by increasing ``r``.
* :func:`quadpts2` -- symmetric rules on the reference triangle with strictly
  positive weights.
* :func:`quadptsBd` -- the 1D rule laid out on the three sides of a triangle,
  side ``i`` being the one opposite vertex ``i``.

Weights are normalized to sum to one; multiply by the length or area of the
physical cell to integrate.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_ORDER = 8

# Default integration order per Lagrange degree.
DEFAULT_QUAD_ORDER = {1: 3, 2: 4, 3: 5}


@dataclass(frozen=True)
class QuadRule1D:
    lambda1d: np.ndarray  # (ng, 2)
    weight1d: np.ndarray  # (ng,)

    @property
    def ng(self):
        return len(self.weight1d)


@dataclass(frozen=True)
class QuadRule2D:
    lam: np.ndarray  # (nG, 3)
    weight: np.ndarray  # (nG,)

    @property
    def n_points(self):
        return len(self.weight)


@dataclass(frozen=True)
class QuadRuleBd:
    lambdaBd: np.ndarray  # (3 ng, 3)
    weightBd: np.ndarray  # (3 ng,), weight1d tiled once per side

    @property
    def ng(self):
        return len(self.weightBd) // 3


def _check_order(order):
    if int(order) != order or not 1 <= order <= MAX_ORDER:
        raise ValueError(f"unsupported quadrature order {order!r}; expected 1..{MAX_ORDER}")
    return int(order)


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@lru_cache(maxsize=None)
def quadpts1(order):
    """Gauss-Legendre rule on [0, 1] exact for polynomials of degree <= `order`.

    Returns a :class:`QuadRule1D` whose ``lambda1d`` rows are ``(r_j, 1 - r_j)``
    with ``r_1 < r_2 < ... < r_ng``.
    """
    order = _check_order(order)
    ng = (order + 2) // 2  # 2*ng - 1 >= order
    x, w = np.polynomial.legendre.leggauss(ng)
    r = 0.5 * (x + 1.0)
    idx = np.argsort(r)
    r, w = r[idx], 0.5 * w[idx]
    # Symmetrize so that r_j + r_{ng+1-j} == 1 holds to the last bit.
    r = 0.5 * (r + (1.0 - r[::-1]))
    w = 0.5 * (w + w[::-1])
    return QuadRule1D(_frozen(np.column_stack([r, 1.0 - r])), _frozen(w))


# Symmetric positive-weight triangle rules. Each orbit is one of
#   ("c", w)        centroid
#   ("s2", a, w)    the 3 permutations of (a, b, b), b = (1 - a) / 2
#   ("s3", a, b, w) the 6 permutations of (a, b, 1 - a - b)
# Values refined against exact monomial moments to ~1e-16.
_TRIANGLE_ORBITS = {
    1: [("c", 1.0)],
    2: [("s2", 0.0, 1.0 / 3.0)],  # side midpoints
    4: [
        ("s2", 0.10810301816807012, 0.2233815896780112),
        ("s2", 0.8168475729804581, 0.10995174365532213),
    ],
    5: [
        ("c", 0.225),
        ("s2", 0.05971587178976774, 0.13239415278850367),
        ("s2", 0.7974269853530868, 0.12593918054482767),
    ],
    6: [
        ("s2", 0.5014265096581663, 0.11678627572636754),
        ("s2", 0.8738219710169994, 0.05084490637020425),
        ("s3", 0.053145049844822274, 0.3103524510337787, 0.08285107561838076),
    ],
    8: [
        ("c", 0.144315607677787),
        ("s2", 0.081414823414554, 0.095091634267285),
        ("s2", 0.65886138449648, 0.103217370534718),
        ("s2", 0.898905543365938, 0.032458497623198),
        ("s3", 0.008394777409958, 0.263112829634638, 0.027230314174435),
    ],
}
# Orders without a dedicated symmetric positive rule use the next richer one.
# Order 3 in particular avoids the classical 4-point rule with a negative weight.
_TRIANGLE_RULE_FOR_ORDER = {1: 1, 2: 2, 3: 4, 4: 4, 5: 5, 6: 6, 7: 8, 8: 8}


def _expand_orbits(orbits):
    pts, wts = [], []
    for orbit in orbits:
        kind = orbit[0]
        if kind == "c":
            pts.append((1 / 3, 1 / 3, 1 / 3))
            wts.append(orbit[1])
        elif kind == "s2":
            a, w = orbit[1:]
            b = 0.5 * (1.0 - a)
            pts += [(a, b, b), (b, a, b), (b, b, a)]
            wts += [w] * 3
        else:
            a, b, w = orbit[1:]
            c = 1.0 - a - b
            pts += [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]
            wts += [w] * 6
    lam = np.array(pts)
    lam[:, 2] = 1.0 - lam[:, 0] - lam[:, 1]
    w = np.array(wts)
    return lam, w / w.sum()


@lru_cache(maxsize=None)
def quadpts2(order):
    """Symmetric triangle rule exact for total degree <= `order`, positive weights."""
    order = _check_order(order)
    lam, w = _expand_orbits(_TRIANGLE_ORBITS[_TRIANGLE_RULE_FOR_ORDER[order]])
    return QuadRule2D(_frozen(lam), _frozen(w))


@lru_cache(maxsize=None)
def quadptsBd(order):
    """Points of :func:`quadpts1` placed on the three sides of a triangle.

    Block ``i`` (rows ``i*ng:(i+1)*ng``) lies on the side opposite vertex
    ``i`` and walks it in the counterclockwise direction: side 1 from vertex
    2 to vertex 3, side 2 from vertex 3 to vertex 1, side 3 from vertex 1 to
    vertex 2.
    """
    rule = quadpts1(order)
    lam1, w1 = rule.lambda1d, rule.weight1d
    ng = len(w1)
    zero = np.zeros(ng)
    lambdae1 = np.column_stack([zero, lam1[:, 1], lam1[:, 0]])
    lambdae2 = np.column_stack([lam1[:, 0], zero, lam1[:, 1]])
    lambdae3 = 1.0 - lambdae1 - lambdae2
    lambdae3[:, 2] = 0.0  # r_j + r_{ng+1-j} == 1 up to rounding
    lambdaBd = np.vstack([lambdae1, lambdae2, lambdae3])
    return QuadRuleBd(_frozen(lambdaBd), _frozen(np.tile(w1, 3)))
