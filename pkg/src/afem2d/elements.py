"""Lagrange P1, P2 and P3 elements on triangles.

Shape functions are polynomials in the barycentric coordinates
``(l1, l2, l3)``. Physical derivatives follow from the chain rule with the
constant gradients of ``l1, l2, l3`` on each triangle, so first and second
derivatives are exact.

Local numbering
---------------
P1: vertices 1..3.
P2: vertices, then the midpoints of sides 1, 2, 3 (side ``i`` opposite vertex ``i``).
P3: vertices, then two nodes per side (sides 1, 2, 3 in turn, each pair
ordered counterclockwise along the side), then the centroid.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .mesh import signed_area

SELECTORS = (".val", ".dx", ".dy", ".dxx", ".dyy", ".dxy")
N_LOCAL = {1: 3, 2: 6, 3: 10}

# side i runs from vertex _SIDE[i][0] to vertex _SIDE[i][1] counterclockwise
_SIDE = ((1, 2), (2, 0), (0, 1))


def barycentric_gradients(mesh):
    """Gradients of the barycentric coordinates on every triangle.

    Returns
    -------
    Dlambda : ndarray, shape (NT, 3, 2)
        ``Dlambda[t, i]`` is the constant gradient of ``l_i`` on triangle ``t``.
    area : ndarray, shape (NT,)
    """
    node, elem = mesh.node, mesh.elem
    area = signed_area(node, elem)
    if np.any(np.abs(area) <= 1e-300):
        raise ValueError("degenerate triangle with zero area")
    Dlambda = np.empty((len(elem), 3, 2))
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        d = node[elem[:, k]] - node[elem[:, j]]  # side opposite vertex i
        Dlambda[:, i, 0] = -d[:, 1] / (2 * area)
        Dlambda[:, i, 1] = d[:, 0] / (2 * area)
    return Dlambda, area


# -- shape functions as polynomials in (l1, l2, l3) ---------------------------
# A polynomial is a dict {(a, b, c): coefficient} for l1^a l2^b l3^c.


def _linear(coefs, const=0.0):
    poly = {(0, 0, 0): const} if const else {}
    for i, c in enumerate(coefs):
        if c:
            e = [0, 0, 0]
            e[i] = 1
            poly[tuple(e)] = c
    return poly


def _mul(*polys):
    out = {(0, 0, 0): 1.0}
    for p in polys:
        res = {}
        for (e1, c1), (e2, c2) in product(out.items(), p.items()):
            e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
            res[e] = res.get(e, 0.0) + c1 * c2
        out = res
    return out


def _lam(i, scale=1.0, shift=0.0):
    """The linear form ``scale * l_i + shift``."""
    coefs = [0.0, 0.0, 0.0]
    coefs[i] = scale
    return _linear(coefs, shift)


@lru_cache(maxsize=None)
def _shape_polys(k):
    if k == 1:
        return tuple(_lam(i) for i in range(3))
    if k == 2:
        vert = [_mul(_lam(i), _lam(i, 2.0, -1.0)) for i in range(3)]
        edge = [_mul({(0, 0, 0): 4.0}, _lam(s), _lam(t)) for s, t in _SIDE]
        return tuple(vert + edge)
    if k == 3:
        vert = [_mul({(0, 0, 0): 0.5}, _lam(i), _lam(i, 3.0, -1.0), _lam(i, 3.0, -2.0)) for i in range(3)]
        edge = []
        for s, t in _SIDE:
            base = _mul({(0, 0, 0): 4.5}, _lam(s), _lam(t))
            edge.append(_mul(base, _lam(s, 3.0, -1.0)))  # node at l_s = 2/3
            edge.append(_mul(base, _lam(t, 3.0, -1.0)))  # node at l_t = 2/3
        bubble = _mul({(0, 0, 0): 27.0}, _lam(0), _lam(1), _lam(2))
        return tuple(vert + edge + [bubble])
    raise ValueError(f"unsupported element degree {k!r}; expected 1, 2 or 3")


def _diff(poly, i):
    out = {}
    for e, c in poly.items():
        if e[i]:
            d = list(e)
            d[i] -= 1
            out[tuple(d)] = out.get(tuple(d), 0.0) + c * e[i]
    return out


def _evaluate(poly, lam):
    val = np.zeros(len(lam))
    for (a, b, c), coef in poly.items():
        val += coef * lam[:, 0] ** a * lam[:, 1] ** b * lam[:, 2] ** c
    return val


def _reference_tables(k, lam):
    """Values, barycentric gradients and Hessians of the shape functions at `lam`."""
    polys = _shape_polys(k)
    nk, nG = len(polys), len(lam)
    val = np.empty((nk, nG))
    grad = np.empty((nk, nG, 3))
    hess = np.empty((nk, nG, 3, 3))
    for a, p in enumerate(polys):
        val[a] = _evaluate(p, lam)
        for i in range(3):
            pi = _diff(p, i)
            grad[a, :, i] = _evaluate(pi, lam)
            for j in range(3):
                hess[a, :, i, j] = _evaluate(_diff(pi, j), lam)
    return val, grad, hess


def basis_eval(k, lam, wStr, mesh, Dlambda=None):
    """Shape functions of degree `k` (or a derivative) at barycentric points.

    Parameters
    ----------
    k : {1, 2, 3}
    lam : array_like, shape (nG, 3)
        Barycentric coordinates of the evaluation points, shared by all triangles.
    wStr : str
        One of ``.val``, ``.dx``, ``.dy``, ``.dxx``, ``.dyy``, ``.dxy``.
    mesh : Mesh or FeMesh
    Dlambda : ndarray, optional
        Precomputed :func:`barycentric_gradients`.

    Returns
    -------
    base : ndarray, shape (n_k, NT, nG)
        ``base[i][t, g]`` is the selected quantity of local shape function ``i``
        on triangle ``t`` at point ``g``.
    """
    if wStr not in SELECTORS:
        raise ValueError(f"invalid selector {wStr!r}; expected one of {SELECTORS}")
    lam = np.atleast_2d(np.asarray(lam, dtype=float))
    val, grad, hess = _reference_tables(k, lam)
    NT = len(mesh.elem)
    if wStr == ".val":
        return np.broadcast_to(val[:, None, :], (len(val), NT, len(lam)))
    if Dlambda is None:
        Dlambda, _ = barycentric_gradients(mesh)
    if wStr in (".dx", ".dy"):
        c = 0 if wStr == ".dx" else 1
        # sum_i dphi/dl_i * dl_i/dx
        return np.einsum("agi,ti->atg", grad, Dlambda[:, :, c])
    c1, c2 = {".dxx": (0, 0), ".dyy": (1, 1), ".dxy": (0, 1)}[wStr]
    return np.einsum("agij,ti,tj->atg", hess, Dlambda[:, :, c1], Dlambda[:, :, c2])


@dataclass(frozen=True)
class FeSpace:
    """Global degrees of freedom of a Lagrange space.

    ``elem2dof[t, i]`` is the global index of local shape function ``i`` on
    triangle ``t``; ``dof_coords`` holds the nodal point of every dof.
    """

    degree: int
    ndof: int
    elem2dof: np.ndarray
    dof_coords: np.ndarray
    edge2dof: np.ndarray  # NE x (k - 1); edge dofs ordered from edge[:, 0] to edge[:, 1]

    @property
    def n_local(self):
        return N_LOCAL[self.degree]


def build_dof_map(fe_mesh, k):
    """Number the dofs: vertices, then edge nodes, then element interiors."""
    if k not in N_LOCAL:
        raise ValueError(f"unsupported element degree {k!r}; expected 1, 2 or 3")
    node, elem, edge, elem2edge = fe_mesh.node, fe_mesh.elem, fe_mesh.edge, fe_mesh.elem2edge
    N, NE, NT = len(node), len(edge), len(elem)
    if k == 1:
        elem2dof = elem.copy()
        edge2dof = np.empty((NE, 0), dtype=np.int64)
        coords = node.copy()
    elif k == 2:
        elem2dof = np.hstack([elem, N + elem2edge])
        edge2dof = (N + np.arange(NE))[:, None]
        coords = np.vstack([node, 0.5 * (node[edge[:, 0]] + node[edge[:, 1]])])
    else:
        parts = [elem]
        for i, (s, t) in enumerate(_SIDE):
            e = elem2edge[:, i]
            forward = elem[:, s] < elem[:, t]
            first = N + 2 * e + np.where(forward, 0, 1)
            second = N + 2 * e + np.where(forward, 1, 0)
            parts.append(np.column_stack([first, second]))
        parts.append((N + 2 * NE + np.arange(NT))[:, None])
        elem2dof = np.hstack(parts)
        edge2dof = N + 2 * np.arange(NE)[:, None] + np.array([0, 1])
        a, b = node[edge[:, 0]], node[edge[:, 1]]
        edge_pts = np.empty((2 * NE, 2))
        edge_pts[0::2] = (2 * a + b) / 3
        edge_pts[1::2] = (a + 2 * b) / 3
        coords = np.vstack([node, edge_pts, node[elem].mean(axis=1)])
    ndof = len(coords)
    for arr in (elem2dof, edge2dof, coords):
        arr.setflags(write=False)
    return FeSpace(degree=k, ndof=ndof, elem2dof=elem2dof, dof_coords=coords, edge2dof=edge2dof)


def interpolate(func, space):
    """Nodal interpolant of ``func(p) -> values`` (``p`` is ``n x 2``)."""
    return np.asarray(func(space.dof_coords), dtype=float).reshape(space.ndof)
