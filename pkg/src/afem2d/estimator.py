"""Residual a posteriori error indicator for the Poisson problem.

For each triangle ``K``::

    eta_K^2 = h_K^2 ||f + lap(u_h)||_K^2 + sum_{e in dK} h_e ||[du_h/dn_e]||_e^2

The jump terms are evaluated on the side quadrature points of every element.
Each edge owns ``2 * ng`` slots in a global array of size ``2 * NE * ng``:
slots ``e*ng .. e*ng + ng - 1`` hold the trace from the element on the left
of the edge (walking from its smaller to its larger vertex), and the same
slots shifted by ``NE * ng`` hold the trace from the right element, listed
in the same order along the edge. Scattering the interior ("minus") values
of all elements into this array and reading it back at the complementary
("plus") slots gives each element the trace of its neighbour. Boundary
edges only have a left element, so their plus values are zero.

Indices here are 0-based; the slot layout is otherwise the one described
above.
"""

from dataclasses import dataclass

import numpy as np

from .assembly import integral2d, interp2dMat
from .elements import basis_eval
from .quadrature import quadpts1, quadptsBd


@dataclass(frozen=True)
class EdgeQuadIndex:
    elemQuadM: np.ndarray  # (NT, 3 ng) interior slots
    elemQuadP: np.ndarray  # (NT, 3 ng) exterior slots
    ng: int
    NE: int

    @property
    def size(self):
        return 2 * self.NE * self.ng


@dataclass(frozen=True)
class EdgeEvaluations:
    elemuhM: np.ndarray
    elemuhP: np.ndarray
    elemnx: np.ndarray
    elemny: np.ndarray


@dataclass(frozen=True)
class Indicator:
    elemRes: np.ndarray
    elemJump: np.ndarray
    eta: np.ndarray

    @property
    def global_eta(self):
        return float(np.sqrt(np.sum(self.eta**2)))


def residual_term(fe_mesh, space, uh, f, quadOrder):
    """Element residuals ``h_K^2 * ||f + lap(u_h)||_{0,K}^2``."""
    fc = interp2dMat(f, ".val", fe_mesh, space, quadOrder)
    uxxc = interp2dMat(uh, ".dxx", fe_mesh, space, quadOrder)
    uyyc = interp2dMat(uh, ".dyy", fe_mesh, space, quadOrder)
    _, elemIh = integral2d(fe_mesh, (fc + uxxc + uyyc) ** 2, space, quadOrder)
    return fe_mesh.diameter**2 * elemIh


def edge_quad_index(fe_mesh, ng):
    """Interior and exterior slot indices of the side quadrature points.

    Side ``i`` of element ``t`` uses the left block of its edge, in order,
    when its counterclockwise direction agrees with the edge direction (or
    the edge is on the boundary), and the right block, reversed, otherwise.
    """
    NE = fe_mesh.NE
    sgnelem = fe_mesh.sgnelem
    natural = np.arange(ng)
    reversed_ = np.arange(ng)[::-1] + NE * ng
    blocks = []
    for i in range(3):
        e = fe_mesh.elem2edge[:, i]
        ids = np.where((sgnelem[:, i] < 0)[:, None], reversed_[None, :], natural[None, :])
        blocks.append(ids + e[:, None] * ng)
    elemQuadM = np.hstack(blocks)
    right = elemQuadM >= ng * NE
    elemQuadP = elemQuadM - ng * NE * right + ng * NE * ~right
    return EdgeQuadIndex(elemQuadM, elemQuadP, ng, NE)


def side_normals(fe_mesh, ng):
    """Outward unit normals per side, repeated over the ``ng`` points of each side."""
    node, elem = fe_mesh.node, fe_mesh.elem
    z1, z2, z3 = node[elem[:, 0]], node[elem[:, 1]], node[elem[:, 2]]
    nx, ny = [], []
    for e in (z2 - z3, z3 - z1, z1 - z2):
        e = e / np.linalg.norm(e, axis=1, keepdims=True)
        nx.append(np.repeat(-e[:, 1:2], ng, axis=1))
        ny.append(np.repeat(e[:, 0:1], ng, axis=1))
    return np.hstack(nx), np.hstack(ny)


def gather_exterior(elemuhM, index):
    """Exterior traces from interior traces via the global slot array."""
    uhI = np.zeros(index.size)
    uhI[index.elemQuadM] = elemuhM
    return uhI[index.elemQuadP]


def elem2edgeInterp(wStr, fe_mesh, uh, space, quadOrder, normals=False):
    """Interior and exterior traces of `uh` at the side quadrature points.

    Returns ``(elemuhM, elemuhP)``, or an :class:`EdgeEvaluations` that also
    carries the outward normals when ``normals=True``.
    """
    if wStr not in (".val", ".dx", ".dy"):
        raise ValueError(f"invalid selector {wStr!r} for edge traces")
    rule = quadptsBd(quadOrder)
    ng = rule.ng
    base = basis_eval(space.degree, rule.lambdaBd, wStr, fe_mesh)
    uh = np.asarray(uh, dtype=float)
    elemuhM = np.einsum("ta,atp->tp", uh[space.elem2dof], base)
    elemuhP = gather_exterior(elemuhM, edge_quad_index(fe_mesh, ng))
    if not normals:
        return elemuhM, elemuhP
    nx, ny = side_normals(fe_mesh, ng)
    return EdgeEvaluations(elemuhM, elemuhP, nx, ny)


def jump_integral(fe_mesh, jumpx, jumpy, nx, ny, weight1d, include_boundary=True):
    """``sum_sides h_e^2 * sum_g w_g (jump . n)^2`` for every element.

    `jumpx`, `jumpy`, `nx` and `ny` are ``(NT, 3 ng)`` tables laid out like
    the output of :func:`elem2edgeInterp`.
    """
    ng = len(weight1d)
    elemJump = np.zeros(fe_mesh.NT)
    for i in range(3):
        sl = slice(i * ng, (i + 1) * ng)
        hei = fe_mesh.he[fe_mesh.elem2edge[:, i]]
        jumpn = (jumpx[:, sl] * nx[:, sl] + jumpy[:, sl] * ny[:, sl]) ** 2
        term = hei * hei * (jumpn @ weight1d)
        if not include_boundary:
            term = np.where(fe_mesh.sgnelem[:, i] == 0, 0.0, term)
        elemJump += term
    return elemJump


def jump_term(fe_mesh, space, uh, quadOrder, include_boundary=True):
    """Normal-derivative jump contribution of every element.

    With `include_boundary` the sides on the domain boundary contribute the
    full interior normal derivative (the exterior trace is taken as zero).
    The usual estimator for Dirichlet problems leaves those sides out.
    """
    ex = elem2edgeInterp(".dx", fe_mesh, uh, space, quadOrder, normals=True)
    uhyM, uhyP = elem2edgeInterp(".dy", fe_mesh, uh, space, quadOrder)
    weight1d = quadpts1(quadOrder).weight1d
    return jump_integral(
        fe_mesh,
        ex.elemuhM - ex.elemuhP,
        uhyM - uhyP,
        ex.elemnx,
        ex.elemny,
        weight1d,
        include_boundary=include_boundary,
    )


def indicator(fe_mesh, space, uh, f, quadOrder, include_boundary=True):
    """Local error indicators ``eta_K`` combining residual and jump terms."""
    elemRes = residual_term(fe_mesh, space, uh, f, quadOrder)
    elemJump = jump_term(fe_mesh, space, uh, quadOrder, include_boundary=include_boundary)
    # abs guards against rules with negative weights
    eta = np.sqrt(np.abs(elemRes) + elemJump)
    return Indicator(elemRes=elemRes, elemJump=elemJump, eta=eta)
