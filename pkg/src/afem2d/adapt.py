"""Doerfler marking and newest vertex bisection.

Every triangle carries its refinement edge implicitly: it is the side
opposite the first vertex, which is the newest vertex of the triangle.
Bisection inserts the midpoint ``m`` of that side and produces the children
``(m, v1, v2)`` and ``(m, v3, v1)``, so ``m`` becomes the newest vertex of
both and orientation is preserved.
"""

from dataclasses import dataclass

import numpy as np

from .mesh import Mesh, MeshError, mesh_edges


def mark(eta, theta):
    """Doerfler (bulk) marking.

    Returns the indices of the smallest set of elements, taken in order of
    decreasing ``eta``, whose squared indicators sum to at least
    ``theta * sum(eta**2)``. Ties are broken by element index.

    >>> mark(np.array([3.0, 2.0, 1.0]), 0.5)
    array([0])
    """
    eta = np.asarray(eta, dtype=float)
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    if np.any(eta < 0):
        raise ValueError("error indicators must be non-negative")
    if theta == 0.0 or eta.size == 0:
        return np.empty(0, dtype=np.int64)
    if theta == 1.0:
        return np.flatnonzero(eta > 0)
    eta2 = eta**2
    order = np.argsort(-eta2, kind="stable")
    cumulative = np.cumsum(eta2[order])
    threshold = theta * cumulative[-1]
    if threshold <= 0.0:
        return np.empty(0, dtype=np.int64)
    n = int(np.searchsorted(cumulative, threshold, side="left")) + 1
    return np.sort(order[:n])


@dataclass(frozen=True)
class RefinedMesh:
    mesh: Mesh
    parent: np.ndarray  # parent element of every new element
    generation: np.ndarray  # number of bisections since the input mesh's generation 0

    @property
    def node(self):
        return self.mesh.node

    @property
    def elem(self):
        return self.mesh.elem


def conformity_errors(mesh):
    """Describe conformity violations of `mesh`; empty list if conforming.

    Checks that no edge is shared by more than two triangles and that no
    vertex lies in the interior of another triangle's side (hanging node).
    """
    problems = []
    edge, _, counts = mesh_edges(mesh.elem)
    if np.any(counts > 2):
        problems.append(f"{int(np.sum(counts > 2))} edge(s) shared by more than two triangles")
    bd = edge[counts == 1]
    if len(bd):
        # A hanging node is an endpoint of single-sided edges lying strictly
        # inside another single-sided edge.
        p = mesh.node
        a, b = p[bd[:, 0]], p[bd[:, 1]]
        d = b - a
        length2 = np.einsum("ij,ij->i", d, d)
        candidates = np.unique(bd)
        for chunk in np.array_split(candidates, max(1, len(candidates) // 256)):
            q = p[chunk][:, None, :] - a[None, :, :]
            s = np.einsum("vij,ij->vi", q, d) / length2
            cross = q[:, :, 0] * d[:, 1] - q[:, :, 1] * d[:, 0]
            inside = (s > 1e-12) & (s < 1 - 1e-12) & (np.abs(cross) <= 1e-12 * length2)
            hits = np.flatnonzero(inside.any(axis=1))
            if hits.size:
                problems.append(f"hanging node {int(chunk[hits[0]])}")
                break
    return problems


def bisect(mesh, marked, generation=None):
    """Refine `mesh` by newest vertex bisection with conforming completion.

    Parameters
    ----------
    mesh : Mesh
        Conforming mesh whose refinement edges (sides opposite vertex 1) are
        compatibly labeled.
    marked : array_like of int or bool
        Elements to refine.
    generation : array_like, optional
        Generation of each input element (defaults to 0).

    Returns
    -------
    RefinedMesh
        Children appear grouped by parent, parents in input order.
    """
    node, elem = mesh.node, mesh.elem
    NT = len(elem)
    marked = np.asarray(marked)
    if marked.dtype == bool:
        marked = np.flatnonzero(marked)
    marked = marked.astype(np.int64)
    if marked.size and (marked.min() < 0 or marked.max() >= NT):
        raise IndexError("marked element index out of range")
    gen = np.zeros(NT, dtype=np.int64) if generation is None else np.asarray(generation, np.int64)

    edge, elem2edge, counts = mesh_edges(elem)
    if np.any(counts > 2):
        raise MeshError("non-conforming input mesh")
    NE = len(edge)

    # Completion: any element with a bisected side must bisect its refinement edge.
    cut = np.zeros(NE, dtype=bool)
    cut[elem2edge[marked, 0]] = True
    while True:
        touched = cut[elem2edge].any(axis=1)
        pending = touched & ~cut[elem2edge[:, 0]]
        if not pending.any():
            break
        cut[elem2edge[pending, 0]] = True

    cut_idx = np.flatnonzero(cut)
    midpoint = np.full(NE, -1, dtype=np.int64)
    midpoint[cut_idx] = len(node) + np.arange(len(cut_idx))
    new_node = np.vstack([node, 0.5 * (node[edge[cut_idx, 0]] + node[edge[cut_idx, 1]])])

    v1, v2, v3 = elem[:, 0], elem[:, 1], elem[:, 2]
    refine = cut[elem2edge[:, 0]]
    m = midpoint[elem2edge[:, 0]]
    left_cut = refine & cut[elem2edge[:, 2]]  # child (m, v1, v2), its refinement edge is side 3
    right_cut = refine & cut[elem2edge[:, 1]]  # child (m, v3, v1), its refinement edge is side 2
    p = midpoint[elem2edge[:, 2]]
    q = midpoint[elem2edge[:, 1]]

    # up to four children per parent, in a fixed slot order
    slots = np.full((NT, 4, 3), -1, dtype=np.int64)
    bisections = np.zeros((NT, 4), dtype=np.int64)
    keep = ~refine
    slots[keep, 0] = elem[keep]

    lo = refine & ~left_cut
    slots[lo, 0] = np.column_stack([m, v1, v2])[lo]
    bisections[lo, 0] = 1
    lc = left_cut
    slots[lc, 0] = np.column_stack([p, m, v1])[lc]
    slots[lc, 1] = np.column_stack([p, v2, m])[lc]
    bisections[lc, :2] = 2

    ro = refine & ~right_cut
    slots[ro, 2] = np.column_stack([m, v3, v1])[ro]
    bisections[ro, 2] = 1
    rc = right_cut
    slots[rc, 2] = np.column_stack([q, m, v3])[rc]
    slots[rc, 3] = np.column_stack([q, v1, m])[rc]
    bisections[rc, 2:] = 2

    used = slots[:, :, 0] >= 0
    parent = np.repeat(np.arange(NT), 4).reshape(NT, 4)[used]
    new_elem = slots[used]
    new_gen = gen[parent] + bisections[used]
    return RefinedMesh(Mesh(new_node, new_elem), parent, new_gen)


def uniform_refine(mesh, sweeps=1):
    """Bisect every element `sweeps` times."""
    gen = np.zeros(mesh.NT, dtype=np.int64)
    for _ in range(sweeps):
        out = bisect(mesh, np.arange(mesh.NT), gen)
        mesh, gen = out.mesh, out.generation
    return mesh
