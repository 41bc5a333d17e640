"""Triangular meshes and their auxiliary data structures.

A :class:`Mesh` is the pair ``(node, elem)``: an ``N x 2`` coordinate table
and an ``NT x 3`` table of counterclockwise vertex indices. Indices are
0-based in memory; the text format read and written here is 1-based.

:func:`build_fe_mesh` derives the edge-based topology used by assembly and
error estimation (:class:`FeMesh`). Local side ``i`` of a triangle is the one
opposite local vertex ``i``.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .predicate import parse_boundary_predicate


class MeshError(ValueError):
    pass


def signed_area(node, elem):
    """Signed area of every triangle; positive for counterclockwise ordering."""
    z1, z2, z3 = node[elem[:, 0]], node[elem[:, 1]], node[elem[:, 2]]
    d2 = z2 - z1
    d3 = z3 - z1
    return 0.5 * (d2[:, 0] * d3[:, 1] - d2[:, 1] * d3[:, 0])


@dataclass(frozen=True)
class Mesh:
    node: np.ndarray
    elem: np.ndarray

    def __post_init__(self):
        node = np.array(self.node, dtype=float)
        elem = np.array(self.elem, dtype=np.int64)
        if node.ndim != 2 or node.shape[1] != 2:
            raise MeshError(f"node must be N x 2, got shape {node.shape}")
        if elem.ndim != 2 or elem.shape[1] != 3:
            raise MeshError(f"elem must be NT x 3, got shape {elem.shape}")
        if elem.size and (elem.min() < 0 or elem.max() >= len(node)):
            raise MeshError("elem refers to a vertex that does not exist")
        node.setflags(write=False)
        elem.setflags(write=False)
        object.__setattr__(self, "node", node)
        object.__setattr__(self, "elem", elem)

    @property
    def N(self):
        return len(self.node)

    @property
    def NT(self):
        return len(self.elem)

    def area(self):
        return signed_area(self.node, self.elem)

    def centroids(self):
        return self.node[self.elem].mean(axis=1)

    def validate(self):
        """Raise :class:`MeshError` unless all triangles are counterclockwise."""
        a = self.area()
        scale = np.ptp(self.node, axis=0).max() ** 2 if self.N else 1.0
        bad = np.flatnonzero(a <= 1e-14 * scale)
        if bad.size:
            raise MeshError(
                f"{bad.size} degenerate or clockwise triangle(s), first is element {bad[0]}"
            )
        return self


def square_mesh(rect, h1, h2=None):
    """Structured triangulation of ``[x1, x2] x [y1, y2]``.

    Each cell is cut along its lower-left to upper-right diagonal. The first
    vertex of every triangle is the one opposite that diagonal, so the two
    triangles of a cell share their refinement edge.

    >>> m = square_mesh([0, 1, 0, 1], 0.5, 0.5)
    >>> m.N, m.NT
    (9, 8)
    """
    if h2 is None:
        h2 = h1
    x1, x2, y1, y2 = map(float, rect)
    if not (x1 < x2 and y1 < y2):
        raise MeshError(f"empty rectangle {rect!r}")
    if h1 <= 0 or h2 <= 0:
        raise MeshError("mesh spacing must be positive")
    nx = int(round((x2 - x1) / h1))
    ny = int(round((y2 - y1) / h2))
    if nx < 1 or ny < 1:
        raise MeshError(f"spacing ({h1}, {h2}) larger than the rectangle")
    xs = np.linspace(x1, x2, nx + 1)
    ys = np.linspace(y1, y2, ny + 1)
    X, Y = np.meshgrid(xs, ys)  # row j holds y = ys[j]
    node = np.column_stack([X.ravel(), Y.ravel()])

    i, j = np.meshgrid(np.arange(nx), np.arange(ny))
    i, j = i.ravel(), j.ravel()
    p00 = j * (nx + 1) + i
    p10 = p00 + 1
    p01 = p00 + nx + 1
    p11 = p01 + 1
    lower = np.column_stack([p10, p11, p00])
    upper = np.column_stack([p01, p00, p11])
    elem = np.empty((2 * nx * ny, 3), dtype=np.int64)
    elem[0::2] = lower
    elem[1::2] = upper
    return Mesh(node, elem)


def label_longest_edge(mesh):
    """Rotate each triangle so that its longest side is opposite vertex 1.

    Used to initialize refinement edges of arbitrary meshes before newest
    vertex bisection. Orientation is preserved.
    """
    node, elem = mesh.node, mesh.elem
    lengths = np.stack(
        [
            np.linalg.norm(node[elem[:, 2]] - node[elem[:, 1]], axis=1),
            np.linalg.norm(node[elem[:, 0]] - node[elem[:, 2]], axis=1),
            np.linalg.norm(node[elem[:, 1]] - node[elem[:, 0]], axis=1),
        ],
        axis=1,
    )
    # ties go to the lowest local side
    longest = np.argmax(lengths >= lengths.max(axis=1, keepdims=True) * (1 - 1e-12), axis=1)
    rows = np.arange(mesh.NT)[:, None]
    cols = (longest[:, None] + np.arange(3)) % 3
    return Mesh(node, elem[rows, cols])


def mesh_edges(elem):
    """Unique edges and the element-to-edge map.

    Returns ``edge`` (NE x 2, sorted rows, ``edge[:, 0] < edge[:, 1]``,
    lexicographic order), ``elem2edge`` (NT x 3) and the number of triangles
    touching each edge.
    """
    elem = np.asarray(elem)
    sides = np.concatenate([elem[:, [1, 2]], elem[:, [2, 0]], elem[:, [0, 1]]])
    sides.sort(axis=1)
    edge, inverse = np.unique(sides, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    NT = len(elem)
    elem2edge = inverse.reshape(3, NT).T.copy()
    counts = np.bincount(inverse, minlength=len(edge))
    return edge, elem2edge, counts


@dataclass(frozen=True)
class FeMesh:
    """Mesh plus derived topology and geometry.

    All index arrays are 0-based. ``sgnelem`` compares the local
    counterclockwise direction of each side with its global direction
    (smaller to larger vertex index); boundary slots are 0.
    """

    mesh: Mesh
    edge: np.ndarray
    elem2edge: np.ndarray
    bdEdgeIdx: np.ndarray
    bdEdgeIdxType: list
    bdEdgeType: list
    bdNodeIdxType: list
    he: np.ndarray
    diameter: np.ndarray
    area: np.ndarray
    sgnelem: np.ndarray
    bdStr: tuple = field(default=())

    @property
    def node(self):
        return self.mesh.node

    @property
    def elem(self):
        return self.mesh.elem

    @property
    def N(self):
        return self.mesh.N

    @property
    def NT(self):
        return self.mesh.NT

    @property
    def NE(self):
        return len(self.edge)

    @property
    def bdEdge(self):
        return self.edge[self.bdEdgeIdx]

    @property
    def is_boundary_edge(self):
        flag = np.zeros(self.NE, dtype=bool)
        flag[self.bdEdgeIdx] = True
        return flag

    @property
    def bdNodeIdx(self):
        return np.unique(self.edge[self.bdEdgeIdx])


def _as_predicate_list(bdStr):
    if bdStr is None:
        return []
    if isinstance(bdStr, str):
        return [bdStr] if bdStr.strip() else []
    return list(bdStr)


def build_fe_mesh(mesh, bdStr=None):
    """Compute edges, boundary partition and geometric data of `mesh`.

    Parameters
    ----------
    mesh : Mesh
    bdStr : str, list of str, or None
        Boundary predicates. Boundary edge ``e`` goes to the part of the first
        predicate that holds at its midpoint; unmatched edges form the last
        part. With no predicates every boundary edge is in part 0.

    Returns
    -------
    FeMesh
    """
    mesh.validate()
    node, elem = mesh.node, mesh.elem
    edge, elem2edge, counts = mesh_edges(elem)
    if np.any(counts > 2):
        raise MeshError(f"non-conforming mesh: {np.sum(counts > 2)} edge(s) shared by >2 triangles")
    bdEdgeIdx = np.flatnonzero(counts == 1)

    predicates = [parse_boundary_predicate(s) for s in _as_predicate_list(bdStr)]
    mid = 0.5 * (node[edge[bdEdgeIdx, 0]] + node[edge[bdEdgeIdx, 1]])
    remaining = np.ones(len(bdEdgeIdx), dtype=bool)
    bdEdgeIdxType = []
    for pred in predicates:
        hit = remaining & pred(mid[:, 0], mid[:, 1])
        bdEdgeIdxType.append(bdEdgeIdx[hit])
        remaining &= ~hit
    if predicates:
        bdEdgeIdxType.append(bdEdgeIdx[remaining])
    else:
        bdEdgeIdxType.append(bdEdgeIdx.copy())
    bdEdgeType = [edge[idx] for idx in bdEdgeIdxType]
    bdNodeIdxType = [np.unique(e) for e in bdEdgeType]

    he = np.linalg.norm(node[edge[:, 1]] - node[edge[:, 0]], axis=1)
    diameter = he[elem2edge].max(axis=1)
    area = signed_area(node, elem)

    sgnelem = np.sign(
        np.column_stack([elem[:, 2] - elem[:, 1], elem[:, 0] - elem[:, 2], elem[:, 1] - elem[:, 0]])
    ).astype(np.int64)
    on_boundary = np.zeros(len(edge), dtype=bool)
    on_boundary[bdEdgeIdx] = True
    sgnelem[on_boundary[elem2edge]] = 0

    arrays = [edge, elem2edge, bdEdgeIdx, he, diameter, area, sgnelem]
    arrays += bdEdgeIdxType + bdEdgeType + bdNodeIdxType
    for a in arrays:
        a.setflags(write=False)
    return FeMesh(
        mesh=mesh,
        edge=edge,
        elem2edge=elem2edge,
        bdEdgeIdx=bdEdgeIdx,
        bdEdgeIdxType=bdEdgeIdxType,
        bdEdgeType=bdEdgeType,
        bdNodeIdxType=bdNodeIdxType,
        he=he,
        diameter=diameter,
        area=area,
        sgnelem=sgnelem,
        bdStr=tuple(_as_predicate_list(bdStr)),
    )


# -- I/O ---------------------------------------------------------------------


def _num(v):
    """Shortest round-tripping text for a float."""
    return repr(float(v))


def write_mesh(mesh, path):
    """Write `mesh` in the text format: ``N NT`` header, coordinates, 1-based triangles."""
    path = Path(path)
    with path.open("w") as fh:
        fh.write(f"{mesh.N} {mesh.NT}\n")
        for x, y in mesh.node:
            fh.write(f"{_num(x)} {_num(y)}\n")
        for a, b, c in mesh.elem + 1:
            fh.write(f"{a} {b} {c}\n")
    return path


def read_mesh(path):
    """Read a mesh written by :func:`write_mesh`."""
    tokens = Path(path).read_text().split()
    if len(tokens) < 2:
        raise MeshError(f"{path}: missing 'N NT' header")
    try:
        N, NT = int(tokens[0]), int(tokens[1])
        body = tokens[2:]
        if len(body) != 2 * N + 3 * NT:
            raise MeshError(
                f"{path}: expected {2 * N} coordinates and {3 * NT} indices, found {len(body)} values"
            )
        node = np.array(body[: 2 * N], dtype=float).reshape(N, 2)
        elem = np.array(body[2 * N :], dtype=np.int64).reshape(NT, 3) - 1
    except ValueError as exc:
        if isinstance(exc, MeshError):
            raise
        raise MeshError(f"{path}: malformed mesh file ({exc})") from exc
    return Mesh(node, elem)


def mesh_to_svg(mesh, path=None, stroke_width=None, size=600):
    """Render every edge of `mesh` as an SVG polyline.

    The viewBox is the bounding box of the mesh (y pointing up). Returns the
    SVG text and writes it to `path` when given.
    """
    edge, _, _ = mesh_edges(mesh.elem)
    xmin, ymin = mesh.node.min(axis=0)
    xmax, ymax = mesh.node.max(axis=0)
    w, h = xmax - xmin, ymax - ymin
    if stroke_width is None:
        stroke_width = 0.002 * max(w, h)
    aspect = h / w if w > 0 else 1.0
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size * aspect:.0f}" '
        f'viewBox="{_num(xmin)} {_num(-ymax)} {_num(w)} {_num(h)}">',
        f'<g fill="none" stroke="black" stroke-width="{_num(stroke_width)}" stroke-linecap="round">',
    ]
    p = mesh.node
    for a, b in edge:
        lines.append(
            f'<polyline points="{_num(p[a, 0])},{_num(-p[a, 1])} {_num(p[b, 0])},{_num(-p[b, 1])}"/>'
        )
    lines += ["</g>", "</svg>", ""]
    text = "\n".join(lines)
    if path is not None:
        Path(path).write_text(text)
    return text
