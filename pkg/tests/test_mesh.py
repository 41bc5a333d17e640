import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afem2d.mesh import (
    Mesh,
    MeshError,
    build_fe_mesh,
    label_longest_edge,
    mesh_to_svg,
    read_mesh,
    square_mesh,
    write_mesh,
)


@pytest.mark.parametrize(
    "h, N, NT",
    [(1.0, 4, 2), (0.5, 9, 8), (1 / 50, 2601, 5000)],
)
def test_square_mesh_counts(h, N, NT):
    m = square_mesh([0, 1, 0, 1], h, h)
    assert (m.N, m.NT) == (N, NT)
    assert np.all(m.area() > 0)


def test_square_mesh_diagonal_convention():
    m = square_mesh([0, 1, 0, 1], 1, 1)
    # first vertex opposite the lower-left/upper-right diagonal
    np.testing.assert_array_equal(m.elem, [[1, 3, 0], [2, 0, 3]])


@pytest.mark.parametrize("rect, h", [([0, 0, 0, 1], 0.5), ([0, 1, 1, 0], 0.5), ([0, 1, 0, 1], 0.0), ([0, 1, 0, 1], -1)])
def test_square_mesh_errors(rect, h):
    with pytest.raises(MeshError):
        square_mesh(rect, h, h)


def test_two_triangle_tables(two_triangle_mesh):
    fm = build_fe_mesh(two_triangle_mesh)
    np.testing.assert_array_equal(fm.edge + 1, [[1, 2], [1, 3], [1, 4], [2, 4], [3, 4]])
    np.testing.assert_array_equal(fm.elem2edge + 1, [[3, 1, 4], [3, 5, 2]])
    np.testing.assert_array_equal(fm.sgnelem, [[-1, 0, 0], [1, 0, 0]])
    np.testing.assert_array_equal(fm.bdEdgeIdx + 1, [1, 2, 4, 5])
    np.testing.assert_allclose(fm.he, [1, 1, np.sqrt(2), 1, 1])
    np.testing.assert_allclose(fm.diameter, [np.sqrt(2)] * 2)


def test_boundary_parts_unit_square():
    m = square_mesh([0, 1, 0, 1], 0.25, 0.25)
    fm = build_fe_mesh(m, ["x==1", "y==0"])
    assert len(fm.bdEdgeType) == 3
    right, bottom, rest = fm.bdEdgeIdxType
    mid = lambda idx: fm.node[fm.edge[idx]].mean(axis=1)  # noqa: E731
    np.testing.assert_allclose(mid(right)[:, 0], 1.0)
    np.testing.assert_allclose(mid(bottom)[:, 1], 0.0)
    assert len(right) == 4 and len(bottom) == 4 and len(rest) == 8
    np.testing.assert_array_equal(np.sort(np.concatenate(fm.bdEdgeIdxType)), fm.bdEdgeIdx)
    # nodes of the right part
    np.testing.assert_allclose(fm.node[fm.bdNodeIdxType[0], 0], 1.0)


def test_single_predicate_and_empty():
    fm = build_fe_mesh(square_mesh([0, 1, 0, 1], 0.25, 0.25), "x==1")
    assert [len(p) for p in fm.bdEdgeIdxType] == [4, 12]
    fm = build_fe_mesh(square_mesh([0, 1, 0, 1], 0.25, 0.25), [])
    assert len(fm.bdEdgeIdxType) == 1
    np.testing.assert_array_equal(fm.bdEdgeIdxType[0], fm.bdEdgeIdx)


def test_equality_matches_inequality_predicate():
    m = square_mesh([0, 1, 0, 1], 1 / 7, 1 / 7)
    a = build_fe_mesh(m, "x==1").bdEdgeIdxType[0]
    b = build_fe_mesh(m, "x>1-1e-9").bdEdgeIdxType[0]
    np.testing.assert_array_equal(a, b)
    assert len(a) == 7


def test_first_matching_predicate_wins():
    fm = build_fe_mesh(square_mesh([0, 1, 0, 1], 0.5, 0.5), ["x>0.9", "x>0.5"])
    assert len(fm.bdEdgeIdxType[0]) == 2
    assert len(fm.bdEdgeIdxType[1]) == 2  # the halves of y==0 and y==1 with x in (0.5, 1)


def test_non_conforming_rejected():
    node = np.array([[0, 0], [1, 0], [0, 1], [1, 1], [0.5, -1]], dtype=float)
    elem = np.array([[0, 1, 2], [1, 3, 2], [0, 4, 1], [4, 1, 0]])
    # the last triangle is clockwise; validation catches it
    with pytest.raises(MeshError):
        build_fe_mesh(Mesh(node, elem))
    node = np.array([[0, 0], [1, 0], [0, 1], [0.5, -1], [0.5, 1.0]], dtype=float)
    elem = np.array([[0, 1, 2], [0, 3, 1], [0, 1, 4]])
    with pytest.raises(MeshError, match="non-conforming"):
        build_fe_mesh(Mesh(node, elem))


def test_predicate_parse_failure_propagates():
    with pytest.raises(ValueError):
        build_fe_mesh(square_mesh([0, 1, 0, 1], 0.5, 0.5), "x ==")


def check_fe_mesh_invariants(fm):
    node, elem, edge, e2e = fm.node, fm.elem, fm.edge, fm.elem2edge
    assert np.all(edge[:, 0] < edge[:, 1])
    assert len(np.unique(edge, axis=0)) == len(edge)
    # side i is opposite vertex i
    for i in range(3):
        others = np.sort(np.delete(elem, i, axis=1), axis=1)
        np.testing.assert_array_equal(edge[e2e[:, i]], others)
    counts = np.bincount(e2e.ravel(), minlength=fm.NE)
    assert set(np.unique(counts)) <= {1, 2}
    np.testing.assert_array_equal(np.flatnonzero(counts == 1), fm.bdEdgeIdx)
    # sign pairing on interior edges, zero on boundary slots
    sgn = fm.sgnelem
    bd = fm.is_boundary_edge[e2e]
    assert np.all(sgn[bd] == 0)
    assert np.all(np.abs(sgn[~bd]) == 1)
    s = np.zeros(fm.NE)
    np.add.at(s, e2e[~bd], sgn[~bd])
    assert np.all(s[~fm.is_boundary_edge] == 0)
    parts = np.concatenate(fm.bdEdgeIdxType)
    assert len(parts) == len(np.unique(parts))
    np.testing.assert_array_equal(np.sort(parts), fm.bdEdgeIdx)


@settings(max_examples=40, deadline=None)
@given(
    x1=st.floats(-5, 5),
    y1=st.floats(-5, 5),
    w=st.floats(0.1, 4),
    hgt=st.floats(0.1, 4),
    nx=st.integers(1, 12),
    ny=st.integers(1, 12),
)
def test_square_mesh_invariants(x1, y1, w, hgt, nx, ny):
    m = square_mesh([x1, x1 + w, y1, y1 + hgt], w / nx, hgt / ny)
    fm = build_fe_mesh(m)
    check_fe_mesh_invariants(fm)
    assert m.N - fm.NE + m.NT == 1
    assert m.area().sum() == pytest.approx(w * hgt, rel=1e-12)
    assert (m.N, m.NT) == ((nx + 1) * (ny + 1), 2 * nx * ny)


def test_label_longest_edge_rotates_and_keeps_orientation():
    node = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]])
    m = label_longest_edge(Mesh(node, [[0, 1, 2]]))
    np.testing.assert_array_equal(m.elem, [[0, 1, 2]])  # hypotenuse already opposite vertex 1
    m = label_longest_edge(Mesh(node, [[1, 2, 0]]))
    np.testing.assert_array_equal(m.elem, [[0, 1, 2]])
    sq = square_mesh([0, 1, 0, 1], 0.25, 0.25)
    np.testing.assert_array_equal(label_longest_edge(sq).elem, sq.elem)


def test_mesh_text_roundtrip(tmp_path, two_triangle_mesh):
    path = write_mesh(two_triangle_mesh, tmp_path / "two_triangle.txt")
    lines = path.read_text().splitlines()
    assert lines[0] == "4 2"
    assert lines[5:] == ["2 4 1", "3 1 4"]
    back = read_mesh(path)
    np.testing.assert_array_equal(back.node, two_triangle_mesh.node)
    np.testing.assert_array_equal(back.elem, two_triangle_mesh.elem)


def test_read_mesh_errors(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("4 2\n0 0\n1 0\n")
    with pytest.raises(MeshError):
        read_mesh(p)
    p.write_text("3 1\n0 0\n1 0\n0 1\n1 2 x\n")
    with pytest.raises(MeshError):
        read_mesh(p)


def test_svg_one_polyline_per_edge(tmp_path, two_triangle_mesh):
    text = mesh_to_svg(two_triangle_mesh, tmp_path / "m.svg")
    assert text.count("<polyline") == 5
    assert 'viewBox="0.0 -1.0 1.0 1.0"' in text
    assert (tmp_path / "m.svg").read_text() == text
