"""Tree balls: Smith-form cosets, valences, crossing, chain depths, DOT."""

import pytest

from gogkit import (annotate_depth, ball_chain_depths, ball_crossing_check,
                    build_ball, coarse_le, crossing_graph, depth_filtration,
                    smith_normal_form, to_dot)
from gogkit.exactlin import RatMatrix
from gogkit.oracle import UnsupportedOracle
from gogkit.treeball import CosetSystem


def matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


@pytest.mark.parametrize("mat", [
    [[2]],
    [[1, 0], [0, 1]],
    [[2, 0], [0, 3]],
    [[4, 6], [2, 8]],
    [[1, 2], [3, 4], [5, 6]],
    [[0, 0], [0, 5]],
])
def test_smith_normal_form_diagonalizes(mat):
    u, d, v = smith_normal_form(mat)
    assert matmul(matmul(u, mat), v) == d
    n, m = len(mat), len(mat[0])
    for i in range(n):
        for j in range(m):
            if i != j:
                assert d[i][j] == 0
    diag = [d[i][i] for i in range(min(n, m))]
    for a, b in zip(diag, diag[1:]):
        if a and b:
            assert b % a == 0
    assert abs(round(RatMatrix.from_rows(u).det())) == 1
    assert abs(round(RatMatrix.from_rows(v).det())) == 1


def test_coset_system_counts_by_determinant():
    sys = CosetSystem(RatMatrix.from_rows([[2, 0], [0, 3]]))
    assert sys.finite and sys.count == 6
    assert len(sys.labels()) == 6
    assert len(set(sys.labels())) == 6


def test_coset_system_infinite_enumeration_deterministic():
    sys = CosetSystem(RatMatrix.from_rows([[1], [0]]))
    assert not sys.finite
    first = sys.labels(cap=5)
    again = sys.labels(cap=5)
    assert first == again and len(first) == 5
    assert len(set(first)) == 5


def test_line_ball_seven_node_path(graph):
    ball = build_ball(graph("z2hnn"), "v", 3)
    assert len(ball.nodes) == 7
    assert len(ball.edges) == 6
    assert all(n.true_valence == 2 for n in ball.nodes.values())
    assert not any(n.truncated for n in ball.nodes.values())
    # interior nodes have exactly two neighbours
    for addr, node in ball.nodes.items():
        if node.expanded:
            neighbours = len(ball.children(addr)) + (0 if addr == () else 1)
            assert neighbours == 2


def test_line_ball_radius_four(graph):
    ball = build_ball(graph("z2hnn"), "v", 4)
    assert len(ball.nodes) == 9
    for addr, node in ball.nodes.items():
        if node.expanded:
            assert len(ball.children(addr)) + (0 if addr == () else 1) == 2


def test_bushy_root_valence_from_coset_count(graph):
    g = graph("bs22")
    ball = build_ball(g, "v", 1)
    root = ball.node(())
    assert root.true_valence == 4
    assert len(ball.children(())) == 4
    assert not root.truncated


def test_truncated_infinite_index_ball(graph):
    g = graph("f2xz")
    ball = build_ball(g, "v", 1, branch_cap=5)
    root = ball.node(())
    assert len(ball.children(())) == 10
    assert root.truncated
    assert root.true_valence is None


def test_realized_valence_matches_determinant_sum(graph):
    for name in ("z2hnn", "bs22", "arc3"):
        g = graph(name)
        orc = g.oracle()
        ball = build_ball(g, sorted(g.vertex_ids())[0], 2)
        for addr, node in ball.nodes.items():
            if not node.expanded or node.truncated:
                continue
            realized = len(ball.children(addr)) + (0 if addr == () else 1)
            expected = sum(orc.index_value(e.id, i) for (e, i) in g.ends_at(node.vertex))
            assert realized == expected == node.true_valence


def test_sibling_cosets_distinct(graph):
    ball = build_ball(graph("bs22"), "v", 2)
    for addr in ball.nodes:
        kids = ball.children(addr)
        assert len(kids) == len(set(kids))


def test_orbit_label_depends_only_on_quotient_vertex(graph):
    g = graph("arc3")
    ball = build_ball(g, "u", 3)
    for addr, node in ball.nodes.items():
        if addr:
            eid, i, _ = addr[-1]
            assert node.vertex == g.edge(eid).ends[1 - i].vertex


def test_table_oracle_unsupported(graph):
    with pytest.raises(UnsupportedOracle):
        build_ball(graph("heis"), "v", 1)


def test_bad_bounds_rejected(graph):
    with pytest.raises(ValueError):
        build_ball(graph("bs22"), "v", -1)
    with pytest.raises(ValueError):
        build_ball(graph("bs22"), "v", 1, branch_cap=0)


def test_ball_crossing_matches_quotient_criterion(graph):
    cases = [("thm14", "a"), ("f2xz", "v"), ("arc3", "u"), ("arc3", "v"), ("arc3", "w")]
    for name, vid in cases:
        g = graph(name)
        da = depth_filtration(g)
        quotient = crossing_graph(g, vid, da).verdict
        ball = build_ball(g, vid, 2, branch_cap=3)
        assert ball_crossing_check(ball, g) == quotient, (name, vid)


def test_ball_crossing_needs_radius(graph):
    ball = build_ball(graph("thm14"), "a", 0)
    with pytest.raises(ValueError):
        ball_crossing_check(ball, graph("thm14"))


def test_ball_crossing_empty_without_corank_one():
    from gogkit import GraphOfGroups, EdgeEnd, EdgeSpec, VertexSpec
    g = GraphOfGroups(
        (VertexSpec("a", 3),),
        (EdgeSpec("e", 1, (EdgeEnd("a", RatMatrix.from_rows([[1], [0], [0]])),
                           EdgeEnd("a", RatMatrix.from_rows([[0], [0], [1]])))),),
    )
    assert ball_crossing_check(build_ball(g, "a", 1), g) == "empty"


def test_annotate_homogeneous_all_zero(graph):
    g = graph("bs22")
    ball = annotate_depth(build_ball(g, "v", 2), depth_filtration(g))
    assert {n.depth_label for n in ball.nodes.values()} == {0}
    assert {e.depth_label for e in ball.edges} == {0}


def test_coarse_le_along_paths(graph):
    g = graph("arc3")
    ball = build_ball(g, "u", 3)
    root = ball.node(())
    f_edges = [e for e in ball.edges if e.edge == "f"]
    e_edges = [e for e in ball.edges if e.edge == "e"]
    assert f_edges and e_edges
    assert coarse_le(ball, g, f_edges[0], e_edges[0])
    assert not coarse_le(ball, g, e_edges[0], f_edges[0])
    assert coarse_le(ball, g, e_edges[0], root)


def test_chain_depths_match_filtration(graph):
    for name in ("arc3", "arc4", "thm14", "f2xz", "z2hnn", "bs22"):
        g = graph(name)
        da = depth_filtration(g)
        assert da.verdict.kind == "finite"
        ball = build_ball(g, sorted(g.vertex_ids())[0], 3, branch_cap=3)
        assert ball_chain_depths(ball, g) == da.depth, name


def test_annotate_depth_and_reject_mismatch(graph):
    g = graph("arc3")
    da = depth_filtration(g)
    ball = annotate_depth(build_ball(g, "u", 2), da)
    assert ball.node(()).depth_label == 0
    assert {e.depth_label for e in ball.edges} == {1, 2}
    other = graph("thm14")
    da2 = depth_filtration(other)
    with pytest.raises(ValueError, match="different graph"):
        annotate_depth(build_ball(g, "u", 1), da2)


def test_annotate_depth_rejects_infinite(graph):
    g = graph("nonex")
    da = depth_filtration(g)
    with pytest.raises(ValueError, match="infinite"):
        annotate_depth(build_ball(graph("arc3"), "u", 1), da)


def test_dot_single_node(graph):
    ball = build_ball(graph("z2hnn"), "v", 0)
    dot = to_dot(ball)
    assert dot.startswith("graph {")
    assert '"root:v"' in dot
    assert " -- " not in dot


def test_dot_line_ball_counts(graph):
    dot = to_dot(build_ball(graph("z2hnn"), "v", 3))
    assert dot.count(";") == 13          # 7 nodes + 6 edges
    assert dot.count(" -- ") == 6


def test_dot_truncation_attribute(graph):
    dot = to_dot(build_ball(graph("f2xz"), "v", 1))
    assert "truncated=true" in dot


def test_dot_deterministic(graph):
    g = graph("arc3")
    assert to_dot(build_ball(g, "u", 2)) == to_dot(build_ball(g, "u", 2))
