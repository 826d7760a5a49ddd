"""Pattern rigidity, slope invariants, and exact linear equivalence."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gogkit import vertex_edge_pattern
from gogkit.exactlin import DimensionMismatch, RatMatrix, canonicalize, image
from gogkit.patterns import (LinearPattern, UnderdeterminedSlopes, line_slope,
                             patterns_equivalent, rigidity_check, slope_invariant)


def lines(*vecs):
    return LinearPattern.of([canonicalize([v]) for v in vecs], 2)


def slopes_pattern(*slopes):
    vecs = []
    for s in slopes:
        if s == "inf":
            vecs.append((0, 1))
        else:
            num, den = (s, 1) if isinstance(s, int) else s
            vecs.append((den, num))
    return lines(*vecs)


def test_vertex_pattern_counts_both_loop_ends(graph):
    pattern, notes = vertex_edge_pattern(graph("f2xz"), "v")
    assert pattern.subspaces == (canonicalize([(1, 0)]), canonicalize([(1, 0)]))
    assert not notes


def test_vertex_pattern_of_spanning_hyperplanes(graph):
    pattern, _ = vertex_edge_pattern(graph("thm14"), "a")
    assert {s.basis for s in pattern.subspaces} == {
        ((1, 0, 0), (0, 1, 0)), ((0, 1, 0), (0, 0, 1))}


def test_vertex_pattern_excludes_full_rank(graph):
    pattern, notes = vertex_edge_pattern(graph("z2hnn"), "v")
    assert not pattern.subspaces
    assert [(n[0], n[2]) for n in notes] == [("t", "full-rank span excluded")] * 2


def test_isolated_vertex_empty_pattern():
    from gogkit import GraphOfGroups, VertexSpec
    pattern, notes = vertex_edge_pattern(
        GraphOfGroups((VertexSpec("v", 2),), ()), "v")
    assert not pattern.subspaces and not notes


def test_table_oracle_unsupported(graph):
    from gogkit.oracle import UnsupportedOracle
    with pytest.raises(UnsupportedOracle):
        vertex_edge_pattern(graph("heis"), "v")


def test_three_lines_rigid():
    assert rigidity_check(slopes_pattern(0, "inf", 1)).status == "rigid"


def test_two_lines_inconclusive():
    assert rigidity_check(slopes_pattern(0, "inf")).status == "inconclusive"


def test_repeated_line_not_general_position():
    assert rigidity_check(slopes_pattern(0, 0, "inf")).status == "inconclusive"


def test_four_planes_general_position_rigid():
    planes = LinearPattern.of([
        canonicalize([(0, 1, 0), (0, 0, 1)]),   # normal e1
        canonicalize([(1, 0, 0), (0, 0, 1)]),   # normal e2
        canonicalize([(1, 0, 0), (0, 1, 0)]),   # normal e3
        canonicalize([(1, -1, 0), (0, 1, -1)]), # normal (1,1,1)
    ], 3)
    verdict = rigidity_check(planes)
    assert verdict.status == "rigid"
    assert verdict.witness == (0, 1, 2, 3)


def test_three_planes_inconclusive():
    planes = LinearPattern.of([
        canonicalize([(0, 1, 0), (0, 0, 1)]),
        canonicalize([(1, 0, 0), (0, 0, 1)]),
        canonicalize([(1, 0, 0), (0, 1, 0)]),
    ], 3)
    assert rigidity_check(planes).status == "inconclusive"


@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), max_size=3))
@settings(max_examples=60, deadline=None)
def test_rigidity_monotone_under_added_lines(extra):
    base = slopes_pattern(0, "inf", 1)
    assert rigidity_check(base).status == "rigid"
    vecs = [(1, 0), (0, 1), (1, 1)] + [v for v in extra if v != (0, 0)]
    assert rigidity_check(lines(*vecs)).status == "rigid"


def test_slope_of_lines():
    assert line_slope(canonicalize([(1, 0)])) == (0, 1)
    assert line_slope(canonicalize([(0, 1)])) == (1, 0)
    assert line_slope(canonicalize([(2, 3)])) == (3, 2)


def test_normalization_frame_is_fixed():
    inv = slope_invariant(slopes_pattern(0, "inf", 1))
    assert inv.render() == "{0, 1, oo}"


def test_mobius_shift_preserves_invariant():
    p = slopes_pattern(0, "inf", 1, 2)
    q = slopes_pattern(1, "inf", 2, 3)   # image under (x, y) -> (x, x + y)
    assert slope_invariant(p) == slope_invariant(q)


def test_cross_ratio_separates():
    p = slopes_pattern(0, "inf", 1, 2)
    r = slopes_pattern(0, "inf", 1, 3)
    assert slope_invariant(p) != slope_invariant(r)


def test_underdetermined_slopes_rejected():
    with pytest.raises(UnderdeterminedSlopes):
        slope_invariant(slopes_pattern(0, 0, "inf"))


def test_equivalent_patterns_with_witness():
    p = slopes_pattern(0, "inf", 1, 2)
    t = RatMatrix.from_rows([[1, 0], [1, 1]])
    q = LinearPattern.of([image(t, s) for s in p.subspaces], 2)
    same, witness = patterns_equivalent(p, q)
    assert same
    got = sorted((image(witness, s) for s in p.subspaces),
                 key=lambda s: (s.dim, s.basis))
    assert got == list(q.subspaces)


def test_inequivalent_cross_ratios():
    same, witness = patterns_equivalent(slopes_pattern(0, "inf", 1, 2),
                                        slopes_pattern(0, "inf", 1, 3))
    assert not same and witness is None


def test_cardinality_mismatch():
    same, _ = patterns_equivalent(slopes_pattern(0, "inf", 1),
                                  slopes_pattern(0, "inf", 1, 2))
    assert not same


def test_dimension_multiset_mismatch():
    p = LinearPattern.of([canonicalize([(1, 0, 0)]),
                          canonicalize([(1, 0, 0), (0, 1, 0)])], 3)
    q = LinearPattern.of([canonicalize([(1, 0, 0)]),
                          canonicalize([(0, 1, 0)])], 3)
    assert patterns_equivalent(p, q) == (False, None)


def test_ambient_mismatch_rejected():
    with pytest.raises(DimensionMismatch):
        patterns_equivalent(slopes_pattern(0, 1, 2),
                            LinearPattern.of([canonicalize([(1, 0, 0)])], 3))


def test_mixed_dimension_equivalence():
    p = LinearPattern.of([canonicalize([(1, 0, 0)]),
                          canonicalize([(1, 0, 0), (0, 1, 0)])], 3)
    t = RatMatrix.from_rows([[1, 1, 0], [0, 1, 0], [2, 0, 1]])
    q = LinearPattern.of([image(t, s) for s in p.subspaces], 3)
    same, witness = patterns_equivalent(p, q)
    assert same and witness.det() != 0


gl2_entries = st.tuples(st.integers(-3, 3), st.integers(-3, 3),
                        st.integers(-3, 3), st.integers(-3, 3)).filter(
    lambda t: t[0] * t[3] - t[1] * t[2] != 0)


@given(gl2_entries)
@settings(max_examples=100, deadline=None)
def test_slope_invariant_transform_invariance(entries):
    a, b, c, d = entries
    t = RatMatrix.from_rows([[a, b], [c, d]])
    p = slopes_pattern(0, "inf", 1, (5, 2))
    q = LinearPattern.of([image(t, s) for s in p.subspaces], 2)
    assert slope_invariant(p) == slope_invariant(q)


@given(gl2_entries)
@settings(max_examples=30, deadline=None)
def test_equivalence_relation_symmetry(entries):
    a, b, c, d = entries
    t = RatMatrix.from_rows([[a, b], [c, d]])
    p = slopes_pattern(0, "inf", 1, 3)
    q = LinearPattern.of([image(t, s) for s in p.subspaces], 2)
    ab, w1 = patterns_equivalent(p, q)
    ba, w2 = patterns_equivalent(q, p)
    assert ab and ba
    assert w1.det() != 0 and w2.det() != 0


def test_equivalence_relation_reflexive_and_transitive():
    p = slopes_pattern(0, "inf", 1, 2)
    assert patterns_equivalent(p, p)[0]
    t1 = RatMatrix.from_rows([[1, 0], [1, 1]])
    t2 = RatMatrix.from_rows([[2, 1], [1, 1]])
    q = LinearPattern.of([image(t1, s) for s in p.subspaces], 2)
    r = LinearPattern.of([image(t2, s) for s in q.subspaces], 2)
    assert patterns_equivalent(p, q)[0]
    assert patterns_equivalent(q, r)[0]
    same, w = patterns_equivalent(p, r)
    assert same and w.det() != 0
