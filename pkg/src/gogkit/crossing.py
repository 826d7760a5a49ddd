"""Crossing graphs at one-vertex depth-zero rafts, and the hypothesis checker.

At a rank-n abelian vertex, an incident subgroup crosses a corank-one
subgroup exactly when its span is not contained in the corank-one span.  All
tree translates of an edge end share one span, so connectivity of the
tree-level crossing graph collapses to a finite criterion: the graph is
empty when no incident end has corank one, and otherwise connected precisely
when the incident end spans together span the whole vertex group.  Two
distinct corank-one spans always cross; copies of a single span H are joined
exactly when some incident span escapes H.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactlin import RationalSubspace, canonicalize, contains, subspace_sum, zero_space
from .depth import DepthAssignment, DepthConfig, depth_filtration
from .oracle import UnsupportedOracle
from .reduce import complete_reduce, reducible_edges


class WrongVertex(ValueError):
    """The vertex is not a one-vertex depth-zero raft."""


@dataclass(frozen=True)
class CrossingNode:
    span: RationalSubspace
    ends: tuple  # contributing (edge id, end index) pairs


@dataclass(frozen=True)
class CrossingGraph:
    vertex: str
    nodes: tuple[CrossingNode, ...]
    adjacency: tuple
    verdict: str                      # empty | connected | disconnected
    witness: RationalSubspace | None  # hyperplane containing every incident span
    codim_note: str = ("coarsely separating edge ends have corank one "
                       "automatically at an abelian vertex")


def _one_vertex_raft(da: DepthAssignment, vid: str) -> bool:
    for raft in da.levels[0].rafts if da.levels else ():
        if set(raft.core) == {vid}:
            return True
    return False


def crossing_graph(g, vid: str, da: DepthAssignment) -> CrossingGraph:
    if g.oracle_mode != "abelian":
        raise UnsupportedOracle("crossing graphs need the abelian oracle")
    if not _one_vertex_raft(da, vid):
        raise WrongVertex(f"{vid} is not a one-vertex depth-zero raft")
    n = g.vertex(vid).rank
    orc = g.oracle()
    spans = []
    for (e, i) in sorted(g.ends_at(vid), key=lambda p: (p[0].id, p[1])):
        spans.append((orc.class_of(e.id, i), (e.id, i)))

    by_span = {}
    for span, end in spans:
        if span.dim == n - 1:
            by_span.setdefault(span, []).append(end)
    nodes = tuple(CrossingNode(s, tuple(sorted(by_span[s])))
                  for s in sorted(by_span, key=lambda s: s.basis))
    if not nodes:
        return CrossingGraph(vid, (), (), "empty", None)

    total = zero_space(n)
    for span, _ in spans:
        total = subspace_sum(total, span)
    if total.is_full():
        verdict, witness = "connected", None
    else:
        hull = list(total.basis)
        for j in range(n):
            if len(hull) >= n - 1:
                break
            unit = [1 if k == j else 0 for k in range(n)]
            grown = canonicalize(hull + [unit], n)
            if grown.dim > len(hull):
                hull.append(unit)
        verdict, witness = "disconnected", canonicalize(hull, n)

    adj = []
    for a in nodes:
        row = []
        for b in nodes:
            if a.span != b.span:
                row.append(True)   # distinct corank-one spans cross
            else:
                row.append(any(not contains(a.span, s) for s, _ in spans))
        adj.append(tuple(row))
    return CrossingGraph(vid, nodes, tuple(adj), verdict, witness)


HYPOTHESIS_NAMES = {
    1: "finite type, irreducible, finite depth",
    2: "no depth-zero raft is a line",
    3: "depth-zero vertex groups are coarse PD",
    4: "crossing graph connected or empty at one-vertex depth-zero rafts",
    5: "vertex and edge groups have coarse finite type",
}


@dataclass(frozen=True)
class HypothesisStatus:
    number: int
    name: str
    status: str           # pass | fail | unknown
    detail: str = ""


@dataclass(frozen=True)
class HypothesisReport:
    entries: tuple[HypothesisStatus, ...]
    reduced: bool = False     # analyses ran on the complete reduction
    assignment: DepthAssignment | None = None

    @property
    def all_pass(self) -> bool:
        return all(e.status == "pass" for e in self.entries)

    def entry(self, number: int) -> HypothesisStatus:
        return next(e for e in self.entries if e.number == number)


def check_hypotheses(g, config: DepthConfig | None = None) -> HypothesisReport:
    """Evaluate the five structural hypotheses of the rigidity package."""
    cfg = config or DepthConfig()
    red = reducible_edges(g)
    work = complete_reduce(g) if red else g
    da = depth_filtration(work, cfg)

    entries = []
    if red:
        entries.append(HypothesisStatus(
            1, HYPOTHESIS_NAMES[1], "fail",
            f"reducible at edge {red[0][0]} end {red[0][1]}"))
    elif da.verdict.kind == "finite":
        entries.append(HypothesisStatus(
            1, HYPOTHESIS_NAMES[1], "pass", f"depth {da.verdict.depth}"))
    elif da.verdict.kind == "infinite":
        chain = " < ".join(f"{s.orbit}:{s.cls}" for s in da.verdict.witness)
        entries.append(HypothesisStatus(1, HYPOTHESIS_NAMES[1], "fail",
                                        f"infinite depth: {chain}"))
    else:
        entries.append(HypothesisStatus(
            1, HYPOTHESIS_NAMES[1], "unknown",
            f"transport horizon {da.verdict.horizon} exhausted"))

    rafts0 = list(da.levels[0].rafts) if da.levels else []
    line = next((r for r in rafts0 if r.kind == "line"), None)
    if line is not None:
        entries.append(HypothesisStatus(
            2, HYPOTHESIS_NAMES[2], "fail",
            "line raft {" + ",".join(line.members) + "}"))
    else:
        entries.append(HypothesisStatus(2, HYPOTHESIS_NAMES[2], "pass",
                                        f"{len(rafts0)} depth-zero rafts"))

    if g.oracle_mode == "abelian":
        entries.append(HypothesisStatus(
            3, HYPOTHESIS_NAMES[3], "pass",
            "rank-n abelian vertex groups are coarse PD(n)"))
    else:
        vertex_ids = set(work.vertex_ids())
        raft_vertices = sorted(
            m for r in rafts0 for m in r.core if m in vertex_ids)
        flags = work.table.pd_flags if work.table else {}
        bad = [v for v in raft_vertices
               if flags.get(v, {}).get("is_coarse_pd") is False]
        missing = [v for v in raft_vertices if v not in flags]
        if bad:
            entries.append(HypothesisStatus(3, HYPOTHESIS_NAMES[3], "fail",
                                            f"vertex {bad[0]} declared not coarse PD"))
        elif missing:
            entries.append(HypothesisStatus(3, HYPOTHESIS_NAMES[3], "unknown",
                                            f"no PD declaration for vertex {missing[0]}"))
        else:
            entries.append(HypothesisStatus(3, HYPOTHESIS_NAMES[3], "pass",
                                            "declared coarse PD"))

    if g.oracle_mode != "abelian":
        entries.append(HypothesisStatus(
            4, HYPOTHESIS_NAMES[4], "unknown",
            "crossing graphs are not supported for the table oracle"))
    else:
        vertex_ids = set(work.vertex_ids())
        failures = []
        checked = 0
        for raft in rafts0:
            if len(raft.core) == 1 and raft.core[0] in vertex_ids:
                cg = crossing_graph(work, raft.core[0], da)
                checked += 1
                if cg.verdict == "disconnected":
                    failures.append((raft.core[0], cg.witness))
        if failures:
            vid, wit = failures[0]
            entries.append(HypothesisStatus(
                4, HYPOTHESIS_NAMES[4], "fail",
                f"disconnected at {vid}; every incident span lies in {wit!r}"))
        else:
            entries.append(HypothesisStatus(4, HYPOTHESIS_NAMES[4], "pass",
                                            f"checked {checked} one-vertex rafts"))

    entries.append(HypothesisStatus(
        5, HYPOTHESIS_NAMES[5], "pass",
        "finitely generated abelian groups have coarse finite type"
        if g.oracle_mode == "abelian" else "declared by the table"))

    return HypothesisReport(tuple(entries), reduced=bool(red), assignment=da)
