"""Command-line front end.

Exit codes form a disjoint contract: 0 success / all-pass, 1 analysis-level
negative, 2 input error, 3 infinite depth, 4 unknown verdict, 5 analysis
unsupported for the oracle mode.  Reports are deterministic: ids are sorted,
randomized internals are reseeded from a fixed default seed (overridable by
GOG_SEED or --seed), and the seed is printed in every report.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass

from . import __version__
from .crossing import WrongVertex, check_hypotheses, crossing_graph
from .depth import DepthConfig, MustReduceFirst, depth_filtration, depth_zero_rafts, raft_kind
from .exactlin import DimensionMismatch, canonicalize
from .model import GraphLoadError, dump_graph, graph_to_dict, load_graph, validate
from .oracle import UnsupportedOracle
from .patterns import (DEFAULT_SEED, LinearPattern, UnderdeterminedSlopes,
                       patterns_equivalent, rigidity_check, slope_invariant,
                       vertex_edge_pattern)
from .reduce import comm_classes, complete_reduce, reducible_edges
from .treeball import annotate_depth, build_ball, to_dot

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_INFINITE = 3
EXIT_UNKNOWN = 4
EXIT_UNSUPPORTED = 5


@dataclass
class RunConfig:
    loop_bound: int = 3
    horizon: int | None = None
    radius: int = 2
    branch_cap: int = 3
    output: str | None = None
    format: str = "text"
    seed: int = DEFAULT_SEED

    def depth_config(self) -> DepthConfig:
        return DepthConfig(loop_bound=self.loop_bound, horizon=self.horizon)


class _Emitter:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.lines = []
        self.payload = {"seed": cfg.seed}

    def text(self, line):
        self.lines.append(line)

    def put(self, key, value):
        self.payload[key] = value

    def emit(self):
        if self.cfg.format == "json":
            body = json.dumps(self.payload, indent=2, sort_keys=True) + "\n"
        else:
            body = "\n".join(self.lines + [f"seed: {self.cfg.seed}"]) + "\n"
        if self.cfg.output:
            with open(self.cfg.output, "w", encoding="utf-8") as fh:
                fh.write(body)
        else:
            sys.stdout.write(body)


def _fail(msg, code):
    sys.stderr.write(msg.rstrip() + "\n")
    return code


def _load(path):
    g = load_graph(path)
    report = validate(g)
    if not report.ok:
        raise GraphLoadError(
            "invalid graph:\n" + "\n".join("  " + v for v in report.violations))
    return g


def _span_rows(s):
    return [list(r) for r in s.basis]


def _verdict_payload(v):
    out = {"kind": v.kind, "rendered": v.render()}
    if v.depth is not None:
        out["depth"] = v.depth
    if v.horizon is not None:
        out["horizon"] = v.horizon
    if v.witness:
        out["witness"] = [{"orbit": s.orbit, "class": s.cls, "strict": s.strict,
                           "via": list(map(list, s.via))} for s in v.witness]
    return out


def cmd_validate(args, cfg: RunConfig) -> int:
    try:
        g = load_graph(args.file)
    except GraphLoadError as e:
        return _fail(str(e), EXIT_INPUT)
    report = validate(g)
    em = _Emitter(cfg)
    em.put("violations", sorted(report.violations))
    em.put("ok", report.ok)
    if report.ok:
        em.text("ok: graph is valid")
    else:
        em.text(f"invalid: {len(report.violations)} violations")
        for v in sorted(report.violations):
            em.text(f"  {v}")
    em.emit()
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def cmd_depth(args, cfg: RunConfig) -> int:
    try:
        g = _load(args.file)
        da = depth_filtration(g, cfg.depth_config())
    except (GraphLoadError, MustReduceFirst) as e:
        return _fail(str(e), EXIT_INPUT)
    em = _Emitter(cfg)
    em.text(f"verdict: {da.verdict.render()}")
    em.put("verdict", _verdict_payload(da.verdict))
    em.put("depth", {k: da.depth[k] for k in sorted(da.depth)})
    for k in sorted(da.depth):
        em.text(f"depth {k}: {da.depth[k]}")
    levels = []
    for lv in da.levels:
        lvl = {"level": lv.level, "rafts": [], "flotillas": []}
        for r in lv.rafts:
            lvl["rafts"].append({"core": sorted(r.core), "absorbed": sorted(r.absorbed),
                                 "kind": r.kind})
            desc = "{" + ",".join(sorted(r.core)) + "}"
            if r.absorbed:
                desc += " absorbing {" + ",".join(sorted(r.absorbed)) + "}"
            if r.kind:
                desc += f" [{r.kind}]"
            em.text(f"level {lv.level} raft: {desc}")
        for f in lv.flotillas:
            lvl["flotillas"].append(sorted(f.members))
            em.text(f"level {lv.level} flotilla: {{{','.join(sorted(f.members))}}}")
        levels.append(lvl)
    em.put("levels", levels)
    for s in da.verdict.witness:
        em.text(f"witness: {s.orbit} class {s.cls}" + (" (strict)" if s.strict else ""))
    em.emit()
    if da.verdict.kind == "infinite":
        return EXIT_INFINITE
    if da.verdict.kind == "unknown":
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_rafts(args, cfg: RunConfig) -> int:
    try:
        g = _load(args.file)
    except GraphLoadError as e:
        return _fail(str(e), EXIT_INPUT)
    rafts = depth_zero_rafts(g)
    em = _Emitter(cfg)
    payload = []
    for r in rafts:
        kind = raft_kind(g, r)
        payload.append({"members": sorted(r.core), "kind": kind})
        em.text(f"depth-0 raft {{{','.join(sorted(r.core))}}}: {kind}")
    if not rafts:
        em.text("no depth-0 rafts")
    em.put("rafts", payload)
    em.emit()
    return EXIT_OK


def cmd_crossing(args, cfg: RunConfig) -> int:
    try:
        g = _load(args.file)
        if g.oracle_mode != "abelian":
            raise UnsupportedOracle("crossing graphs need the abelian oracle")
        da = depth_filtration(g, cfg.depth_config())
        cg = crossing_graph(g, args.vertex, da)
    except (GraphLoadError, MustReduceFirst, WrongVertex, KeyError) as e:
        return _fail(str(e), EXIT_INPUT)
    except UnsupportedOracle as e:
        return _fail(str(e), EXIT_UNSUPPORTED)
    em = _Emitter(cfg)
    em.text(f"crossing graph at {cg.vertex}: {cg.verdict} ({len(cg.nodes)} nodes)")
    em.put("vertex", cg.vertex)
    em.put("verdict", cg.verdict)
    em.put("nodes", [{"span": _span_rows(nd.span), "ends": [list(e) for e in nd.ends]}
                     for nd in cg.nodes])
    em.put("adjacency", [list(row) for row in cg.adjacency])
    em.put("codimension_one_condition", cg.codim_note)
    for nd in cg.nodes:
        em.text(f"node {nd.span!r} from ends {sorted(nd.ends)}")
    if cg.witness is not None:
        em.put("witness", _span_rows(cg.witness))
        em.text(f"witness hyperplane: {cg.witness!r}")
    em.text(f"note: {cg.codim_note}")
    em.emit()
    return EXIT_OK if cg.verdict in ("connected", "empty") else EXIT_NEGATIVE


def cmd_check(args, cfg: RunConfig) -> int:
    try:
        g = _load(args.file)
        report = check_hypotheses(g, cfg.depth_config())
    except GraphLoadError as e:
        return _fail(str(e), EXIT_INPUT)
    except UnsupportedOracle as e:
        return _fail(str(e), EXIT_UNSUPPORTED)
    em = _Emitter(cfg)
    entries = []
    for e in report.entries:
        entries.append({"number": e.number, "name": e.name, "status": e.status,
                        "detail": e.detail})
        em.text(f"({e.number}) {e.name}: {e.status.upper()}"
                + (f" - {e.detail}" if e.detail else ""))
    em.put("hypotheses", entries)
    em.put("all_pass", report.all_pass)
    if report.reduced:
        em.text("note: analyses ran on the complete reduction of the input")
        em.put("reduced", True)
    em.text("result: " + ("all hypotheses pass" if report.all_pass else "not all pass"))
    em.emit()
    return EXIT_OK if report.all_pass else EXIT_NEGATIVE


def cmd_reduce(args, cfg: RunConfig) -> int:
    try:
        g = _load(args.file)
    except GraphLoadError as e:
        return _fail(str(e), EXIT_INPUT)
    reduced = complete_reduce(g, order=args.order)
    em = _Emitter(cfg)
    em.text(f"reduced: {len(g.edges)} -> {len(reduced.edges)} edges, "
            f"{len(g.vertices)} -> {len(reduced.vertices)} vertices")
    classes = comm_classes(reduced, loop_bound=cfg.loop_bound)
    for c in classes:
        em.text(f"class: {c}")
    em.put("graph", graph_to_dict(reduced))
    em.put("classes", [list(map(str, c)) for c in classes])
    if args.output_graph:
        dump_graph(reduced, args.output_graph)
        em.text(f"wrote {args.output_graph}")
    em.emit()
    return EXIT_OK


def cmd_invariants(args, cfg: RunConfig) -> int:
    try:
        g = _load(args.file)
        pattern, notes = vertex_edge_pattern(g, args.vertex)
    except (GraphLoadError, KeyError) as e:
        return _fail(str(e), EXIT_INPUT)
    except UnsupportedOracle as e:
        return _fail(str(e), EXIT_UNSUPPORTED)
    em = _Emitter(cfg)
    em.text(f"pattern at {args.vertex}: {len(pattern.subspaces)} subspaces")
    em.put("vertex", args.vertex)
    em.put("pattern", [_span_rows(s) for s in pattern.subspaces])
    for s in pattern.subspaces:
        em.text(f"  member {s!r}")
    for (eid, i, why) in notes:
        em.text(f"  note: edge {eid} end {i}: {why}")
    em.put("notes", [list(map(str, n)) for n in notes])
    rv = rigidity_check(pattern)
    em.put("rigidity", {"status": rv.status,
                        "witness": list(rv.witness) if rv.witness else None})
    em.text(f"rigidity: {rv.status}"
            + (f" (hyperplanes {list(rv.witness)})" if rv.witness else ""))
    if pattern.ambient_dim == 2 and pattern.subspaces and all(
            s.dim == 1 for s in pattern.subspaces):
        try:
            inv = slope_invariant(pattern)
            em.put("slope_invariant", inv.render())
            em.text(f"slope invariant: {inv.render()}")
        except UnderdeterminedSlopes as e:
            em.put("slope_invariant", None)
            em.text(f"slope invariant: undefined ({e})")
    em.emit()
    return EXIT_OK


def _load_pattern(path, vertex):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise GraphLoadError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise GraphLoadError(
            f"{path}: JSON parse error at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if isinstance(doc, dict) and "pattern" in doc:
        if vertex:
            raise GraphLoadError(f"{path} is a pattern file; --vertex does not apply")
        body = doc["pattern"]
        n = body.get("ambient_dim")
        if not isinstance(n, int) or isinstance(n, bool):
            raise GraphLoadError(f"{path}: pattern.ambient_dim must be an integer")
        spans = []
        for rows in body.get("subspaces", []):
            for row in rows:
                for x in row:
                    if isinstance(x, bool) or not isinstance(x, int):
                        raise GraphLoadError(f"{path}: pattern entries must be integers")
            spans.append(canonicalize(rows, n))
        return LinearPattern.of(spans, n)
    g = _load(path)
    if not vertex:
        raise GraphLoadError(f"{path} is a graph file; --vertex-a/--vertex-b required")
    pattern, _ = vertex_edge_pattern(g, vertex)
    return pattern


def cmd_compare(args, cfg: RunConfig) -> int:
    try:
        pa = _load_pattern(args.file_a, args.vertex_a)
        pb = _load_pattern(args.file_b, args.vertex_b)
    except (GraphLoadError, KeyError) as e:
        return _fail(str(e), EXIT_INPUT)
    except UnsupportedOracle as e:
        return _fail(str(e), EXIT_UNSUPPORTED)
    try:
        same, witness = patterns_equivalent(pa, pb, rng=random.Random(cfg.seed))
    except DimensionMismatch as e:
        return _fail(str(e), EXIT_INPUT)
    em = _Emitter(cfg)
    em.text(f"equivalent: {'yes' if same else 'no'}")
    em.put("equivalent", same)
    if witness is not None:
        rows = [[str(x) for x in row] for row in witness.entries]
        em.put("witness", rows)
        em.text("witness: " + "; ".join(" ".join(r) for r in rows))
    em.emit()
    return EXIT_OK if same else EXIT_NEGATIVE


def cmd_ball(args, cfg: RunConfig) -> int:
    try:
        g = _load(args.file)
        root = args.vertex or sorted(g.vertex_ids())[0]
        ball = build_ball(g, root, cfg.radius, cfg.branch_cap)
    except (GraphLoadError, KeyError, ValueError) as e:
        if isinstance(e, UnsupportedOracle):
            return _fail(str(e), EXIT_UNSUPPORTED)
        return _fail(str(e), EXIT_INPUT)
    if not reducible_edges(g):
        da = depth_filtration(g, cfg.depth_config())
        if da.verdict.kind != "infinite":
            ball = annotate_depth(ball, da)
    if args.dot or cfg.format == "dot":
        body = to_dot(ball)
        if cfg.output:
            with open(cfg.output, "w", encoding="utf-8") as fh:
                fh.write(body)
        else:
            sys.stdout.write(body)
        return EXIT_OK
    em = _Emitter(cfg)
    truncated = sorted(str(_addr(a)) for a, n in ball.nodes.items() if n.truncated)
    em.text(f"ball at {ball.root_vertex}: radius {ball.radius}, "
            f"{len(ball.nodes)} nodes, {len(ball.edges)} edges")
    em.put("root", ball.root_vertex)
    em.put("radius", ball.radius)
    em.put("branch_cap", ball.branch_cap)
    em.put("node_count", len(ball.nodes))
    em.put("edge_count", len(ball.edges))
    em.put("truncated_nodes", truncated)
    if truncated:
        em.text(f"truncated nodes: {len(truncated)}")
    for addr in sorted(ball.nodes):
        n = ball.nodes[addr]
        val = "inf" if n.true_valence is None else n.true_valence
        extra = f" depth={n.depth_label}" if n.depth_label is not None else ""
        em.text(f"node {_addr(addr)}: {n.vertex} valence={val}{extra}"
                + (" truncated" if n.truncated else ""))
    em.emit()
    return EXIT_OK


def _addr(address):
    if not address:
        return "root"
    return "/".join(f"{eid}.{i}." + ",".join(map(str, lab)) for (eid, i, lab) in address)


def build_parser():
    p = argparse.ArgumentParser(prog="gog", description=__doc__)
    p.add_argument("--version", action="version", version=f"gogkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, file_args=("file",)):
        for fa in file_args:
            sp.add_argument(fa)
        sp.add_argument("--loop-bound", type=int, default=3)
        sp.add_argument("--horizon", type=int, default=None)
        sp.add_argument("--radius", type=int, default=2)
        sp.add_argument("--branch-cap", type=int, default=3)
        sp.add_argument("--format", choices=("text", "json", "dot"), default="text")
        sp.add_argument("--output", default=None)
        sp.add_argument("--seed", type=int, default=None)

    common(sub.add_parser("validate", help="check the structural invariants"))
    common(sub.add_parser("depth", help="depth filtration, rafts, flotillas"))
    common(sub.add_parser("rafts", help="depth-zero rafts and their kinds"))
    sp = sub.add_parser("crossing", help="crossing graph at a vertex")
    common(sp)
    sp.add_argument("--vertex", required=True)
    common(sub.add_parser("check", help="the five structural hypotheses"))
    sp = sub.add_parser("reduce", help="collapse reducible edges")
    common(sp)
    sp.add_argument("--order", choices=("lex", "revlex"), default="lex")
    sp.add_argument("-o", "--output-graph", default=None)
    sp = sub.add_parser("invariants", help="pattern invariants at a vertex")
    common(sp)
    sp.add_argument("--vertex", required=True)
    sp = sub.add_parser("compare", help="linear equivalence of two patterns")
    common(sp, file_args=("file_a", "file_b"))
    sp.add_argument("--vertex-a", default=None)
    sp.add_argument("--vertex-b", default=None)
    sp = sub.add_parser("ball", help="finite Bass-Serre tree ball")
    common(sp)
    sp.add_argument("--vertex", default=None)
    sp.add_argument("--dot", action="store_true")
    return p


COMMANDS = {
    "validate": cmd_validate,
    "depth": cmd_depth,
    "rafts": cmd_rafts,
    "crossing": cmd_crossing,
    "check": cmd_check,
    "reduce": cmd_reduce,
    "invariants": cmd_invariants,
    "compare": cmd_compare,
    "ball": cmd_ball,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    seed = DEFAULT_SEED
    env = os.environ.get("GOG_SEED")
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            return _fail(f"GOG_SEED must be an integer, got {env!r}", EXIT_INPUT)
    if getattr(args, "seed", None) is not None:
        seed = args.seed
    cfg = RunConfig(
        loop_bound=args.loop_bound,
        horizon=args.horizon,
        radius=args.radius,
        branch_cap=args.branch_cap,
        output=args.output,
        format=args.format,
        seed=seed,
    )
    if cfg.loop_bound < 1 or cfg.radius < 0 or cfg.branch_cap < 1 or (
            cfg.horizon is not None and cfg.horizon < 1):
        return _fail("bounds must be positive", EXIT_INPUT)
    if cfg.format == "dot" and args.command != "ball":
        return _fail("dot format only applies to the ball command", EXIT_INPUT)
    return COMMANDS[args.command](args, cfg)


if __name__ == "__main__":
    sys.exit(main())
