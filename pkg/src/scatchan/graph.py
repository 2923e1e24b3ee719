"""Quantum-graph data model and contraction to the global scattering matrix.

Vertices carry local scattering matrices; slots are addressed flat
(0..k-1, left group then right group of the vertex matrix).  Internal
edges identify an out-slot of one vertex with an in-slot of another; every
remaining slot must appear in the ordered dangling lists.  Edges carry no
propagation phase: free propagation is modeled as an explicit vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .composer import star
from .errors import InvalidInputError
from .smatrix import PortSpec, ScatteringMatrix

Port = tuple[int, int]  # (vertex id, flat slot index)


@dataclass(frozen=True)
class QuantumGraph:
    vertices: tuple  # of (vertex id, ScatteringMatrix)
    internal_edges: tuple  # of ((vid, out_slot), (vid, in_slot))
    dangling_in: tuple  # ordered (vid, in_slot) ports, labels 1..N
    dangling_out: tuple  # ordered (vid, out_slot) ports, labels 1..N

    @classmethod
    def build(cls, vertices, internal_edges, dangling_in, dangling_out):
        return cls(
            tuple((int(v), s) for v, s in vertices),
            tuple((tuple(a), tuple(b)) for a, b in internal_edges),
            tuple(tuple(p) for p in dangling_in),
            tuple(tuple(p) for p in dangling_out),
        )

    def to_json(self) -> dict:
        return {
            "vertices": [
                {"id": vid, "smatrix": s.to_json()} for vid, s in self.vertices
            ],
            "edges": [[list(a), list(b)] for a, b in self.internal_edges],
            "dangling_in": [list(p) for p in self.dangling_in],
            "dangling_out": [list(p) for p in self.dangling_out],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "QuantumGraph":
        try:
            vertices = [
                (int(v["id"]), ScatteringMatrix.from_json(v["smatrix"]))
                for v in obj["vertices"]
            ]
            edges = [ (tuple(a), tuple(b)) for a, b in obj["edges"] ]
            din = [tuple(p) for p in obj["dangling_in"]]
            dout = [tuple(p) for p in obj["dangling_out"]]
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed graph: {exc}") from exc
        return cls.build(vertices, edges, din, dout)


def validate(g: QuantumGraph) -> list[str]:
    """Check all graph invariants; returns the list of violations (empty
    when the graph is valid)."""
    errors: list[str] = []
    smats = dict(g.vertices)
    if len(smats) != len(g.vertices):
        errors.append("duplicate vertex ids")

    dims = {s.spec.dim for s in smats.values()}
    if len(dims) > 1:
        errors.append(f"vertices disagree on internal dimension: {sorted(dims)}")

    for vid, s in smats.items():
        if s.spec.total_in != s.spec.total_out:
            errors.append(
                f"vertex {vid}: {s.spec.total_in} in-slots vs "
                f"{s.spec.total_out} out-slots"
            )
        if s.spec.total_in == 0:
            errors.append(f"vertex {vid} has no ports at all")

    if len(g.dangling_in) != len(g.dangling_out):
        errors.append(
            f"{len(g.dangling_in)} dangling in-ports vs "
            f"{len(g.dangling_out)} dangling out-ports"
        )

    seen_out: dict[Port, str] = {}
    seen_in: dict[Port, str] = {}

    def claim(table, port, use, kind):
        vid, slot = port
        if vid not in smats:
            errors.append(f"{use} references unknown vertex {vid}")
            return
        spec = smats[vid].spec
        limit = spec.total_out if kind == "out" else spec.total_in
        if not 0 <= slot < limit:
            errors.append(f"{use} references slot {slot} out of range on vertex {vid}")
            return
        if port in table:
            errors.append(f"{kind}-slot {port} used by both {table[port]} and {use}")
        else:
            table[port] = use

    for src, dst in g.internal_edges:
        if src[0] == dst[0]:
            errors.append(
                f"self-loop on vertex {src[0]}; model it as two vertices"
            )
        claim(seen_out, src, f"edge {src}->{dst}", "out")
        claim(seen_in, dst, f"edge {src}->{dst}", "in")
    for i, port in enumerate(g.dangling_in):
        claim(seen_in, port, f"dangling_in[{i}]", "in")
    for i, port in enumerate(g.dangling_out):
        claim(seen_out, port, f"dangling_out[{i}]", "out")

    for vid, s in smats.items():
        for slot in range(s.spec.total_in):
            if (vid, slot) not in seen_in:
                errors.append(f"in-slot ({vid}, {slot}) is neither wired nor dangling")
        for slot in range(s.spec.total_out):
            if (vid, slot) not in seen_out:
                errors.append(f"out-slot ({vid}, {slot}) is neither wired nor dangling")
    return errors


@dataclass
class _SuperVertex:
    """Partially contracted sub-graph: a matrix plus the identities of its
    remaining in/out slots (original (vertex, slot) ports)."""

    smatrix: ScatteringMatrix
    in_ports: list
    out_ports: list


def _merge(a: _SuperVertex, b: _SuperVertex, edges: list):
    """Star-merge two super-vertices; ``a`` acts as the left factor."""
    a_out_set = set(a.out_ports)
    a_in_set = set(a.in_ports)
    b_out_set = set(b.out_ports)
    b_in_set = set(b.in_ports)
    fwd = [(src, dst) for src, dst in edges if src in a_out_set and dst in b_in_set]
    bwd = [(src, dst) for src, dst in edges if src in b_out_set and dst in a_in_set]
    wired = set(fwd) | set(bwd)
    remaining = [e for e in edges if e not in wired]

    d = a.smatrix.spec.dim
    a_ext_in = [p for p in a.in_ports if p not in {dst for _, dst in bwd}]
    a_ext_out = [p for p in a.out_ports if p not in {src for src, _ in fwd}]
    b_ext_in = [p for p in b.in_ports if p not in {dst for _, dst in fwd}]
    b_ext_out = [p for p in b.out_ports if p not in {src for src, _ in bwd}]

    # Permute a: external slots first, interface slots last in edge order.
    a_in_perm = [a.in_ports.index(p) for p in a_ext_in] + [
        a.in_ports.index(dst) for _, dst in bwd
    ]
    a_out_perm = [a.out_ports.index(p) for p in a_ext_out] + [
        a.out_ports.index(src) for src, _ in fwd
    ]
    sa = a.smatrix.permuted(a_in_perm, a_out_perm).with_spec(
        PortSpec(len(a_ext_in), len(a_ext_out), len(bwd), len(fwd), d)
    )

    # Permute b: interface slots first, in the same edge order as a's.
    b_in_perm = [b.in_ports.index(dst) for _, dst in fwd] + [
        b.in_ports.index(p) for p in b_ext_in
    ]
    b_out_perm = [b.out_ports.index(src) for src, _ in bwd] + [
        b.out_ports.index(p) for p in b_ext_out
    ]
    sb = b.smatrix.permuted(b_in_perm, b_out_perm).with_spec(
        PortSpec(len(fwd), len(bwd), len(b_ext_in), len(b_ext_out), d)
    )

    merged = _SuperVertex(
        star(sb, sa),
        a_ext_in + b_ext_in,
        a_ext_out + b_ext_out,
    )
    return merged, remaining


def contract(g: QuantumGraph, order=None) -> ScatteringMatrix:
    """Contract the graph to its global scattering matrix.

    Row/column blocks follow the dangling label order.  ``order`` is an
    optional sequence of vertex-id pairs; a merged super-vertex keeps the
    smaller id.  Default order: ascending vertex id, pairwise.
    """
    problems = validate(g)
    if problems:
        raise InvalidInputError("invalid graph: " + "; ".join(problems))

    live: dict[int, _SuperVertex] = {}
    for vid, s in g.vertices:
        live[vid] = _SuperVertex(
            s,
            [(vid, j) for j in range(s.spec.total_in)],
            [(vid, j) for j in range(s.spec.total_out)],
        )
    edges = list(g.internal_edges)

    if order is None:
        ids = sorted(live)
        order = [(ids[0], ids[i]) for i in range(1, len(ids))]

    for ia, ib in order:
        if ia not in live or ib not in live:
            raise InvalidInputError(f"contraction pair ({ia}, {ib}) not available")
        if ia == ib:
            raise InvalidInputError(f"cannot contract vertex {ia} with itself")
        merged, edges = _merge(live[ia], live[ib], edges)
        keep, drop = min(ia, ib), max(ia, ib)
        del live[drop]
        live[keep] = merged

    if len(live) != 1:
        raise InvalidInputError(
            f"contraction order left {len(live)} components unmerged"
        )
    final = next(iter(live.values()))
    if edges:
        raise InvalidInputError(f"unresolved internal edges after contraction: {edges}")

    n = len(g.dangling_in)
    in_perm = [final.in_ports.index(p) for p in g.dangling_in]
    out_perm = [final.out_ports.index(p) for p in g.dangling_out]
    result = final.smatrix.permuted(in_perm, out_perm)
    return result.with_spec(PortSpec(n, n, 0, 0, g.vertices[0][1].spec.dim))
