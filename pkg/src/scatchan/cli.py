"""Scenario-driven batch runner.

Subcommands:
  run <scenario.json>     evaluate a scenario, emit CSV and SVG into --out
  verify <scenario.json>  run the oracle cross-checks, print max residuals
  star <A.json> <B.json> <wiring.json>  compose two scatterers

Exit codes: 0 success, 2 malformed scenario or missing file, 3 numerical
consistency failure.  Output bytes are deterministic for identical inputs,
independent of --threads.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import capacity, channel, composer, physics
from .errors import InvalidInputError, ScatchanError
from .graph import QuantumGraph, contract
from .numerics import max_abs, operator_norm
from .smatrix import ScatteringMatrix, unitarity_defect

VERIFY_TOL = 1e-9

# ---------------------------------------------------------------------------
# SVG emission (hand-rolled: deterministic bytes, no plotting dependency)

_SVG_W, _SVG_H = 900, 480
_ML, _MR, _MT, _MB = 70, 20, 40, 50
_COLORS = ("#1f5fa8", "#c23b22", "#2e8540", "#8a5fa8")


def _ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    raw = np.linspace(lo, hi, n)
    return [float(t) for t in raw]


def _fmt(x: float) -> str:
    return "%.3g" % x


def svg_line_plot(x, curves, title, xlabel, ylabel, shade_mask=None) -> str:
    """Polyline plot as an SVG 1.1 string.

    ``curves`` is a list of (label, y-array); ``shade_mask`` marks x-ranges
    to highlight (contiguous True runs become shaded bands).
    """
    x = np.asarray(x, dtype=float)
    x_lo, x_hi = float(x[0]), float(x[-1])
    y_lo = min(float(np.min(y)) for _, y in curves)
    y_hi = max(float(np.max(y)) for _, y in curves)
    if y_hi - y_lo < 1e-12:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    pw = _SVG_W - _ML - _MR
    ph = _SVG_H - _MT - _MB

    def px(v):
        return _ML + (v - x_lo) / (x_hi - x_lo) * pw

    def py(v):
        return _MT + (y_hi - v) / (y_hi - y_lo) * ph

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_SVG_W}" height="{_SVG_H}" viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
        f'<text x="{_SVG_W // 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{title}</text>',
    ]

    if shade_mask is not None:
        mask = np.asarray(shade_mask, dtype=bool)
        edges = np.flatnonzero(np.diff(np.concatenate(([False], mask, [False]))))
        for a, b in zip(edges[::2], edges[1::2]):
            x0, x1 = px(x[a]), px(x[min(b, len(x) - 1)])
            parts.append(
                f'<rect x="{x0:.2f}" y="{_MT}" width="{max(x1 - x0, 0.5):.2f}" '
                f'height="{ph}" fill="#f5c6c6" fill-opacity="0.6"/>'
            )

    # axes + ticks
    parts.append(
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" '
        f'fill="none" stroke="black"/>'
    )
    for t in _ticks(x_lo, x_hi):
        xx = px(t)
        parts.append(f'<line x1="{xx:.2f}" y1="{_MT + ph}" x2="{xx:.2f}" '
                     f'y2="{_MT + ph + 5}" stroke="black"/>')
        parts.append(f'<text x="{xx:.2f}" y="{_MT + ph + 20}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="12">{_fmt(t)}</text>')
    for t in _ticks(y_lo, y_hi):
        yy = py(t)
        parts.append(f'<line x1="{_ML - 5}" y1="{yy:.2f}" x2="{_ML}" '
                     f'y2="{yy:.2f}" stroke="black"/>')
        parts.append(f'<text x="{_ML - 8}" y="{yy + 4:.2f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="12">{_fmt(t)}</text>')
    parts.append(f'<text x="{_ML + pw // 2}" y="{_SVG_H - 10}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13">{xlabel}</text>')
    parts.append(f'<text x="18" y="{_MT + ph // 2}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13" '
                 f'transform="rotate(-90 18 {_MT + ph // 2})">{ylabel}</text>')

    for i, (label, y) in enumerate(curves):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(
            f"{px(xi):.2f},{py(min(max(float(yi), y_lo), y_hi)):.2f}"
            for xi, yi in zip(x, y)
        )
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.2"/>')
        ly = _MT + 18 + 16 * i
        parts.append(f'<line x1="{_ML + pw - 150}" y1="{ly - 4}" '
                     f'x2="{_ML + pw - 125}" y2="{ly - 4}" stroke="{color}" '
                     f'stroke-width="2"/>')
        parts.append(f'<text x="{_ML + pw - 120}" y="{ly}" '
                     f'font-family="sans-serif" font-size="12">{label}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# Scenario handling


def load_scenario(path: str) -> dict:
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"scenario is not valid JSON: {exc}") from exc
    kind = obj.get("kind")
    if kind not in ("barrier-sweep", "graph-contract", "star-demo"):
        raise InvalidInputError(f"unknown scenario kind: {kind!r}")
    if "name" not in obj:
        obj["name"] = os.path.splitext(os.path.basename(path))[0]
    return obj


def _sweep_inputs(sc: dict):
    grid = sc.get("grid", {})
    start = float(grid.get("start", 0.005))
    stop = float(grid.get("stop", 2.0))
    points = int(grid.get("points", 20000))
    if points < 2:
        raise InvalidInputError(f"grid needs at least 2 points, got {points}")
    if not 0 < start < stop:
        raise InvalidInputError(f"bad grid range ({start}, {stop})")
    base = physics.BarrierParams(
        energy_ratio=start,  # placeholder; the sweep substitutes per-point values
        epsilon=float(sc.get("epsilon", 0.0)),
        half_width=float(sc["half_width"]),
        separation=float(sc["separation"]),
        eta=float(sc.get("eta", 0.0)),
    )
    return base, np.linspace(start, stop, points)


def run_barrier_sweep(sc: dict, out_dir: str, threads: int) -> list[str]:
    base, grid = _sweep_inputs(sc)
    table = physics.energy_sweep(
        base, grid,
        cross_check_every=int(sc.get("cross_check_every", 100)),
        threads=threads,
    )
    name = sc["name"]
    os.makedirs(out_dir, exist_ok=True)
    emitted = []

    csv_path = os.path.join(out_dir, f"{name}.csv")
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(table.to_csv())
    emitted.append(csv_path)

    trans_svg = svg_line_plot(
        table.energy,
        [
            ("p up, double", table.p_up_double),
            ("p down, double", table.p_dn_double),
            ("p up, single", table.p_up_single),
            ("p down, single", table.p_dn_single),
        ],
        f"Transmission probabilities ({name})",
        "E / V0", "transmission probability",
        shade_mask=table.superactivated,
    )
    trans_path = os.path.join(out_dir, f"{name}_transmission.svg")
    with open(trans_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(trans_svg)
    emitted.append(trans_path)

    cap_svg = svg_line_plot(
        table.energy,
        [
            ("Q low, double", table.q_low_double),
            ("Q up, double", table.q_up_double),
            ("Q low, single", table.q_low_single),
            ("Q up, single", table.q_up_single),
        ],
        f"Capacity bounds ({name})",
        "E / V0", "qubits per use",
        shade_mask=table.superactivated,
    )
    cap_path = os.path.join(out_dir, f"{name}_capacity.svg")
    with open(cap_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(cap_svg)
    emitted.append(cap_path)
    return emitted


def run_graph_contract(sc: dict, out_dir: str) -> list[str]:
    g = QuantumGraph.from_json(sc["graph"])
    s_g = contract(g)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{sc['name']}_global.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(s_g.to_json(), fh, indent=1, sort_keys=True)
        fh.write("\n")
    return [path]


def run_star_demo(sc: dict, out_dir: str) -> list[str]:
    s1 = ScatteringMatrix.from_json(sc["s1"])
    s2 = ScatteringMatrix.from_json(sc["s2"])
    wiring = composer.Wiring.from_json(sc["wiring"]) if "wiring" in sc else None
    result = composer.star(s2, s1, wiring)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{sc['name']}_star.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(result.to_json(), fh, indent=1, sort_keys=True)
        fh.write("\n")
    return [path]


# ---------------------------------------------------------------------------
# Verification


def verify_barrier_sweep(sc: dict, out) -> float:
    """Closed-form vs pipeline, series vs star, unitarity, CPTP."""
    base, grid = _sweep_inputs(sc)
    sample = grid[:: max(1, len(grid) // 64)]
    worst = 0.0
    for e in sample:
        p = physics.BarrierParams(
            float(e), base.epsilon, base.half_width, base.separation, base.eta
        )
        for double, closed in (
            (False, physics.single_barrier_m(p)),
            (True, physics.double_barrier_m(p)),
        ):
            piped = physics.pipeline_m(p, double=double)
            worst = max(worst, float(np.max(np.abs(piped - closed.m_op))))

    # star vs geometric series on the barrier pair at a contractive energy
    p_mid = physics.BarrierParams(
        float(sample[len(sample) // 2]), base.epsilon,
        base.half_width, base.separation, base.eta,
    )
    b1 = physics.barrier_smatrix(p_mid)
    b2 = physics.translated_barrier(b1, p_mid)
    if operator_norm(b2.block("L", "L") @ b1.block("R", "R")) < 1.0:
        direct = composer.star(b2, b1)
        series = composer.star_via_series(b2, b1, tol=1e-14)
        worst = max(worst, max_abs(direct.matrix - series.matrix))

    # unitarity of the contracted double-barrier global matrix
    s_g = contract(physics.double_barrier_graph(p_mid))
    worst = max(worst, unitarity_defect(s_g.matrix))

    # CPTP of the induced erasure channel
    m = channel.transmission_operator(s_g, 1, 4)
    ch = channel.ErasureChannel(m)
    kraus = channel.kraus_set(ch)
    comp = sum(k.conj().T @ k for k in kraus)
    worst = max(worst, max_abs(comp - np.eye(ch.d)))
    j = channel.choi(ch)
    worst = max(worst, max(0.0, -float(np.min(np.linalg.eigvalsh(j)))))

    print(f"closed-form/pipeline + oracle residual max: {worst:.3e}", file=out)
    return worst


def verify_graph_contract(sc: dict, out) -> float:
    g = QuantumGraph.from_json(sc["graph"])
    s_g = contract(g)
    worst = unitarity_defect(s_g.matrix)
    print(f"global S unitarity defect: {worst:.3e}", file=out)
    return worst


def verify_star_demo(sc: dict, out) -> float:
    s1 = ScatteringMatrix.from_json(sc["s1"])
    s2 = ScatteringMatrix.from_json(sc["s2"])
    wiring = composer.Wiring.from_json(sc["wiring"]) if "wiring" in sc else None
    direct = composer.star(s2, s1, wiring)
    series = composer.star_via_series(s2, s1, wiring, tol=1e-14)
    worst = max_abs(direct.matrix - series.matrix)
    worst = max(worst, unitarity_defect(direct.matrix))
    trans = direct.block("R", "L")
    print(f"transmission block:\n{np.array_str(trans, precision=12)}", file=out)
    if "expected_transmission" in sc:
        gap = abs(abs(trans[0, 0]) - float(sc["expected_transmission"]))
        print(f"|transmission| deviation from expected: {gap:.3e}", file=out)
        worst = max(worst, gap)
    print(f"star/series + unitarity residual max: {worst:.3e}", file=out)
    return worst


# ---------------------------------------------------------------------------
# Entry point


def _cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    if sc["kind"] == "barrier-sweep":
        emitted = run_barrier_sweep(sc, args.out, args.threads)
    elif sc["kind"] == "graph-contract":
        emitted = run_graph_contract(sc, args.out)
    else:
        emitted = run_star_demo(sc, args.out)
    for path in emitted:
        print(path)
    return 0


def _cmd_verify(args) -> int:
    sc = load_scenario(args.scenario)
    if sc["kind"] == "barrier-sweep":
        worst = verify_barrier_sweep(sc, sys.stdout)
    elif sc["kind"] == "graph-contract":
        worst = verify_graph_contract(sc, sys.stdout)
    else:
        worst = verify_star_demo(sc, sys.stdout)
    if worst > VERIFY_TOL:
        print(f"FAIL: residual {worst:.3e} exceeds {VERIFY_TOL:.0e}", file=sys.stderr)
        return 3
    print("all residuals within tolerance")
    return 0


def _cmd_star(args) -> int:
    with open(args.first, "r", encoding="utf-8") as fh:
        s1 = ScatteringMatrix.from_json(json.load(fh))
    with open(args.second, "r", encoding="utf-8") as fh:
        s2 = ScatteringMatrix.from_json(json.load(fh))
    with open(args.wiring, "r", encoding="utf-8") as fh:
        wiring = composer.Wiring.from_json(json.load(fh))
    result = composer.star(s2, s1, wiring)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "star.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(result.to_json(), fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(path)
    print(f"unitarity defect: {unitarity_defect(result.matrix):.3e}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="scatchan",
        description="Scattering-network channel simulator",
    )
    parser.add_argument("--out", default="./out", help="output directory")
    parser.add_argument(
        "--threads", type=int, default=os.cpu_count() or 1,
        help="worker threads for sweeps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario, emit CSV/SVG")
    p_run.add_argument("scenario")
    p_run.set_defaults(func=_cmd_run)

    p_ver = sub.add_parser("verify", help="run oracle cross-checks")
    p_ver.add_argument("scenario")
    p_ver.set_defaults(func=_cmd_verify)

    p_star = sub.add_parser("star", help="compose two scatterers")
    p_star.add_argument("first")
    p_star.add_argument("second")
    p_star.add_argument("wiring")
    p_star.set_defaults(func=_cmd_star)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, json.JSONDecodeError, InvalidInputError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ScatchanError as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
