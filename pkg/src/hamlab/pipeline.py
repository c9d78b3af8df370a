"""End-to-end drivers: the well-connected digraph pipeline (degree >= n/3
regime), the oriented pipeline (degree >= n/4 regime), and the dispatching
analyze entry point.

Soundness contract: a report never carries an unverified cycle, and a
non-Hamiltonicity verdict always rests on a checkable cut certificate or an
exhaustive search.  Constructive stages that fall outside their desk-scale
hypotheses downgrade to the exact oracle, with the downgrade recorded in the
stage trace.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .balancer import WellConnectivityRefuted, balance_four, contract, expand_cycle
from .config import PipelineConfig
from .expander import ExpansionParams, find_witness
from .graph import Digraph, GraphProfile, graph_profile, hamilton_cycle_error
from .identification import (
    canonical_pair,
    hamilton_from_four_partition,
    hamilton_from_nine_partition,
    identify,
)
from .matchings import HypothesisViolation, cycle_free_path_systems
from .oracle import find_hamilton_exact, non_hamiltonicity_certificate
from .partitions import (
    KSquarePartition,
    PartitionParams,
    extremalize,
    partition_from_witness,
    validate_partition,
)

__all__ = ["HamiltonReport", "theorem16_pipeline", "theorem13_pipeline", "analyze"]


@dataclass
class HamiltonReport:
    """Outcome of an analysis: verified cycle, certified non-Hamiltonicity,
    or unknown, plus the stage trace that produced it."""

    outcome: str  # "cycle" | "not_hamiltonian" | "unknown"
    route: str
    profile: GraphProfile
    config: PipelineConfig
    cycle: Optional[list[int]] = None
    certificate: Optional[dict] = None
    trace: list = field(default_factory=list)
    elapsed: Optional[float] = None  # excluded from canonical serialization

    @property
    def exit_code(self) -> int:
        return {"cycle": 0, "not_hamiltonian": 1, "unknown": 2}[self.outcome]

    def to_json_dict(self, include_timings: bool = False) -> dict:
        out = {
            "outcome": self.outcome,
            "route": self.route,
            "profile": self.profile.to_json_dict(),
            "config": self.config.to_json_dict(),
            "cycle": self.cycle,
            "certificate": self.certificate,
            "trace": self.trace,
        }
        if include_timings:
            out["elapsed_seconds"] = self.elapsed
        return out

    def to_json(self, include_timings: bool = False) -> str:
        return json.dumps(self.to_json_dict(include_timings), sort_keys=True)


def _verified(cycle, g: Digraph) -> list[int]:
    err = hamilton_cycle_error(g, cycle)
    if err is not None:
        raise AssertionError(f"pipeline produced an unverified cycle: {err}")
    cycle = list(cycle)
    pos = cycle.index(0)
    return cycle[pos:] + cycle[:pos]


def _oracle_report(g: Digraph, config: PipelineConfig, route: str,
                   profile: GraphProfile, trace: list) -> HamiltonReport:
    res = find_hamilton_exact(g, budget=config.oracle_budget, hk_cap=config.hk_cap)
    trace.append({"stage": "oracle", "outcome": res.outcome, "method": res.method})
    if res.found:
        return HamiltonReport("cycle", route, profile, config, _verified(res.cycle, g), None, trace)
    if res.outcome == "not_hamiltonian":
        cert = non_hamiltonicity_certificate(g, max_cut_size=config.max_cut_size)
        if cert is not None:
            cert_dict = {"type": "cut", **cert.to_json_dict()}
        else:
            cert_dict = {"type": "exhaustive_search", "n": g.n, "method": res.method}
        return HamiltonReport("not_hamiltonian", route, profile, config, None, cert_dict, trace)
    return HamiltonReport("unknown", route, profile, config, None, None, trace)


def _witness_stage(g: Digraph, config: PipelineConfig, trace: list):
    """Exact witness search under the cap, heuristic beyond; returns
    (witness, conclusive) where conclusive means absence certifies expansion."""
    params = ExpansionParams(config.nu, config.tau)
    if g.n <= config.expander_cap:
        w = find_witness(g, params, mode="exact", exact_n_cap=config.expander_cap)
        trace.append({
            "stage": "expander",
            "mode": "exact",
            "witness": w.to_json_dict() if w else None,
        })
        return w, True
    w = find_witness(g, params, mode="heuristic", budget=config.heuristic_budget, seed=config.seed)
    trace.append({
        "stage": "expander",
        "mode": "heuristic",
        "witness": w.to_json_dict() if w else None,
    })
    return w, False


def _extremal_partition(g: Digraph, witness, config: PipelineConfig, trace: list) -> KSquarePartition:
    params = ExpansionParams(config.nu, config.tau)
    p0 = partition_from_witness(g, witness, params)
    part_params = PartitionParams(config.tau, 4 * config.nu)
    p = extremalize(g, p0, part_params)
    report = validate_partition(g, p, part_params)
    trace.append({"stage": "extremal-partition", "report": report.to_json_dict()})
    return p


def theorem16_pipeline(g: Digraph, config: Optional[PipelineConfig] = None) -> HamiltonReport:
    """Well-connected regular digraph route: expander fast path, witness
    partition, extremalize, the four balancing cases, contraction, and the
    balanced-partition driver; every hypothesis failure downgrades to the
    exact oracle with a trace entry."""
    config = config or PipelineConfig()
    t0 = time.perf_counter()
    profile = graph_profile(g)
    trace: list = [{"stage": "profile", "report": profile.to_json_dict()}]
    report = _theorem16_inner(g, config, profile, trace)
    report.elapsed = time.perf_counter() - t0
    return report


def _theorem16_inner(g, config, profile, trace) -> HamiltonReport:
    route = "theorem16"
    if profile.is_regular is None:
        trace.append({"stage": "precondition", "note": "input not regular; oracle route"})
        return _oracle_report(g, config, route, profile, trace)
    witness, conclusive = _witness_stage(g, config, trace)
    if witness is None:
        note = "robust expander certified" if conclusive else "heuristic inconclusive"
        trace.append({"stage": "fast-path", "note": note})
        return _oracle_report(g, config, route, profile, trace)
    p = _extremal_partition(g, witness, config, trace)
    try:
        result, p_final = balance_four(g, p, well_connected=True, seed=config.seed)
    except WellConnectivityRefuted as exc:
        trace.append({
            "stage": "balance-four",
            "note": "well-connectivity refuted",
            "witness_bipartition": [list(exc.a), list(exc.b)],
        })
        return _oracle_report(g, config, route, profile, trace)
    except (HypothesisViolation, ValueError) as exc:
        trace.append({"stage": "balance-four", "note": f"hypothesis violation: {exc}"})
        return _oracle_report(g, config, route, profile, trace)
    trace.append({"stage": "balance-four", "case": result.case,
                  "edges": result.system.edge_count})
    g2, p2, record = contract(g, p_final, result.system)
    trace.append({"stage": "contract", "n": g2.n})
    if len(p2.cell(0, 1)) != len(p2.cell(1, 0)) or not p2.cell(0, 1):
        trace.append({"stage": "driver", "note": "contracted partition unusable"})
        return _oracle_report(g, config, route, profile, trace)
    sub_trace: list = []
    cycle2 = hamilton_from_four_partition(
        g2, p2, budget=config.oracle_budget, hk_cap=config.hk_cap, trace=sub_trace
    )
    trace.append({"stage": "driver", "sub": sub_trace, "found": cycle2 is not None})
    if cycle2 is None:
        return _oracle_report(g, config, route, profile, trace)
    cycle = expand_cycle(record, cycle2)
    return HamiltonReport("cycle", route, profile, config, _verified(cycle, g), None, trace)


def theorem13_pipeline(g: Digraph, config: Optional[PipelineConfig] = None) -> HamiltonReport:
    """Regular oriented route: witness partition, orientation and index
    normalizations, the surplus-set removal, the nested expander case split
    on the second identification graph, and either direct contraction
    (nested expander) or the Z-partition route through the nine-partition
    driver."""
    config = config or PipelineConfig()
    t0 = time.perf_counter()
    profile = graph_profile(g)
    trace: list = [{"stage": "profile", "report": profile.to_json_dict()}]
    report = _theorem13_inner(g, config, profile, trace)
    report.elapsed = time.perf_counter() - t0
    return report


def _theorem13_inner(g, config, profile, trace) -> HamiltonReport:
    route = "theorem13"
    if profile.is_regular is None or not profile.is_oriented:
        trace.append({"stage": "precondition", "note": "input not regular oriented; oracle route"})
        return _oracle_report(g, config, route, profile, trace)
    d = profile.is_regular
    witness, conclusive = _witness_stage(g, config, trace)
    if witness is None:
        note = "robust expander certified" if conclusive else "heuristic inconclusive"
        trace.append({"stage": "fast-path", "note": note})
        return _oracle_report(g, config, route, profile, trace)
    p = _extremal_partition(g, witness, config, trace)

    # WLOG |V11| <= |V22| (index swap), then |V12| >= |V21| (edge reversal)
    swapped = len(p.cell(0, 0)) > len(p.cell(1, 1))
    if swapped:
        p = p.relabel([1, 0])
    work_g = g
    transposed = len(p.cell(0, 1)) < len(p.cell(1, 0))
    if transposed:
        work_g = g.transpose()
        p = p.transpose()
    trace.append({"stage": "wlog", "swapped": swapped, "transposed": transposed})

    def to_original(cycle: list[int]) -> list[int]:
        return list(reversed(cycle)) if transposed else cycle

    v12 = sorted(p.cell(0, 1))
    v21 = sorted(p.cell(1, 0))
    r = len(v12) - len(v21)
    surplus = v12[:r]
    trace.append({"stage": "surplus", "r": r})
    if not v21:
        trace.append({"stage": "case-split", "note": "V21 empty; hypotheses broken"})
        return _oracle_report(g, config, route, profile, trace)
    gm, keep = work_g.without_vertices(surplus)
    index = {v: i for i, v in enumerate(keep)}
    w_cells = {
        key: {index[v] for v in p.cell(*key) if v not in set(surplus)}
        for key in p.cells
    }
    w_part = KSquarePartition(2, gm.n, w_cells)
    nested_witness = None
    j2 = identify(gm, w_part, canonical_pair(w_part, 1), drop_loops=True)
    nested_params = ExpansionParams(config.nu_nested, config.tau)
    if j2.graph.n <= config.expander_cap:
        nested_witness = find_witness(
            j2.graph, nested_params, mode="exact", exact_n_cap=config.expander_cap
        )
        nested_mode = "exact"
    else:
        nested_witness = find_witness(
            j2.graph, nested_params, mode="heuristic",
            budget=config.heuristic_budget, seed=config.seed,
        )
        nested_mode = "heuristic"
    trace.append({
        "stage": "nested-expander",
        "mode": nested_mode,
        "n": j2.graph.n,
        "witness": nested_witness.to_json_dict() if nested_witness else None,
    })

    if nested_witness is None:
        # Case 1: a path system of exactly r edges inside the forward block
        if r == 0:
            q_edges: list[tuple[int, int]] = []
        else:
            block = [
                (u, v)
                for u in sorted(p.row(0))
                for v in work_g.out_neighbors(u)
                if v in p.col(1)
            ]
            try:
                res = cycle_free_path_systems(
                    work_g, [block], Fraction(d, 2 * work_g.n), seed=config.seed
                )
            except (HypothesisViolation, ValueError) as exc:
                trace.append({"stage": "case-1", "note": f"hypothesis violation: {exc}"})
                return _oracle_report(g, config, route, profile, trace)
            if res.systems[0].edge_count < r:
                trace.append({"stage": "case-1", "note": "quota shortfall"})
                return _oracle_report(g, config, route, profile, trace)
            q_edges = sorted(res.systems[0].edges)[:r]
        from .graph import PathSystem

        g2, p2, record = contract(work_g, p, PathSystem(q_edges))
        trace.append({"stage": "case-1-contract", "n": g2.n, "q_edges": len(q_edges)})
        if len(p2.cell(0, 1)) != len(p2.cell(1, 0)) or not p2.cell(0, 1):
            trace.append({"stage": "case-1", "note": "contracted partition unusable"})
            return _oracle_report(g, config, route, profile, trace)
        sub_trace: list = []
        cycle2 = hamilton_from_four_partition(
            g2, p2, budget=config.oracle_budget, hk_cap=config.hk_cap, trace=sub_trace
        )
        trace.append({"stage": "case-1-driver", "sub": sub_trace, "found": cycle2 is not None})
        if cycle2 is None:
            return _oracle_report(g, config, route, profile, trace)
        cycle = to_original(expand_cycle(record, cycle2))
        return HamiltonReport("cycle", route, profile, config, _verified(cycle, g), None, trace)

    # Case 2: build the 9-partition from the nested witness's partition
    u_params = nested_params
    try:
        u_part = partition_from_witness(j2.graph, nested_witness, u_params)
    except ValueError as exc:
        trace.append({"stage": "case-2", "note": f"stale nested witness: {exc}"})
        return _oracle_report(g, config, route, profile, trace)
    pair = j2.pair
    x_sets = [
        {pair.phi_row(lbl) for lbl in u_part.row(i)} for i in range(2)
    ]
    y_sets = [
        {pair.phi_col(lbl) for lbl in u_part.col(i)} for i in range(2)
    ]
    w22 = w_part.cell(1, 1)
    w21 = w_part.cell(1, 0)
    w12 = w_part.cell(0, 1)
    w11 = w_part.cell(0, 0)
    z_cells = {
        (0, 0): w22 & x_sets[0] & y_sets[0],
        (0, 1): w22 & x_sets[0] & y_sets[1],
        (0, 2): w21 & x_sets[0],
        (1, 0): w22 & x_sets[1] & y_sets[0],
        (1, 1): w22 & x_sets[1] & y_sets[1],
        (1, 2): w21 & x_sets[1],
        (2, 0): w12 & y_sets[0],
        (2, 1): w12 & y_sets[1],
        (2, 2): set(w11),
    }
    # back to the full vertex set: reinstate the surplus set (into Z_11)
    z_full = {
        key: {keep[v] for v in cell} for key, cell in z_cells.items()
    }
    z_full[(0, 0)] = z_full[(0, 0)] | set(surplus)
    z_part = KSquarePartition(3, work_g.n, z_full)
    part_params = PartitionParams(config.tau / 6, 20 * config.nu_nested)
    z_ext = extremalize(work_g, z_part, part_params)
    trace.append({"stage": "case-2-Z", "report": validate_partition(work_g, z_ext, part_params).to_json_dict()})
    sub_trace = []
    cycle_w = hamilton_from_nine_partition(
        work_g, z_ext,
        tau_n=float(config.tau * work_g.n / 6),
        budget=config.oracle_budget, hk_cap=config.hk_cap,
        seed=config.seed, trace=sub_trace,
    )
    trace.append({"stage": "case-2-driver", "sub": sub_trace, "found": cycle_w is not None})
    if cycle_w is None:
        return _oracle_report(g, config, route, profile, trace)
    cycle = to_original(cycle_w)
    return HamiltonReport("cycle", route, profile, config, _verified(cycle, g), None, trace)


def analyze(g: Digraph, config: Optional[PipelineConfig] = None) -> HamiltonReport:
    """Dispatch: regular oriented graphs take the oriented pipeline, other
    regular digraphs the well-connected pipeline, everything else the plain
    oracle.  Outputs are always verified."""
    config = config or PipelineConfig()
    profile = graph_profile(g)
    if profile.is_regular is not None and profile.is_oriented:
        return theorem13_pipeline(g, config)
    if profile.is_regular is not None:
        return theorem16_pipeline(g, config)
    t0 = time.perf_counter()
    trace: list = [{"stage": "profile", "report": profile.to_json_dict()},
                   {"stage": "precondition", "note": "not regular; plain oracle"}]
    report = _oracle_report(g, config, "oracle", profile, trace)
    report.elapsed = time.perf_counter() - t0
    return report
