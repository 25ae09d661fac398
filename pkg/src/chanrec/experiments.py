"""Instance generation and reproducible experiment studies.

Instances are random graphs with a degree cap: node pairs are visited in
seeded-random order and an edge is added with probability ``edge_prob``
unless either endpoint already has ``degree_cap`` edges.  Demands are drawn
uniformly per link; capacity is drawn uniformly per channel and shared by all
links on that channel.

Every instance gets its own seed derived from the master seed and a running
instance index with a splitmix-style mix (golden-ratio increment plus the
standard 64-bit finalizer), so studies are reproducible and insensitive to
how work is split across processes.

``runtime_ms`` is measured on the in-memory records but written as 0 in CSV
exports: study outputs are byte-reproducible across runs and job counts, and
wall-clock time is not.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .assign import greedy_assign, ifa_assign, random_assign
from .metrics import (
    ODDSET_EXACT_CAP,
    FeasibilityReport,
    RecoveryReport,
    feasibility_ratio,
    recovery_capacity,
)
from .netmodel import ChannelAssignment, Network
from .oracles import OracleResult, solve_feasi_exact, solve_whiterec_exact

_MASK64 = (1 << 64) - 1

DEFAULT_MASTER_SEED = 20240611


def derive_seed(master: int, index: int) -> int:
    """Per-instance seed: splitmix64 of the master advanced index+1 steps."""
    z = (master + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4B5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class InstanceSpec:
    """Parameters of the random instance family."""

    n_nodes: int
    n_channels: int
    edge_prob: float = 0.6
    degree_cap: int = 8
    demand_range: tuple[float, float] = (1.0, 100.0)
    capacity_range: tuple[float, float] = (75.0, 200.0)

    def __post_init__(self) -> None:
        if self.n_nodes < 1 or self.n_channels < 1:
            raise ValueError("n_nodes and n_channels must be >= 1")
        if not 0.0 <= self.edge_prob <= 1.0:
            raise ValueError("edge_prob must be in [0, 1]")
        if self.degree_cap < 0:
            raise ValueError("degree_cap must be >= 0")
        for lo, hi in (self.demand_range, self.capacity_range):
            if lo <= 0 or hi < lo:
                raise ValueError("ranges must satisfy 0 < lo <= hi")


def generate_instance(spec: InstanceSpec, seed: int) -> Network:
    """Draw one instance.  Draw order (fixed for reproducibility): pair
    visiting order, one coin per visited pair, demands in edge-addition
    order, then one capacity per channel."""
    rng = np.random.default_rng(seed)
    n = spec.n_nodes
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    visit = rng.permutation(len(pairs))
    degree = [0] * n
    edges: list[tuple[int, int]] = []
    for i in visit:
        u, v = pairs[i]
        coin = rng.random()
        if (
            coin < spec.edge_prob
            and degree[u] < spec.degree_cap
            and degree[v] < spec.degree_cap
        ):
            edges.append((u, v))
            degree[u] += 1
            degree[v] += 1
    demands = tuple(
        float(rng.uniform(spec.demand_range[0], spec.demand_range[1]))
        for _ in edges
    )
    per_channel = [
        float(rng.uniform(spec.capacity_range[0], spec.capacity_range[1]))
        for _ in range(spec.n_channels)
    ]
    capacity = tuple(tuple(c for _ in edges) for c in per_channel)
    return Network(
        node_names=tuple(f"n{i}" for i in range(n)),
        channel_names=tuple(f"w{i}" for i in range(spec.n_channels)),
        edges=tuple(edges),
        demands=demands,
        capacity=capacity,
    )


def uniform_demand_capacity_bound(
    r: float, k: int, d_max: int, n_channels: int
) -> float:
    """Capacity of the coloring-based scheme under uniform demand r never
    exceeds this."""
    return r * k * math.ceil((d_max + 1) / n_channels)


# -- records --------------------------------------------------------------

CSV_HEADER = (
    "instance_id,seed,n_nodes,n_edges,n_channels,k,algorithm,"
    "m1,m2_lo,m2_hi,capacity_lo,capacity_hi,beta,l_tot,ratio,runtime_ms"
)


@dataclass(frozen=True)
class ExperimentRecord:
    instance_id: int
    seed: int
    n_nodes: int
    n_edges: int
    n_channels: int
    k: int
    algorithm: str
    m1: float
    m2_lo: float
    m2_hi: float
    capacity_lo: float
    capacity_hi: float
    beta: float
    l_tot: float
    ratio: float
    # measured wall time; excluded from equality because it is the one field
    # that cannot be reproduced across runs (CSV writes a placeholder)
    runtime_ms: float = field(compare=False, default=0.0)
    assignment: ChannelAssignment | None = None
    feasible: str = ""
    proven_optimal: bool | None = None

    def csv_row(self) -> str:
        f = "{:.9f}".format
        return ",".join(
            [
                str(self.instance_id),
                str(self.seed),
                str(self.n_nodes),
                str(self.n_edges),
                str(self.n_channels),
                str(self.k),
                self.algorithm,
                f(self.m1),
                f(self.m2_lo),
                f(self.m2_hi),
                f(self.capacity_lo),
                f(self.capacity_hi),
                f(self.beta),
                f(self.l_tot),
                f(self.ratio),
                f(0.0),  # placeholder: wall time is not reproducible
            ]
        )


def write_records_csv(records: Iterable[ExperimentRecord], path: str) -> None:
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for rec in records:
            fh.write(rec.csv_row() + "\n")


def _beta_value(feas: FeasibilityReport) -> float:
    return feas.beta_lo


def make_record(
    instance_id: int,
    seed: int,
    net: Network,
    k: int,
    algorithm: str,
    y: ChannelAssignment,
    rec: RecoveryReport,
    feas: FeasibilityReport,
    runtime_ms: float,
    proven_optimal: bool | None = None,
) -> ExperimentRecord:
    l_tot = net.total_demand
    cap_hi = rec.capacity_hi
    m2_lo = rec.m2 if rec.mode == "exact" else rec.m2_lo
    m2_hi = rec.m2 if rec.mode == "exact" else rec.m2_hi
    return ExperimentRecord(
        instance_id=instance_id,
        seed=seed,
        n_nodes=net.n_nodes,
        n_edges=net.n_edges,
        n_channels=net.n_channels,
        k=k,
        algorithm=algorithm,
        m1=rec.m1,
        m2_lo=m2_lo,
        m2_hi=m2_hi,
        capacity_lo=float(rec.capacity_lo),
        capacity_hi=float(cap_hi),
        beta=float(_beta_value(feas)),
        l_tot=float(l_tot),
        ratio=float(cap_hi / l_tot) if l_tot > 0 else 0.0,
        runtime_ms=runtime_ms,
        assignment=y,
        feasible=feas.feasible,
        proven_optimal=proven_optimal,
    )


def _run_tasks(tasks: list, fn, jobs: int) -> list:
    if jobs <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        chunk = max(1, len(tasks) // (jobs * 4))
        return list(pool.map(fn, tasks, chunksize=chunk))


# -- scaling study --------------------------------------------------------


def _scaling_task(args: tuple) -> ExperimentRecord:
    spec, k, instance_id, seed = args
    t0 = time.perf_counter()
    net = generate_instance(spec, seed)
    y = ifa_assign(net)
    mode = "exact" if net.n_nodes <= ODDSET_EXACT_CAP else "bracket"
    rec = recovery_capacity(net, y, k, mode=mode)
    feas = feasibility_ratio(net, y, mode=mode)
    dt = (time.perf_counter() - t0) * 1000.0
    return make_record(instance_id, seed, net, k, "ifa", y, rec, feas, dt)


def run_scaling_study(
    sizes: Sequence[int],
    channel_counts: Sequence[int],
    k: int,
    trials: int,
    seed: int = DEFAULT_MASTER_SEED,
    demand: float | None = None,
    jobs: int = 1,
) -> tuple[list[ExperimentRecord], dict]:
    """Capacity-to-total-demand ratio of the coloring scheme as size grows.

    Fits log(mean ratio) against log(size) per channel count and reports the
    decay exponent (the negated slope).
    """
    base = InstanceSpec(n_nodes=2, n_channels=1)
    tasks = []
    instance_id = 0
    for w in channel_counts:
        for size in sizes:
            spec = replace(base, n_nodes=size, n_channels=w)
            if demand is not None:
                spec = replace(spec, demand_range=(demand, demand))
            for _ in range(trials):
                tasks.append((spec, k, instance_id, derive_seed(seed, instance_id)))
                instance_id += 1
    records = _run_tasks(tasks, _scaling_task, jobs)

    cells = []
    exponents = {}
    for w in channel_counts:
        log_sizes = []
        log_ratios = []
        for size in sizes:
            rs = [
                r.ratio
                for r in records
                if r.n_channels == w and r.n_nodes == size
            ]
            mean_ratio = float(np.mean(rs)) if rs else 0.0
            cells.append(
                {
                    "n_channels": w,
                    "n_nodes": size,
                    "trials": len(rs),
                    "mean_ratio": mean_ratio,
                }
            )
            if mean_ratio > 0:
                log_sizes.append(math.log(size))
                log_ratios.append(math.log(mean_ratio))
        if len(log_sizes) >= 2:
            slope = float(np.polyfit(log_sizes, log_ratios, 1)[0])
            exponents[str(w)] = -slope
    summary = {
        "kind": "scaling",
        "k": k,
        "sizes": list(sizes),
        "channel_counts": list(channel_counts),
        "trials": trials,
        "seed": seed,
        "cells": cells,
        "exponents": exponents,
    }
    return records, summary


# -- gap study ------------------------------------------------------------


def _gap_task(args: tuple) -> list[ExperimentRecord]:
    spec, k_values, instance_id, seed, budget = args
    net = generate_instance(spec, seed)
    out: list[ExperimentRecord] = []
    schemes = [("greedy", greedy_assign(net)), ("random", random_assign(net, seed))]
    if net.n_channels > net.max_degree:
        schemes.insert(1, ("ifa", ifa_assign(net)))
    for k in k_values:
        t0 = time.perf_counter()
        opt = solve_whiterec_exact(net, k, limit=budget)
        dt = (time.perf_counter() - t0) * 1000.0
        if opt.best_assignment is not None:
            rec = recovery_capacity(net, opt.best_assignment, k, mode="exact")
            feas = feasibility_ratio(net, opt.best_assignment, mode="exact")
            out.append(
                make_record(
                    instance_id, seed, net, k, "optimal",
                    opt.best_assignment, rec, feas, dt,
                    proven_optimal=opt.proven_optimal,
                )
            )
        else:
            out.append(
                ExperimentRecord(
                    instance_id, seed, net.n_nodes, net.n_edges,
                    net.n_channels, k, "optimal",
                    math.inf, math.inf, math.inf, math.inf, math.inf,
                    -math.inf, net.total_demand, math.inf, dt,
                    assignment=None, feasible="no",
                    proven_optimal=opt.proven_optimal,
                )
            )
        for name, y in schemes:
            t0 = time.perf_counter()
            rec = recovery_capacity(net, y, k, mode="exact")
            feas = feasibility_ratio(net, y, mode="exact")
            dt = (time.perf_counter() - t0) * 1000.0
            out.append(
                make_record(instance_id, seed, net, k, name, y, rec, feas, dt)
            )
    return out


def run_gap_study(
    sizes: Sequence[int],
    channel_counts: Sequence[int],
    k_values: Sequence[int],
    trials: int,
    seed: int = DEFAULT_MASTER_SEED,
    budget: int = 300_000,
    jobs: int = 1,
    spec_overrides: dict | None = None,
) -> tuple[list[ExperimentRecord], dict]:
    """Capacity gap of each scheme versus the proven optimum, per cell.

    Instances whose exact solve runs out of budget, or that are infeasible,
    are flagged in the summary and excluded from the mean gaps.
    """
    tasks = []
    instance_id = 0
    for w in channel_counts:
        for size in sizes:
            spec = InstanceSpec(n_nodes=size, n_channels=w)
            if spec_overrides:
                spec = replace(spec, **spec_overrides)
            for _ in range(trials):
                tasks.append(
                    (spec, tuple(k_values), instance_id,
                     derive_seed(seed, instance_id), budget)
                )
                instance_id += 1
    records = [r for batch in _run_tasks(tasks, _gap_task, jobs) for r in batch]

    cells = []
    for w in channel_counts:
        for size in sizes:
            for k in k_values:
                cell = [
                    r for r in records
                    if r.n_channels == w and r.n_nodes == size and r.k == k
                ]
                opt_by_id = {
                    r.instance_id: r for r in cell if r.algorithm == "optimal"
                }
                solved = {
                    i: r for i, r in opt_by_id.items()
                    if r.proven_optimal and r.assignment is not None
                    and r.capacity_hi > 0
                }
                exhausted = sum(
                    1 for r in opt_by_id.values() if not r.proven_optimal
                )
                infeasible = sum(
                    1 for r in opt_by_id.values()
                    if r.proven_optimal and r.assignment is None
                )
                gaps: dict[str, list[float]] = {}
                for r in cell:
                    if r.algorithm == "optimal" or r.instance_id not in solved:
                        continue
                    opt_val = solved[r.instance_id].capacity_hi
                    gaps.setdefault(r.algorithm, []).append(
                        (r.capacity_hi - opt_val) / opt_val
                    )
                mean_gap = {
                    alg: float(np.mean(vals))
                    for alg, vals in sorted(gaps.items())
                }
                counts = {alg: len(vals) for alg, vals in sorted(gaps.items())}
                cells.append(
                    {
                        "n_channels": w,
                        "n_nodes": size,
                        "k": k,
                        "trials": len(opt_by_id),
                        "solved": len(solved),
                        "exhausted": exhausted,
                        "infeasible": infeasible,
                        "mean_gap": mean_gap,
                        "gap_counts": counts,
                    }
                )
    summary = {
        "kind": "gap",
        "sizes": list(sizes),
        "channel_counts": list(channel_counts),
        "k_values": list(k_values),
        "trials": trials,
        "seed": seed,
        "budget": budget,
        "cells": cells,
    }
    return records, summary


# -- traffic study --------------------------------------------------------


def _traffic_task(args: tuple) -> list[ExperimentRecord]:
    spec, instance_id, seed, budget = args
    net = generate_instance(spec, seed)
    out: list[ExperimentRecord] = []
    t0 = time.perf_counter()
    opt = solve_feasi_exact(net, limit=budget)
    dt = (time.perf_counter() - t0) * 1000.0
    schemes = [("greedy", greedy_assign(net)), ("random", random_assign(net, seed))]
    if net.n_channels > net.max_degree:
        schemes.insert(1, ("ifa", ifa_assign(net)))
    if opt.best_assignment is not None:
        rec = recovery_capacity(net, opt.best_assignment, 1, mode="exact")
        feas = feasibility_ratio(net, opt.best_assignment, mode="exact")
        out.append(
            make_record(
                instance_id, seed, net, 1, "optimal",
                opt.best_assignment, rec, feas, dt,
                proven_optimal=opt.proven_optimal,
            )
        )
    for name, y in schemes:
        t0 = time.perf_counter()
        rec = recovery_capacity(net, y, 1, mode="exact")
        feas = feasibility_ratio(net, y, mode="exact")
        dt = (time.perf_counter() - t0) * 1000.0
        out.append(
            make_record(instance_id, seed, net, 1, name, y, rec, feas, dt)
        )
    return out


def run_traffic_study(
    sizes: Sequence[int],
    channel_counts: Sequence[int],
    trials: int,
    seed: int = DEFAULT_MASTER_SEED,
    budget: int = 300_000,
    jobs: int = 1,
    spec_overrides: dict | None = None,
) -> tuple[list[ExperimentRecord], dict]:
    """Sustained traffic fraction min(beta, 1) of each scheme versus the
    best achievable margin."""
    tasks = []
    instance_id = 0
    for w in channel_counts:
        for size in sizes:
            spec = InstanceSpec(n_nodes=size, n_channels=w)
            if spec_overrides:
                spec = replace(spec, **spec_overrides)
            for _ in range(trials):
                tasks.append(
                    (spec, instance_id, derive_seed(seed, instance_id), budget)
                )
                instance_id += 1
    records = [r for batch in _run_tasks(tasks, _traffic_task, jobs) for r in batch]

    cells = []
    for w in channel_counts:
        for size in sizes:
            cell = [
                r for r in records if r.n_channels == w and r.n_nodes == size
            ]
            opt_by_id = {
                r.instance_id: r for r in cell if r.algorithm == "optimal"
            }
            solved = {
                i for i, r in opt_by_id.items() if r.proven_optimal
            }
            sustained: dict[str, list[float]] = {}
            for r in cell:
                if r.instance_id not in solved:
                    continue
                sustained.setdefault(r.algorithm, []).append(
                    min(r.beta, 1.0)
                )
            mean_sustained = {
                alg: float(np.mean(vals))
                for alg, vals in sorted(sustained.items())
            }
            counts = {alg: len(vals) for alg, vals in sorted(sustained.items())}
            cells.append(
                {
                    "n_channels": w,
                    "n_nodes": size,
                    "trials": len(opt_by_id),
                    "solved": len(solved),
                    "exhausted": len(opt_by_id) - len(solved),
                    "mean_sustained": mean_sustained,
                    "sustained_counts": counts,
                }
            )
    summary = {
        "kind": "traffic",
        "sizes": list(sizes),
        "channel_counts": list(channel_counts),
        "trials": trials,
        "seed": seed,
        "budget": budget,
        "cells": cells,
    }
    return records, summary
