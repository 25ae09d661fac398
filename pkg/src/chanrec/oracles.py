"""Exact solvers for small instances, by pruned exhaustive search.

Three problems over all |W|^|E| channel assignments:

* ``solve_whiterec_exact``: minimize recovery capacity among feasible
  assignments (every node and odd-set capacity constraint holds);
* ``solve_whiterecinf_exact``: minimize recovery capacity, capacities
  ignored;
* ``solve_feasi_exact``: maximize the feasibility margin ``beta``.

The search assigns edges in descending demand order (ties by index) and
channels in ascending order.  Capacity searches prune on a lower bound that
combines the node term of the partially assigned edges with a static floor:
every node eventually spreads its demand over the channels, so its top-k
channels carry at least k/|W| of its incident total.  Feasibility constraints
prune as soon as a node constraint is violated; odd-set constraints are
checked at leaves only.  All tie-breaks are deterministic: the incumbent is
seeded with the interference-free, greedy, and seed-0 random assignments (in
that order) and only strictly better leaves replace it, so the result is the
first optimum in that fixed order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assign import greedy_assign, ifa_assign, random_assign
from .metrics import ODDSET_EXACT_CAP, TOL, _odd_masks, capacity_floor
from .netmodel import ChannelAssignment, Network

DEFAULT_LEAF_BUDGET = 10_000_000


@dataclass(frozen=True)
class OracleResult:
    """Outcome of an exact solve.

    ``objective`` is ``inf`` and ``best_assignment`` is None when a
    constrained search proves there is no feasible assignment.  When the leaf
    budget runs out, ``proven_optimal`` is False and the incumbent (possibly
    None) is returned.
    """

    problem: str
    objective: float
    best_assignment: ChannelAssignment | None
    explored: int
    proven_optimal: bool

    @property
    def infeasible(self) -> bool:
        return (
            self.proven_optimal
            and self.best_assignment is None
            and math.isinf(self.objective)
        )

    def to_json_dict(self, net: Network) -> dict:
        if self.best_assignment is None:
            amap = None
        else:
            amap = {
                str(e): net.channel_names[w]
                for e, w in enumerate(self.best_assignment.channel_of)
            }
        return {
            "objective": None if math.isinf(self.objective) else self.objective,
            "proven_optimal": self.proven_optimal,
            "explored": self.explored,
            "assignment": amap,
        }


class _Tables:
    """Precomputed odd-set data for fast leaf evaluation.

    Capacity side: only subsets whose best possible contribution exceeds the
    static capacity floor are kept (others can never raise max(m1, m2) above
    m1).  Feasibility side: only subsets that could violate their constraint
    under the worst channel choice are kept; the margin side keeps every
    subset with induced demand.
    """

    def __init__(self, net: Network, k: int, need_feas: bool, need_margin: bool):
        n, m, w = net.n_nodes, net.n_edges, net.n_channels
        self.k_eff = min(k, w) if k >= 1 else 1
        dem = np.asarray(net.demands)
        masks, sizes = _odd_masks(n)
        member = np.zeros((len(masks), m))
        for e, (u, v) in enumerate(net.edges):
            member[:, e] = ((masks >> u) & (masks >> v) & 1).astype(np.float64)
        tot = member @ dem
        scale = 2.0 / (sizes - 1.0) if len(sizes) else np.zeros(0)

        floor0 = capacity_floor(net, max(k, 1))
        keep = scale * tot > floor0 * (1.0 + 1e-12)
        self.member_cap = member[keep]
        self.scale_cap = scale[keep]

        self.rho = np.array(
            [[net.demands[e] / net.capacity[wi][e] for wi in range(w)] for e in range(m)]
        )
        limits = (sizes - 1.0) / 2.0
        if need_feas:
            rho_max = self.rho.max(axis=1) if m else np.zeros(0)
            wmax = member @ rho_max
            keep_f = wmax > limits / (1.0 - TOL)
            self.member_feas = member[keep_f]
            self.limits_feas = limits[keep_f]
        if need_margin:
            keep_m = tot > 0.0
            self.member_margin = member[keep_m]
            self.limits_margin = limits[keep_m]

    def oddset_term(self, net: Network, a: np.ndarray) -> float:
        if not len(self.member_cap):
            return 0.0
        onehot = np.zeros((net.n_edges, net.n_channels))
        onehot[np.arange(net.n_edges), a] = net.demands
        loads = self.member_cap @ onehot
        if self.k_eff < net.n_channels:
            loads = np.sort(loads, axis=1)[:, net.n_channels - self.k_eff :]
        return float((self.scale_cap * loads.sum(axis=1)).max())

    def _oddset_margins(
        self, net: Network, a: np.ndarray, member: np.ndarray, limits: np.ndarray
    ) -> float:
        if not len(member):
            return math.inf
        onehot = np.zeros((net.n_edges, net.n_channels))
        idx = np.arange(net.n_edges)
        onehot[idx, a] = self.rho[idx, a]
        loads = member @ onehot
        with np.errstate(divide="ignore"):
            margins = np.where(loads > 0.0, limits[:, None] / loads, math.inf)
        return float(margins.min())

    def oddset_feasible(self, net: Network, a: np.ndarray, z1: float) -> bool:
        z2 = self._oddset_margins(net, a, self.member_feas, self.limits_feas)
        return min(z1, z2) >= 1.0 - TOL

    def oddset_margin_full(self, net: Network, a: np.ndarray) -> float:
        return self._oddset_margins(net, a, self.member_margin, self.limits_margin)


def _check_oracle_instance(net: Network) -> None:
    if net.n_nodes > ODDSET_EXACT_CAP:
        raise ValueError(
            f"exact solvers enumerate odd sets and stop at {ODDSET_EXACT_CAP} nodes"
        )


def _node_margin(wload: float) -> float:
    return 1.0 / wload if wload > 0.0 else math.inf


def _solve_capacity(
    net: Network, k: int, limit: int, constrained: bool
) -> OracleResult:
    problem = "whiterec" if constrained else "whiterecinf"
    if k < 1:
        raise ValueError("k must be >= 1")
    if limit < 1:
        raise ValueError("limit must be >= 1")
    _check_oracle_instance(net)
    if net.n_edges == 0:
        return OracleResult(problem, 0.0, ChannelAssignment(()), 1, True)

    m, w = net.n_edges, net.n_channels
    k_eff = min(k, w)
    frac = k_eff / w
    dem = net.demands
    tables = _Tables(net, k, need_feas=constrained, need_margin=False)
    order = sorted(range(m), key=lambda e: (-dem[e], e))
    node_total = [
        sum(dem[e] for e in net.incident_edges(v)) for v in range(net.n_nodes)
    ]
    floor0 = capacity_floor(net, k)

    loads = [[0.0] * w for _ in range(net.n_nodes)]
    wloads = [[0.0] * w for _ in range(net.n_nodes)]
    a = np.full(m, -1, dtype=np.int64)

    best_val = math.inf
    best_assignment: tuple[int, ...] | None = None
    explored = 0
    out_of_budget = False

    def leaf_value(vec: np.ndarray, z1: float) -> float | None:
        """Exact capacity of a complete assignment, None if infeasible."""
        if constrained and not tables.oddset_feasible(net, vec, z1):
            return None
        m1 = 0.0
        for v in range(net.n_nodes):
            lv = loads[v]
            top = sum(sorted(lv)[w - k_eff :])
            if top > m1:
                m1 = top
        return max(m1, tables.oddset_term(net, vec))

    def eval_candidate(y: ChannelAssignment) -> None:
        nonlocal best_val, best_assignment, explored
        vec = np.asarray(y.channel_of, dtype=np.int64)
        for e in range(m):
            u, v = net.edges[e]
            ww = y.channel_of[e]
            loads[u][ww] += dem[e]
            loads[v][ww] += dem[e]
            wloads[u][ww] += tables.rho[e, ww]
            wloads[v][ww] += tables.rho[e, ww]
        z1 = math.inf
        for v in range(net.n_nodes):
            for ww in range(w):
                z1 = min(z1, _node_margin(wloads[v][ww]))
        explored += 1
        ok = (not constrained) or z1 >= 1.0 - TOL
        if ok:
            val = leaf_value(vec, z1)
            if val is not None and val < best_val:
                best_val = val
                best_assignment = tuple(y.channel_of)
        for e in range(m):
            u, v = net.edges[e]
            ww = y.channel_of[e]
            loads[u][ww] -= dem[e]
            loads[v][ww] -= dem[e]
            wloads[u][ww] -= tables.rho[e, ww]
            wloads[v][ww] -= tables.rho[e, ww]

    for cand in (ifa_assign(net), greedy_assign(net), random_assign(net, 0)):
        if explored >= limit:
            out_of_budget = True
            break
        eval_candidate(cand)

    done = best_val <= floor0  # nothing can beat the static floor

    def dfs(pos: int, lb: float, z1: float) -> None:
        nonlocal best_val, best_assignment, explored, out_of_budget, done
        if done or out_of_budget:
            return
        if pos == m:
            if explored >= limit:
                out_of_budget = True
                return
            explored += 1
            val = leaf_value(a, z1)
            if val is not None and val < best_val:
                best_val = val
                best_assignment = tuple(int(x) for x in a)
                if best_val <= floor0:
                    done = True
            return
        e = order[pos]
        u, v = net.edges[e]
        r = dem[e]
        lu, lv = loads[u], loads[v]
        wu, wv = wloads[u], wloads[v]
        for ww in range(w):
            lu[ww] += r
            lv[ww] += r
            top_u = sum(sorted(lu)[w - k_eff :])
            top_v = sum(sorted(lv)[w - k_eff :])
            nb = max(
                lb,
                max(top_u, frac * node_total[u]),
                max(top_v, frac * node_total[v]),
            )
            if nb < best_val:
                if constrained:
                    rho = tables.rho[e, ww]
                    wu[ww] += rho
                    wv[ww] += rho
                    nz1 = min(z1, _node_margin(wu[ww]), _node_margin(wv[ww]))
                    if nz1 >= 1.0 - TOL:
                        a[e] = ww
                        dfs(pos + 1, nb, nz1)
                        a[e] = -1
                    wu[ww] -= rho
                    wv[ww] -= rho
                else:
                    a[e] = ww
                    dfs(pos + 1, nb, z1)
                    a[e] = -1
            lu[ww] -= r
            lv[ww] -= r
            if done or out_of_budget:
                return

    if not done and not out_of_budget:
        dfs(0, floor0, math.inf)

    if best_assignment is None:
        return OracleResult(
            problem, math.inf, None, explored, not out_of_budget
        )
    return OracleResult(
        problem,
        best_val,
        ChannelAssignment(best_assignment),
        explored,
        not out_of_budget,
    )


def solve_whiterec_exact(
    net: Network, k: int, limit: int = DEFAULT_LEAF_BUDGET
) -> OracleResult:
    """Minimum recovery capacity over feasible assignments."""
    return _solve_capacity(net, k, limit, constrained=True)


def solve_whiterecinf_exact(
    net: Network, k: int, limit: int = DEFAULT_LEAF_BUDGET
) -> OracleResult:
    """Minimum recovery capacity over all assignments, capacities ignored."""
    return _solve_capacity(net, k, limit, constrained=False)


def solve_feasi_exact(net: Network, limit: int = DEFAULT_LEAF_BUDGET) -> OracleResult:
    """Maximum feasibility margin beta over all assignments."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    _check_oracle_instance(net)
    if net.n_edges == 0:
        return OracleResult("feasi", math.inf, ChannelAssignment(()), 1, True)

    m, w = net.n_edges, net.n_channels
    dem = net.demands
    tables = _Tables(net, 1, need_feas=False, need_margin=True)
    order = sorted(range(m), key=lambda e: (-dem[e], e))

    wloads = [[0.0] * w for _ in range(net.n_nodes)]
    a = np.full(m, -1, dtype=np.int64)

    best_val = -math.inf
    best_assignment: tuple[int, ...] | None = None
    explored = 0
    out_of_budget = False

    def eval_candidate(y: ChannelAssignment) -> None:
        nonlocal best_val, best_assignment, explored
        vec = np.asarray(y.channel_of, dtype=np.int64)
        z1 = math.inf
        for e in range(m):
            u, v = net.edges[e]
            ww = y.channel_of[e]
            wloads[u][ww] += tables.rho[e, ww]
            wloads[v][ww] += tables.rho[e, ww]
        for v in range(net.n_nodes):
            for ww in range(w):
                z1 = min(z1, _node_margin(wloads[v][ww]))
        explored += 1
        val = min(z1, tables.oddset_margin_full(net, vec))
        if val > best_val:
            best_val = val
            best_assignment = tuple(y.channel_of)
        for e in range(m):
            u, v = net.edges[e]
            ww = y.channel_of[e]
            wloads[u][ww] -= tables.rho[e, ww]
            wloads[v][ww] -= tables.rho[e, ww]

    for cand in (ifa_assign(net), greedy_assign(net), random_assign(net, 0)):
        if explored >= limit:
            out_of_budget = True
            break
        eval_candidate(cand)

    def dfs(pos: int, z1: float) -> None:
        nonlocal best_val, best_assignment, explored, out_of_budget
        if out_of_budget:
            return
        if pos == m:
            if explored >= limit:
                out_of_budget = True
                return
            explored += 1
            val = min(z1, tables.oddset_margin_full(net, a))
            if val > best_val:
                best_val = val
                best_assignment = tuple(int(x) for x in a)
            return
        e = order[pos]
        u, v = net.edges[e]
        wu, wv = wloads[u], wloads[v]
        for ww in range(w):
            rho = tables.rho[e, ww]
            wu[ww] += rho
            wv[ww] += rho
            nz1 = min(z1, _node_margin(wu[ww]), _node_margin(wv[ww]))
            if nz1 > best_val:
                a[e] = ww
                dfs(pos + 1, nz1)
                a[e] = -1
            wu[ww] -= rho
            wv[ww] -= rho
            if out_of_budget:
                return

    dfs(0, math.inf)

    return OracleResult(
        "feasi",
        best_val,
        ChannelAssignment(best_assignment) if best_assignment is not None else None,
        explored,
        not out_of_budget,
    )
