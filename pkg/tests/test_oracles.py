"""Exact solvers against full enumeration and the reduction cross-checks."""

import itertools
import math

import numpy as np
import pytest

from brute import (
    all_assignments,
    best_partition_value,
    brute_beta,
    brute_capacity,
    brute_m1,
    is_bipartite,
    items_pack,
)
from chanrec.experiments import InstanceSpec, generate_instance
from chanrec.metrics import ODDSET_EXACT_CAP, TOL, recovery_capacity
from chanrec.netmodel import make_network
from chanrec.oracles import (
    solve_feasi_exact,
    solve_whiterec_exact,
    solve_whiterecinf_exact,
)


def test_triangle_with_three_channels():
    k3 = make_network(3, [(0, 1), (0, 2), (1, 2)], [1.0] * 3, 3, capacity=1.0)
    res = solve_whiterec_exact(k3, 1)
    assert res.objective == 1.0
    assert res.proven_optimal and res.explored >= 1
    assert res.best_assignment is not None
    assert len(set(res.best_assignment.channel_of)) == 3


def test_triangle_single_channel_odd_set_drives_value():
    k3 = make_network(3, [(0, 1), (0, 2), (1, 2)], [1.0] * 3, 1)
    res = solve_whiterecinf_exact(k3, 1)
    assert res.objective == 3.0  # the whole triangle on one channel


def test_infeasible_star_is_reported():
    star = make_network(4, [(0, 1), (0, 2), (0, 3)], [1.0] * 3, 1, capacity=2.0)
    res = solve_whiterec_exact(star, 1)
    assert res.infeasible
    assert res.best_assignment is None and res.proven_optimal
    assert math.isinf(res.objective)
    doc = res.to_json_dict(star)
    assert doc["objective"] is None and doc["assignment"] is None
    assert doc["proven_optimal"] is True


def test_budget_exhaustion_flags_result():
    net = make_network(
        6,
        [(i, j) for i in range(6) for j in range(i + 1, 6)],
        [1.0] * 15,
        3,
        capacity=1e9,
    )
    res = solve_whiterec_exact(net, 1, limit=1)
    assert not res.proven_optimal
    assert res.best_assignment is not None  # incumbent from the seeded schemes
    full = solve_whiterec_exact(net, 1)
    assert full.proven_optimal
    assert full.objective <= res.objective + TOL


def test_oracle_rejects_oversized_instances():
    big = make_network(ODDSET_EXACT_CAP + 1, [(0, 1)], [1.0], 2)
    with pytest.raises(ValueError):
        solve_whiterec_exact(big, 1)


def test_result_json_shape():
    k3 = make_network(3, [(0, 1), (0, 2), (1, 2)], [1.0] * 3, 2, capacity=10.0)
    doc = solve_whiterec_exact(k3, 1).to_json_dict(k3)
    assert list(doc) == ["objective", "proven_optimal", "explored", "assignment"]
    assert set(doc["assignment"]) == {"0", "1", "2"}
    assert all(v in ("w0", "w1") for v in doc["assignment"].values())


def test_star_partition_cross_check():
    rng = np.random.default_rng(31)
    for trial in range(40):
        n_leaves = int(rng.integers(2, 9))
        demands = [float(rng.integers(1, 60)) for _ in range(n_leaves)]
        star = make_network(
            n_leaves + 1,
            [(0, i + 1) for i in range(n_leaves)],
            demands,
            2,
            capacity=1e9,
        )
        res = solve_whiterecinf_exact(star, 1)
        assert res.proven_optimal
        assert res.objective == best_partition_value(demands), trial


def test_star_bin_packing_cross_check():
    rng = np.random.default_rng(37)
    agree_feasible = 0
    for trial in range(60):
        n_items = int(rng.integers(2, 8))
        m_bins = int(rng.integers(1, 4))
        volumes = [float(rng.integers(1, 11)) / 10.0 for _ in range(n_items)]
        star = make_network(
            n_items + 1,
            [(0, i + 1) for i in range(n_items)],
            volumes,
            m_bins,
            capacity=1.0,
        )
        res = solve_feasi_exact(star)
        assert res.proven_optimal
        packs = items_pack(volumes, m_bins, 1.0)
        assert (res.objective >= 1.0 - TOL) == packs, (trial, volumes, m_bins)
        agree_feasible += packs
    assert 0 < agree_feasible < 60  # both outcomes exercised


def _tiny_instances(seed, count, max_edges=7):
    rng = np.random.default_rng(seed)
    made = 0
    while made < count:
        spec = InstanceSpec(
            n_nodes=int(rng.integers(3, 6)),
            n_channels=int(rng.integers(1, 4)),
        )
        net = generate_instance(spec, int(rng.integers(0, 2**63)))
        if net.n_edges == 0 or net.n_edges > max_edges:
            continue
        made += 1
        yield net


def test_whiterec_matches_full_enumeration():
    for i, net in enumerate(_tiny_instances(41, 25)):
        for k in (1, 2):
            res = solve_whiterec_exact(net, k)
            assert res.proven_optimal
            best = math.inf
            for y in all_assignments(net):
                if brute_beta(net, y) >= 1.0 - TOL:
                    best = min(best, brute_capacity(net, y, k))
            if math.isinf(best):
                assert res.infeasible, i
            else:
                assert abs(res.objective - best) < 1e-9, i
                # returned assignment really attains the optimum and is feasible
                y = res.best_assignment
                assert abs(brute_capacity(net, y, k) - best) < 1e-9
                assert brute_beta(net, y) >= 1.0 - TOL


def test_whiterecinf_matches_full_enumeration_and_relaxation_order():
    for i, net in enumerate(_tiny_instances(43, 25)):
        for k in (1, 2):
            res = solve_whiterecinf_exact(net, k)
            assert res.proven_optimal
            best = min(brute_capacity(net, y, k) for y in all_assignments(net))
            assert abs(res.objective - best) < 1e-9, i
            strict = solve_whiterec_exact(net, k)
            assert res.objective <= strict.objective + TOL


def test_feasi_matches_full_enumeration():
    for i, net in enumerate(_tiny_instances(47, 25)):
        res = solve_feasi_exact(net)
        assert res.proven_optimal
        best = max(brute_beta(net, y) for y in all_assignments(net))
        assert abs(res.objective - best) < 1e-9 * max(1.0, best), i
        assert abs(brute_beta(net, res.best_assignment) - best) < 1e-9 * max(1.0, best)


def test_lower_bound_on_optimum():
    # the busiest node spreads its demand over at most |W| channels, so any
    # k of them carry at least a k/|W| share
    for net in _tiny_instances(53, 20):
        dmax = max(
            sum(net.demands[e] for e in net.incident_edges(v))
            for v in range(net.n_nodes)
        )
        for k in (1, 2):
            res = solve_whiterecinf_exact(net, k)
            bound = min(k, net.n_channels) / net.n_channels * dmax
            assert res.objective >= bound - 1e-9


def test_bipartite_optimum_is_node_term_optimum():
    rng = np.random.default_rng(59)
    done = 0
    while done < 15:
        spec = InstanceSpec(n_nodes=int(rng.integers(3, 6)), n_channels=2)
        net = generate_instance(spec, int(rng.integers(0, 2**63)))
        if net.n_edges == 0 or net.n_edges > 7 or not is_bipartite(net):
            continue
        for k in (1, 2):
            res = solve_whiterecinf_exact(net, k)
            only_m1 = min(brute_m1(net, y, k) for y in all_assignments(net))
            assert abs(res.objective - only_m1) < 1e-9
        done += 1


def test_homogeneous_feasi_equals_capacity_reciprocal():
    rng = np.random.default_rng(61)
    for net in _tiny_instances(61, 15):
        homog = make_network(
            net.n_nodes,
            net.edges,
            net.demands,
            net.n_channels,
            capacity=float(rng.integers(50, 200)),
        )
        beta = solve_feasi_exact(homog).objective
        c_min = solve_whiterecinf_exact(homog, 1).objective
        r = homog.capacity[0][0]
        assert abs(beta - r / c_min) < 1e-9 * max(1.0, beta)


def test_oracle_is_deterministic():
    net = next(iter(_tiny_instances(67, 1)))
    a = solve_whiterec_exact(net, 2)
    b = solve_whiterec_exact(net, 2)
    assert a == b
    fa = solve_feasi_exact(net)
    fb = solve_feasi_exact(net)
    assert fa == fb


def test_edgeless_instances():
    net = make_network(4, [], [], 2)
    res = solve_whiterec_exact(net, 1)
    assert res.objective == 0.0 and res.proven_optimal
    assert res.best_assignment is not None and len(res.best_assignment) == 0
    feas = solve_feasi_exact(net)
    assert math.isinf(feas.objective) and feas.proven_optimal
