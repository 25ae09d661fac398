"""Small pure-python oracles used to cross-check the library.

Everything here enumerates explicitly, channel subsets included, and stays
deliberately independent of the implementation under test.  Only usable on
tiny instances.
"""

import itertools
import math

from chanrec.netmodel import ChannelAssignment


def node_channel_load(net, y, v, w):
    return sum(
        net.demands[e]
        for e in net.incident_edges(v)
        if y.channel_of[e] == w
    )


def brute_m1(net, y, k):
    kk = min(k, net.n_channels)
    best = 0.0
    for v in range(net.n_nodes):
        for S in itertools.combinations(range(net.n_channels), kk):
            best = max(best, sum(node_channel_load(net, y, v, w) for w in S))
    return best


def brute_m2(net, y, k, max_size=None):
    kk = min(k, net.n_channels)
    top = net.n_nodes if max_size is None else min(net.n_nodes, max_size)
    best = 0.0
    for size in range(3, top + 1, 2):
        for U in itertools.combinations(range(net.n_nodes), size):
            induced = net.induced_edges(U)
            for S in itertools.combinations(range(net.n_channels), kk):
                tot = sum(net.demands[e] for e in induced if y.channel_of[e] in S)
                best = max(best, 2.0 * tot / (size - 1))
    return best


def brute_capacity(net, y, k):
    return max(brute_m1(net, y, k), brute_m2(net, y, k))


def brute_beta(net, y):
    z = math.inf
    for v in range(net.n_nodes):
        for w in range(net.n_channels):
            load = sum(
                net.demands[e] / net.capacity[w][e]
                for e in net.incident_edges(v)
                if y.channel_of[e] == w
            )
            if load > 0:
                z = min(z, 1.0 / load)
    for size in range(3, net.n_nodes + 1, 2):
        for U in itertools.combinations(range(net.n_nodes), size):
            induced = net.induced_edges(U)
            for w in range(net.n_channels):
                load = sum(
                    net.demands[e] / net.capacity[w][e]
                    for e in induced
                    if y.channel_of[e] == w
                )
                if load > 0:
                    z = min(z, (size - 1) / (2.0 * load))
    return z


def all_assignments(net):
    for vec in itertools.product(range(net.n_channels), repeat=net.n_edges):
        yield ChannelAssignment(vec)


def best_partition_value(values):
    """Optimal two-way split: minimal max part sum."""
    total = sum(values)
    best = total
    n = len(values)
    for r in range(n + 1):
        for combo in itertools.combinations(range(n), r):
            s = sum(values[i] for i in combo)
            best = min(best, max(s, total - s))
    return float(best)


def items_pack(volumes, n_bins, cap, eps=1e-9):
    """Backtracking bin packing: can all volumes fit into n_bins of cap?"""
    bins = [0.0] * n_bins
    order = sorted(volumes, reverse=True)

    def place(i):
        if i == len(order):
            return True
        tried = set()
        for b in range(n_bins):
            key = round(bins[b], 12)
            if key in tried:
                continue
            tried.add(key)
            if bins[b] + order[i] <= cap + eps:
                bins[b] += order[i]
                if place(i + 1):
                    return True
                bins[b] -= order[i]
        return False

    return place(0)


def is_bipartite(net):
    color = [-1] * net.n_nodes
    for start in range(net.n_nodes):
        if color[start] != -1:
            continue
        color[start] = 0
        queue = [start]
        while queue:
            v = queue.pop()
            for e in net.incident_edges(v):
                a, b = net.edges[e]
                u = b if a == v else a
                if color[u] == -1:
                    color[u] = 1 - color[v]
                    queue.append(u)
                elif color[u] == color[v]:
                    return False
    return True


def sequential_proper_assignment(net, rng):
    """Interference-free assignment by first-fit coloring on a shuffled edge
    order.  Needs n_channels >= 2*d_max - 1."""
    order = list(range(net.n_edges))
    rng.shuffle(order)
    chan = [-1] * net.n_edges
    for e in order:
        u, v = net.edges[e]
        used = {
            chan[f]
            for x in (u, v)
            for f in net.incident_edges(x)
            if chan[f] != -1
        }
        w = 0
        while w in used:
            w += 1
        if w >= net.n_channels:
            raise ValueError("not enough channels for a proper assignment")
        chan[e] = w
    return ChannelAssignment(tuple(chan))
