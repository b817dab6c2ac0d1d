"""Integral min-cost flow of a prescribed value, plus a residual-cycle certifier.

The solver is successive shortest augmenting paths: Dijkstra on reduced costs
with node potentials, which is exact because every arc cost is nonnegative.
Flows are stored per arc and are never negative; the antisymmetric textbook
formulation is equivalent and not needed here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._accel import njit

# Distances and potentials stay below this; inputs are checked against it.
INF = np.int64(2**62)
_COST_LIMIT = 2**62


class FlowOverflow(OverflowError):
    pass


@dataclass(frozen=True, eq=False)
class FlowNetwork:
    """Directed network with integer capacities and nonnegative integer costs.

    Parallel and zero-capacity arcs are allowed; the latter carry nothing.
    """

    node_count: int
    source: int
    sink: int
    tails: np.ndarray
    heads: np.ndarray
    capacities: np.ndarray
    costs: np.ndarray

    def __post_init__(self):
        for name in ("tails", "heads", "capacities", "costs"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.int64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.node_count
        if n < 2:
            raise ValueError("a flow network needs at least two nodes")
        if self.source == self.sink:
            raise ValueError("source and sink must differ")
        if not (0 <= self.source < n and 0 <= self.sink < n):
            raise ValueError("source/sink out of range")
        e = len(self.tails)
        if not (len(self.heads) == len(self.capacities) == len(self.costs) == e):
            raise ValueError("arc arrays must have equal length")
        if e:
            if self.tails.min() < 0 or self.heads.min() < 0 or max(self.tails.max(), self.heads.max()) >= n:
                raise ValueError("arc endpoint out of range")
            if self.capacities.min() < 0 or self.costs.min() < 0:
                raise ValueError("capacities and costs must be nonnegative")

    @classmethod
    def from_arcs(cls, node_count, source, sink, arcs):
        arcs = list(arcs)
        cols = list(zip(*arcs)) if arcs else ([], [], [], [])
        for col in cols:
            for x in col:
                if int(x) != x:
                    raise ValueError("arc data must be integers")
                if abs(int(x)) >= _COST_LIMIT:
                    raise FlowOverflow(f"arc value {x} exceeds the exact-arithmetic bound")
        return cls(node_count, source, sink, *(np.array(c, dtype=np.int64) for c in cols))

    @property
    def arc_count(self) -> int:
        return len(self.tails)

    @property
    def arcs(self) -> list[tuple[int, int, int, int]]:
        return list(
            zip(self.tails.tolist(), self.heads.tolist(), self.capacities.tolist(), self.costs.tolist())
        )


@dataclass(frozen=True, eq=False)
class Flow:
    flows: np.ndarray
    value: int
    cost: int


def _check_magnitudes(network: FlowNetwork, target: int):
    caps = network.capacities.tolist()
    costs = network.costs.tolist()
    if sum(costs) >= _COST_LIMIT:
        raise FlowOverflow("sum of arc costs exceeds the exact-arithmetic bound")
    worst = sum(min(c, target) * w for c, w in zip(caps, costs))
    if worst >= _COST_LIMIT:
        raise FlowOverflow("possible flow cost exceeds the exact-arithmetic bound")


@njit
def _build_residual(node_count, tails, heads):
    # residual arc 2e is arc e forward, 2e+1 its reverse; CSR keeps arc order
    e = tails.shape[0]
    deg = np.zeros(node_count + 1, dtype=np.int64)
    for a in range(e):
        deg[tails[a] + 1] += 1
        deg[heads[a] + 1] += 1
    for v in range(node_count):
        deg[v + 1] += deg[v]
    adj = np.empty(2 * e, dtype=np.int64)
    fill = deg[:-1].copy()
    for a in range(e):
        u = tails[a]
        adj[fill[u]] = 2 * a
        fill[u] += 1
        v = heads[a]
        adj[fill[v]] = 2 * a + 1
        fill[v] += 1
    return deg, adj


@njit
def _heap_push(hk, hv, size, key, val):
    i = size
    hk[i] = key
    hv[i] = val
    while i > 0:
        p = (i - 1) // 2
        if hk[p] < hk[i] or (hk[p] == hk[i] and hv[p] <= hv[i]):
            break
        hk[p], hk[i] = hk[i], hk[p]
        hv[p], hv[i] = hv[i], hv[p]
        i = p
    return size + 1


@njit
def _heap_pop(hk, hv, size):
    key = hk[0]
    val = hv[0]
    size -= 1
    hk[0] = hk[size]
    hv[0] = hv[size]
    i = 0
    while True:
        l = 2 * i + 1
        if l >= size:
            break
        c = l
        r = l + 1
        if r < size and (hk[r] < hk[l] or (hk[r] == hk[l] and hv[r] < hv[l])):
            c = r
        if hk[i] < hk[c] or (hk[i] == hk[c] and hv[i] <= hv[c]):
            break
        hk[c], hk[i] = hk[i], hk[c]
        hv[c], hv[i] = hv[i], hv[c]
        i = c
    return key, val, size


@njit
def ssp_kernel(node_count, source, sink, tails, heads, capacities, costs, target):
    """Push ``target`` units from source to sink at minimum cost.

    Returns ``(flow_per_arc, pushed)``; ``pushed < target`` means infeasible.
    Ties between equal-distance labels go to the smaller node id, so the
    result depends only on the input arc order.
    """
    e = tails.shape[0]
    deg, adj = _build_residual(node_count, tails, heads)
    res = np.empty(2 * e, dtype=np.int64)
    rcost = np.empty(2 * e, dtype=np.int64)
    rto = np.empty(2 * e, dtype=np.int64)
    for a in range(e):
        res[2 * a] = capacities[a]
        res[2 * a + 1] = 0
        rcost[2 * a] = costs[a]
        rcost[2 * a + 1] = -costs[a]
        rto[2 * a] = heads[a]
        rto[2 * a + 1] = tails[a]
    pot = np.zeros(node_count, dtype=np.int64)
    dist = np.empty(node_count, dtype=np.int64)
    done = np.zeros(node_count, dtype=np.bool_)
    parent = np.empty(node_count, dtype=np.int64)
    hk = np.empty(2 * e + node_count + 1, dtype=np.int64)
    hv = np.empty(2 * e + node_count + 1, dtype=np.int64)
    pushed = 0
    while pushed < target:
        for v in range(node_count):
            dist[v] = INF
            done[v] = False
            parent[v] = -1
        dist[source] = 0
        size = _heap_push(hk, hv, 0, 0, source)
        while size > 0:
            d, u, size = _heap_pop(hk, hv, size)
            if done[u] or d > dist[u]:
                continue
            done[u] = True
            if u == sink:
                break
            for idx in range(deg[u], deg[u + 1]):
                a = adj[idx]
                if res[a] <= 0:
                    continue
                v = rto[a]
                if done[v]:
                    continue
                nd = d + rcost[a] + pot[u] - pot[v]
                if nd < dist[v]:
                    dist[v] = nd
                    parent[v] = a
                    size = _heap_push(hk, hv, size, nd, v)
        if not done[sink]:
            break
        dt = dist[sink]
        for v in range(node_count):
            if done[v]:
                pot[v] += dist[v]
            else:
                pot[v] += dt
        push = target - pushed
        v = sink
        while v != source:
            a = parent[v]
            if res[a] < push:
                push = res[a]
            v = rto[a ^ 1]
        v = sink
        while v != source:
            a = parent[v]
            res[a] -= push
            res[a ^ 1] += push
            v = rto[a ^ 1]
        pushed += push
    flow = np.empty(e, dtype=np.int64)
    for a in range(e):
        flow[a] = res[2 * a + 1]
    return flow, pushed


@njit
def negative_cycle_kernel(node_count, tails, heads, capacities, costs, flow):
    """Bellman-Ford from a virtual root over the residual graph."""
    e = tails.shape[0]
    dist = np.zeros(node_count, dtype=np.int64)
    for it in range(node_count + 1):
        changed = False
        for a in range(e):
            u = tails[a]
            v = heads[a]
            if flow[a] < capacities[a] and dist[u] + costs[a] < dist[v]:
                dist[v] = dist[u] + costs[a]
                changed = True
            if flow[a] > 0 and dist[v] - costs[a] < dist[u]:
                dist[u] = dist[v] - costs[a]
                changed = True
        if not changed:
            return False
    return True


def solve_min_cost_flow(network: FlowNetwork, target_value: int) -> Flow | None:
    """Cheapest integral flow of exactly ``target_value``; ``None`` if infeasible."""
    if target_value < 0:
        raise ValueError("target value must be nonnegative")
    _check_magnitudes(network, target_value)
    flows, pushed = ssp_kernel(
        network.node_count,
        network.source,
        network.sink,
        network.tails,
        network.heads,
        network.capacities,
        network.costs,
        np.int64(target_value),
    )
    if pushed < target_value:
        return None
    cost = int(np.dot(flows, network.costs))
    return Flow(flows, int(pushed), cost)


def check_feasible(network: FlowNetwork, flow: Flow) -> None:
    f = np.asarray(flow.flows, dtype=np.int64)
    if f.shape != (network.arc_count,):
        raise ValueError("flow has the wrong number of arcs")
    if (f < 0).any() or (f > network.capacities).any():
        raise ValueError("flow violates a capacity bound")
    net = np.zeros(network.node_count, dtype=np.int64)
    np.add.at(net, network.tails, f)
    np.subtract.at(net, network.heads, f)
    inner = np.ones(network.node_count, dtype=bool)
    inner[[network.source, network.sink]] = False
    if net[inner].any():
        raise ValueError("flow violates conservation")
    if int(net[network.source]) != flow.value:
        raise ValueError("flow value does not match the source out-flow")
    if int(np.dot(f, network.costs)) != flow.cost:
        raise ValueError("flow cost does not match the arc costs")


def verify_optimality(network: FlowNetwork, flow: Flow) -> bool:
    """True iff the residual graph of ``flow`` has no negative-cost cycle.

    Raises ``ValueError`` when ``flow`` is not a feasible flow of ``network``.
    """
    check_feasible(network, flow)
    has_cycle = negative_cycle_kernel(
        network.node_count,
        network.tails,
        network.heads,
        network.capacities,
        network.costs,
        np.asarray(flow.flows, dtype=np.int64),
    )
    return not has_cycle
