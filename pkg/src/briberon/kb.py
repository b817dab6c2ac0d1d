"""Minimum-cost priced bribery for (k,b)-elections via min-cost flow.

For every target score K of the preferred candidate p a flow network is built
whose units of flow are ballot points: source -> voter's old slots -> voter's new
slots -> per-candidate collectors -> sink.  Collector arcs into the sink have
capacity K; every point that does not end at p pays a penalty T larger than any
bribery, so a cheapest flow of value k*n first maximizes p's score (capped at K)
and only then minimizes the bribery price.  Sweeping K and keeping the cheapest
plan in which p scores exactly K gives the optimum.

Free-form elections add an unassigned slot per voter.  Points that end there go
straight to the sink and pay the same penalty T as rival points.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .election import Ballot, InvalidElection, KBElection, ScoreVector, Violation, tally, winners
from .flow import Flow, FlowNetwork, FlowOverflow, solve_min_cost_flow

EPS_LABEL = "_"
_COST_LIMIT = 2**62


class Infeasible(Exception):
    """No bribery can make the preferred candidate a winner."""


@dataclass(frozen=True)
class PriceTable:
    """Per-voter unit-bribery prices; ``prices[i][j]`` moves one point from slot i to j.

    Slots are candidate indices, plus index m for the unassigned slot in
    free-form instances.
    """

    prices: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.prices)
        object.__setattr__(self, "prices", rows)
        size = len(rows)
        if any(len(r) != size for r in rows):
            raise ValueError("price table must be square")
        for i, row in enumerate(rows):
            if row[i] != 0:
                raise ValueError("diagonal price must be 0")
            if any(x < 0 for x in row):
                raise ValueError("prices must be nonnegative")

    @property
    def size(self) -> int:
        return len(self.prices)

    def __getitem__(self, ij):
        i, j = ij
        return self.prices[i][j]

    def max(self) -> int:
        return max((x for row in self.prices for x in row), default=0)

    @classmethod
    def uniform(cls, size: int, price: int) -> "PriceTable":
        return cls(tuple(tuple(0 if i == j else price for j in range(size)) for i in range(size)))


@dataclass(frozen=True)
class KBBriberyInstance:
    election: KBElection
    preferred: int
    prices: tuple[PriceTable, ...]
    budget: int | None = None

    def __post_init__(self):
        e = self.election
        e.check()
        object.__setattr__(self, "prices", tuple(p if isinstance(p, PriceTable) else PriceTable(p) for p in self.prices))
        if any(w != 1 for w in e.weights):
            raise ValueError("(k,b)-bribery instances are unweighted")
        if not 0 <= self.preferred < e.m:
            raise ValueError("preferred candidate out of range")
        if len(self.prices) != e.n:
            raise ValueError(f"expected {e.n} price tables, got {len(self.prices)}")
        slots = self.slot_count
        for v, table in enumerate(self.prices):
            if table.size != slots:
                raise ValueError(f"voter {v}: price table must be {slots}x{slots}")
        if self.budget is not None and self.budget < 0:
            raise ValueError("budget must be nonnegative")

    @property
    def slot_count(self) -> int:
        return self.election.m + (1 if self.election.free_form else 0)

    def slot_points(self, voter: int) -> tuple[int, ...]:
        ballot = self.election.ballots[voter]
        if self.election.free_form:
            return ballot.points + (ballot.unassigned,)
        return ballot.points

    def max_price(self) -> int:
        return max((t.max() for t in self.prices), default=0)


class Move(NamedTuple):
    voter: int
    src: int
    dst: int
    count: int


@dataclass(frozen=True)
class BriberyPlan:
    moves: tuple[Move, ...]
    total_price: int

    @classmethod
    def priced(cls, instance: KBBriberyInstance, moves: Sequence) -> "BriberyPlan":
        moves = tuple(sorted(Move(*mv) for mv in moves))
        return cls(moves, plan_price(instance, moves))


@dataclass(frozen=True)
class SolveOutcome:
    optimal_plan: BriberyPlan
    optimal_cost: int
    achieved_score: int
    post_scores: ScoreVector
    feasible_within_budget: bool | None = None


@dataclass(frozen=True, eq=False)
class TargetResult:
    """What the sweep learned at one target score K."""

    K: int
    network: FlowNetwork
    flow: Flow | None
    preferred_inflow: int
    penalty: int
    bribery_cost: int | None
    accepted: bool


def plan_price(instance: KBBriberyInstance, moves) -> int:
    return sum(c * instance.prices[v][i, j] for v, i, j, c in moves)


def penalty(instance: KBBriberyInstance) -> int:
    e = instance.election
    T = 1 + e.k * e.n * instance.max_price()
    if T * e.k * max(e.n, 1) >= _COST_LIMIT:
        raise FlowOverflow("penalty T times k*n exceeds the exact-arithmetic bound")
    return T


class _Layout:
    """Node/arc numbering of the bribery network (K only changes collector capacities)."""

    def __init__(self, instance: KBBriberyInstance):
        e = instance.election
        m, n, k, b = e.m, e.n, e.k, e.b
        s_cnt = instance.slot_count
        free = e.free_form
        self.T = T = penalty(instance)
        self.m, self.n, self.slots = m, n, s_cnt
        # s=0, t=1, old slots, new slots, collectors
        self.old0 = 2
        self.new0 = 2 + n * s_cnt
        self.f0 = 2 + 2 * n * s_cnt
        self.node_count = self.f0 + m
        tails, heads, caps, costs = [], [], [], []

        def arc(u, v, c, w):
            tails.append(u)
            heads.append(v)
            caps.append(c)
            costs.append(w)
            return len(tails) - 1

        self.move_arcs = []  # (arc, voter, i, j)
        for v in range(n):
            pts = instance.slot_points(v)
            table = instance.prices[v]
            for i in range(s_cnt):
                arc(0, self.old(v, i), pts[i], 0)
            for i in range(s_cnt):
                for j in range(s_cnt):
                    a = arc(self.old(v, i), self.new(v, j), k, table[i, j])
                    if i != j:
                        self.move_arcs.append((a, v, i, j))
            for i in range(m):
                arc(self.new(v, i), self.f0 + i, b, 0)
            if free:
                arc(self.new(v, m), 1, k, T)
        self.sink_arcs = np.array(
            [arc(self.f0 + i, 1, 0, 0 if i == instance.preferred else T) for i in range(m)], dtype=np.int64
        )
        self.preferred_arc = int(self.sink_arcs[instance.preferred])
        self.tails = np.array(tails, dtype=np.int64)
        self.heads = np.array(heads, dtype=np.int64)
        self.caps = np.array(caps, dtype=np.int64)
        self.costs = np.array(costs, dtype=np.int64)

    def old(self, voter, slot):
        return self.old0 + voter * self.slots + slot

    def new(self, voter, slot):
        return self.new0 + voter * self.slots + slot

    def network(self, K: int) -> FlowNetwork:
        caps = self.caps.copy()
        caps[self.sink_arcs] = K
        return FlowNetwork(self.node_count, 0, 1, self.tails, self.heads, caps, self.costs)


def build_network(instance: KBBriberyInstance, K: int) -> FlowNetwork:
    """Bribery network for target score ``K`` (see module docstring for the shape)."""
    if K < 0:
        raise ValueError("K must be nonnegative")
    return _Layout(instance).network(K)


def target_range(instance: KBBriberyInstance) -> range:
    """Target scores worth trying.

    p collects at most b points per voter, so K above n*b can never be met
    exactly; in strict elections all k*n points must fit under m collectors of
    capacity K.
    """
    e = instance.election
    kn = e.k * e.n
    hi = min(kn, e.n * e.b)
    lo = 0 if e.free_form else -(-kn // e.m)
    return range(lo, hi + 1)


def _solve_target(layout: _Layout, kn: int, K: int) -> TargetResult:
    net = layout.network(K)
    flow = solve_min_cost_flow(net, kn)
    if flow is None:
        return TargetResult(K, net, None, 0, layout.T, None, False)
    inflow = int(flow.flows[layout.preferred_arc])
    bribery = flow.cost - layout.T * (kn - inflow)
    return TargetResult(K, net, flow, inflow, layout.T, bribery, inflow >= K)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("BRIBERON_THREADS", "1")))
    except ValueError:
        return 1


def sweep(instance: KBBriberyInstance, _layout: _Layout | None = None) -> Iterator[TargetResult]:
    """Solve the network for every candidate target score, in ascending K."""
    layout = _layout or _Layout(instance)
    kn = instance.election.k * instance.election.n
    ks = list(target_range(instance))
    threads = _threads()
    if threads > 1 and len(ks) > 1:
        with ThreadPoolExecutor(threads) as pool:
            yield from pool.map(lambda K: _solve_target(layout, kn, K), ks)
    else:
        for K in ks:
            yield _solve_target(layout, kn, K)


def _decode(instance: KBBriberyInstance, layout: _Layout, flow: Flow) -> BriberyPlan:
    moves = []
    for a, v, i, j in layout.move_arcs:
        c = int(flow.flows[a])
        if c:
            moves.append(Move(v, i, j, c))
    return BriberyPlan.priced(instance, moves)


def solve_optimal(instance: KBBriberyInstance) -> SolveOutcome:
    """Cheapest bribery making the preferred candidate a (co-)winner.

    Raises ``Infeasible`` if no target score admits a valid bribery.
    """
    e = instance.election
    if e.n == 0:
        plan = BriberyPlan((), 0)
        return _outcome(instance, plan, 0)
    layout = _Layout(instance)
    best = None
    for res in sweep(instance, layout):
        if res.accepted and (best is None or res.bribery_cost < best.bribery_cost):
            best = res
    if best is None:
        raise Infeasible("no target score admits a valid bribery")
    plan = _decode(instance, layout, best.flow)
    if plan.total_price != best.bribery_cost:
        raise AssertionError("decoded plan price disagrees with the flow cost")
    return _outcome(instance, plan, best.K)


def _outcome(instance, plan, K):
    post = tally(apply_plan(instance, plan))
    if instance.preferred not in winners(post) or post[instance.preferred] != K:
        raise AssertionError("decoded plan does not make p a winner at the target score")
    within = None if instance.budget is None else plan.total_price <= instance.budget
    return SolveOutcome(plan, plan.total_price, K, post, within)


@dataclass(frozen=True)
class Decision:
    yes: bool
    cost: int
    plan: BriberyPlan | None


def decide(instance: KBBriberyInstance, budget: int | None = None) -> Decision:
    """Is there a bribery of price at most ``budget`` (default: the instance budget)?"""
    if budget is None:
        budget = instance.budget
    if budget is None:
        raise ValueError("a budget is required")
    try:
        out = solve_optimal(instance)
    except Infeasible:
        return Decision(False, -1, None)
    yes = out.optimal_cost <= budget
    return Decision(yes, out.optimal_cost, out.optimal_plan if yes else None)


def apply_plan(instance: KBBriberyInstance, plan: BriberyPlan) -> KBElection:
    """Post-bribery election; raises ``InvalidElection`` for illegal plans."""
    e = instance.election
    slots = instance.slot_count
    after = [list(instance.slot_points(v)) for v in range(e.n)]
    moved_out = [[0] * slots for _ in range(e.n)]
    problems = []
    for mv in plan.moves:
        v, i, j, c = mv
        if not 0 <= v < e.n or not (0 <= i < slots and 0 <= j < slots):
            problems.append(Violation(None, f"move {tuple(mv)} out of range"))
            continue
        if i == j or c < 1:
            problems.append(Violation(v, f"move {tuple(mv)} must have distinct slots and a positive count"))
            continue
        moved_out[v][i] += c
        after[v][i] -= c
        after[v][j] += c
    for v in range(e.n):
        pts = instance.slot_points(v)
        for i in range(slots):
            if moved_out[v][i] > pts[i]:
                problems.append(Violation(v, f"moves {moved_out[v][i]} points out of a slot holding {pts[i]}"))
    if problems:
        raise InvalidElection(problems)
    if e.free_form:
        ballots = tuple(Ballot(tuple(row[: e.m]), row[e.m]) for row in after)
    else:
        ballots = tuple(Ballot(tuple(row)) for row in after)
    return KBElection(e.candidates, e.k, e.b, ballots, e.free_form, e.weights).check()
