"""Brute-force oracles and a seeded instance generator.

Everything here is deliberately naive and shares nothing with the production
solvers beyond the instance types, ``tally`` and ``winners``.

Random numbers come from SplitMix64 so that the same seed yields the same
instance corpus on any platform:

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)                     (all arithmetic mod 2**64)

``randint(lo, hi)`` draws with rejection: with span = hi - lo + 1, values at or
above ``2**64 - 2**64 % span`` are redrawn, then ``lo + z % span`` is returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .election import Ballot, CandidateSet, KBElection, encode_rule, tally, winners
from .kb import BriberyPlan, KBBriberyInstance, Move, PriceTable
from .weighted import (
    ApprovalPrimeInstance,
    NegativeBriberyInstance,
    Weighted11Instance,
    WeightedPluralityInstance,
)

MASK64 = (1 << 64) - 1

KB_CAPS = dict(m=5, n=8, k=4, b=3)


class OracleCapExceeded(ValueError):
    """Instance too large for an exhaustive oracle."""


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        span = hi - lo + 1
        limit = (1 << 64) - (1 << 64) % span
        while True:
            z = self.next_u64()
            if z < limit:
                return lo + z % span

    def choice(self, seq):
        return seq[self.randint(0, len(seq) - 1)]

    def shuffle(self, seq: list) -> list:
        for i in range(len(seq) - 1, 0, -1):
            j = self.randint(0, i)
            seq[i], seq[j] = seq[j], seq[i]
        return seq


# ---------------------------------------------------------------- kb oracle


def _voter_options(points, table, b, free_form):
    """Every reachable post-ballot of one voter with its cheapest price and moves.

    Each point independently picks a destination slot (its own slot = stay);
    points in one slot are interchangeable, so destinations are multisets.
    """
    slots = len(points)
    per_slot = []
    for i, x in enumerate(points):
        per_slot.append(list(itertools.combinations_with_replacement(range(slots), x)))
    options = {}
    for combo in itertools.product(*per_slot):
        after = [0] * slots
        price = 0
        moves = {}
        for i, dests in enumerate(combo):
            for j in dests:
                after[j] += 1
                if j != i:
                    price += table[i][j]
                    moves[(i, j)] = moves.get((i, j), 0) + 1
        cand = after[:-1] if free_form else after
        if any(x > b for x in cand):
            continue
        key = tuple(after)
        if key not in options or price < options[key][0]:
            options[key] = (price, tuple(sorted(moves.items())))
    return options


def brute_kb(instance: KBBriberyInstance) -> tuple[int, BriberyPlan] | None:
    """Exact minimum bribery price by exhaustive search; ``None`` if impossible."""
    e = instance.election
    if e.m > KB_CAPS["m"] or e.n > KB_CAPS["n"] or e.k > KB_CAPS["k"] or e.b > KB_CAPS["b"]:
        raise OracleCapExceeded(f"kb oracle caps are {KB_CAPS}")
    m = e.m
    # best[scores] = (price, moves); merging voter by voter enumerates every combination
    best = {(0,) * m: (0, ())}
    for v in range(e.n):
        pts = list(e.ballots[v].points) + ([e.ballots[v].unassigned] if e.free_form else [])
        opts = _voter_options(pts, instance.prices[v].prices, e.b, e.free_form)
        nxt = {}
        for scores, (price, moves) in best.items():
            for after, (q, mv) in opts.items():
                key = tuple(s + a for s, a in zip(scores, after[:m]))
                total = price + q
                if key not in nxt or total < nxt[key][0]:
                    nxt[key] = (total, moves + tuple(Move(v, i, j, c) for (i, j), c in mv))
        best = nxt
    p = instance.preferred
    found = None
    for scores, (price, moves) in best.items():
        if p in winners(scores) and (found is None or price < found[0]):
            found = (price, moves)
    if found is None:
        return None
    return found[0], BriberyPlan(tuple(sorted(found[1])), found[0])


# ---------------------------------------------------------------- weighted oracles


def search_weighted_plurality(inst: WeightedPluralityInstance, arbitrary_revotes: bool = False):
    """Cheapest bribery as ``(cost, {voter: new_vote})`` by exhaustive search."""
    n, m, p = inst.n, inst.m, inst.preferred
    cap = 8 if arbitrary_revotes else 12
    if n > cap:
        raise OracleCapExceeded(f"plurality oracle caps are n <= {cap}, got n = {n}")
    best = None
    targets = range(m) if arbitrary_revotes else (p,)
    # option None = not bribed
    for choice in itertools.product(*[(None,) + tuple(targets) for _ in range(n)]):
        scores = [0] * m
        price = 0
        for i, c in enumerate(choice):
            if c is None:
                scores[inst.votes[i]] += inst.weights[i]
            else:
                scores[c] += inst.weights[i]
                price += inst.prices[i]
        if p in winners(scores) and (best is None or price < best[0]):
            best = (price, {i: c for i, c in enumerate(choice) if c is not None})
    return best


def brute_weighted_plurality(inst: WeightedPluralityInstance, arbitrary_revotes: bool = False) -> int:
    return search_weighted_plurality(inst, arbitrary_revotes)[0]


def search_approval_prime(inst: ApprovalPrimeInstance):
    """Cheapest flip set as ``(cost, flips)``, scanning every useful-flip subset."""
    flips = inst.useful_flips()
    if len(flips) > 20:
        raise OracleCapExceeded(f"approval oracle caps are 20 useful flips, got {len(flips)}")
    masks = np.arange(1 << len(flips), dtype=np.int64)
    base = [0] * inst.m
    for w, a in zip(inst.weights, inst.approvals):
        for c in range(inst.m):
            base[c] += w * a[c]
    scores = np.tile(np.array(base, dtype=np.int64), (len(masks), 1))
    cost = np.zeros(len(masks), dtype=np.int64)
    for f, (v, c) in enumerate(flips):
        bit = (masks >> f) & 1
        cost += bit * inst.flip_prices[v][c]
        sign = -1 if inst.approvals[v][c] else 1
        scores[:, c] += sign * bit * inst.weights[v]
    ok = scores[:, inst.preferred] >= scores.max(axis=1)
    cost = np.where(ok, cost, np.iinfo(np.int64).max)
    best = int(np.argmin(cost))
    return int(cost[best]), tuple(f for i, f in enumerate(flips) if best >> i & 1)


def brute_approval_prime(inst: ApprovalPrimeInstance) -> int:
    return search_approval_prime(inst)[0]


def search_negative(inst: NegativeBriberyInstance):
    """A smallest witness ``{voter: new_vote}`` for negative bribery, or ``None``."""
    n, m, p = inst.n, inst.m, inst.preferred
    if n > 6 or m > 4:
        raise OracleCapExceeded("negative-bribery oracle caps are n <= 6, m <= 4")
    targets = [c for c in range(m) if c != p]
    for size in range(min(inst.budget, n) + 1):
        for group in itertools.combinations(range(n), size):
            for revotes in itertools.product(targets, repeat=size):
                new = dict(zip(group, revotes))
                scores = [0] * m
                for i in range(n):
                    scores[new.get(i, inst.votes[i])] += inst.weights[i]
                if p in winners(scores):
                    return new
    return None


def brute_negative(inst: NegativeBriberyInstance) -> bool:
    return search_negative(inst) is not None


def search_11_weighted(inst: Weighted11Instance):
    """Cheapest ``(price, {voter: new_vote})`` making p a co-winner (budget ignored)."""
    n, m, p = inst.n, inst.m, inst.preferred
    if n > 6 or m > 4:
        raise OracleCapExceeded("(1,1)-weighted oracle caps are n <= 6, m <= 4")
    best = None
    for choice in itertools.product(range(m), repeat=n):
        price = sum(inst.prices[i][inst.votes[i], c] for i, c in enumerate(choice))
        scores = [0] * m
        for i, c in enumerate(choice):
            scores[c] += inst.weights[i]
        if p in winners(scores) and (best is None or price < best[0]):
            best = (price, {i: c for i, c in enumerate(choice) if c != inst.votes[i]})
    return best


def brute_11_weighted(inst: Weighted11Instance) -> bool:
    best = search_11_weighted(inst)
    return best is not None and best[0] <= inst.budget


# ---------------------------------------------------------------- generator

KINDS = ("kb", "kb_freeform", "plurality_weighted", "approval_prime", "negative_plurality", "weighted_11")
ENCODERS = ("utility", "plurality", "veto", "approval", "t-approval")


@dataclass(frozen=True)
class GenParams:
    seed: int
    kind: str = "kb"
    m: tuple[int, int] = (2, 4)
    n: tuple[int, int] = (1, 4)
    k: tuple[int, int] = (1, 3)
    b: tuple[int, int] = (1, 2)
    weights: tuple[int, int] = (1, 1)
    prices: tuple[int, int] = (0, 9)
    budget: tuple[int, int] | None = None
    encoder: str = "utility"
    t: int = 3

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.encoder not in ENCODERS:
            raise ValueError(f"unknown encoder {self.encoder!r}")
        for name in ("m", "n", "k", "b", "weights", "prices"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"empty range for {name}")
        if self.m[0] < 1 or self.k[0] < 1 or self.b[0] < 1 or self.weights[0] < 1 or self.prices[0] < 0:
            raise ValueError("ranges must be positive (prices nonnegative)")
        if self.kind in ("kb", "kb_freeform"):
            caps = KB_CAPS
            if self.m[1] > caps["m"] or self.n[1] > caps["n"] or self.k[1] > caps["k"] or self.b[1] > caps["b"]:
                raise ValueError(f"kb generation is capped at {caps}")
            if self.kind == "kb" and self.encoder == "utility" and self.k[0] > self.m[1] * self.b[1]:
                raise ValueError("no strict (k,b)-election fits these ranges")


def _random_points(rng, m, k, b, free_form):
    if free_form:
        # pick the assigned total, then spread it; unassigned takes the rest
        assigned = rng.randint(0, min(k, m * b))
    else:
        assigned = k
    pts = [0] * m
    for _ in range(assigned):
        open_slots = [i for i in range(m) if pts[i] < b]
        pts[rng.choice(open_slots)] += 1
    return pts, k - assigned


def _random_table(rng, size, lo, hi):
    return PriceTable(tuple(tuple(0 if i == j else rng.randint(lo, hi) for j in range(size)) for i in range(size)))


def _budget(rng, params):
    if params.budget is None:
        return None
    return rng.randint(params.budget[0], params.budget[1])


def gen_random(params: GenParams):
    rng = SplitMix64(params.seed)
    kind = params.kind
    m = rng.randint(*params.m)
    n = rng.randint(*params.n)
    names = tuple(f"c{i}" for i in range(m))
    p = rng.randint(0, m - 1)
    if kind in ("kb", "kb_freeform"):
        free = kind == "kb_freeform"
        enc = params.encoder
        if enc == "utility":
            k = rng.randint(*params.k)
            b = rng.randint(*params.b)
            if not free and k > m * b:
                if params.m[0] == params.m[1] and params.b[0] == params.b[1] and params.k[0] > m * b:
                    raise ValueError(f"no (k={params.k[0]}, b={b})-election over {m} candidates")
                k = min(k, m * b)
            ballots = []
            for _ in range(n):
                pts, un = _random_points(rng, m, k, b, free)
                ballots.append(Ballot(tuple(pts), un))
            election = KBElection(CandidateSet(names), k, b, tuple(ballots), free_form=free).check()
        else:
            election = _encoded(rng, enc, names, n, params.t)
            if election.free_form != free:
                raise ValueError(f"encoder {enc!r} does not produce a {kind} instance")
        slots = m + (1 if free else 0)
        prices = tuple(_random_table(rng, slots, *params.prices) for _ in range(n))
        return KBBriberyInstance(election, p, prices, _budget(rng, params))
    weights = tuple(rng.randint(*params.weights) for _ in range(n))
    if kind == "plurality_weighted":
        votes = tuple(rng.randint(0, m - 1) for _ in range(n))
        prices = tuple(rng.randint(*params.prices) for _ in range(n))
        return WeightedPluralityInstance(names, p, weights, votes, prices, _budget(rng, params))
    if kind == "approval_prime":
        approvals = tuple(tuple(rng.randint(0, 1) for _ in range(m)) for _ in range(n))
        flips = tuple(tuple(rng.randint(*params.prices) for _ in range(m)) for _ in range(n))
        return ApprovalPrimeInstance(names, p, weights, approvals, flips, _budget(rng, params))
    votes = tuple(rng.randint(0, m - 1) for _ in range(n))
    budget = rng.randint(*params.budget) if params.budget else rng.randint(0, n)
    if kind == "negative_plurality":
        return NegativeBriberyInstance(names, p, weights, votes, budget)
    tables = tuple(_random_table(rng, m, *params.prices) for _ in range(n))
    return Weighted11Instance(names, p, weights, votes, tables, budget)


def _encoded(rng, enc, names, n, t):
    m = len(names)
    if enc in ("plurality", "veto"):
        if enc == "veto" and m < 2:
            raise ValueError("veto needs at least two candidates")
        rankings = [rng.shuffle(list(names)) for _ in range(n)]
        return encode_rule(enc, names, rankings)
    if enc == "approval":
        sets = [[c for c in names if rng.randint(0, 1)] for _ in range(n)]
        return encode_rule("approval", names, sets)
    if t > m:
        raise ValueError(f"{t}-approval needs at least {t} candidates")
    sets = [rng.shuffle(list(names))[:t] for _ in range(n)]
    return encode_rule("t-approval", names, sets, t=t)


def scaling_instance(m: int, n: int, k: int, b: int, max_price: int, seed: int = 0) -> KBBriberyInstance:
    """Uncapped strict utility instance for timing runs (prices drawn from 1..max_price)."""
    if k > m * b:
        raise ValueError(f"no (k={k}, b={b})-election over {m} candidates")
    rng = SplitMix64(seed)
    ballots = tuple(Ballot(tuple(_random_points(rng, m, k, b, False)[0])) for _ in range(n))
    election = KBElection(CandidateSet(tuple(f"c{i}" for i in range(m))), k, b, ballots)
    prices = tuple(_random_table(rng, m, 1, max_price) for _ in range(n))
    return KBBriberyInstance(election, 0, prices)
