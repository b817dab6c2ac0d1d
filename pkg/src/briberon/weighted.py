"""Weighted priced bribery: exact solvers, the price-scaling FPTAS, and the
negative-bribery reduction to (1,1)-weighted-bribery.

Two problems are covered:

* plurality-weighted-$bribery: each voter has a weight, a plurality vote and a
  single price for changing it.  Bribed voters always revote for p and p's own
  supporters are never bribed; any optimal solution can be rewritten that way.
* approval-weighted-$bribery': each (voter, candidate) approval bit has its own
  flip price.  Only two kinds of flip ever help: approving p, and withdrawing
  approval from a rival.

Both exact solvers are dynamic programs over voter *weight*, so their running
time does not depend on the prices at all.  The FPTAS works with any solver that
returns exact optima.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from ._accel import njit
from .election import Ballot, CandidateSet, KBElection, check_int64
from .kb import PriceTable

INF = np.int64(2**62)
_COST_LIMIT = 2**62
# above this total weight the plurality solver switches from DP to branch and bound
WEIGHT_DP_LIMIT = 20_000


def _cands(c):
    return c if isinstance(c, CandidateSet) else CandidateSet(tuple(c))


def _ints(xs):
    return tuple(int(x) for x in xs)


@dataclass(frozen=True)
class WeightedPluralityInstance:
    candidates: CandidateSet
    preferred: int
    weights: tuple[int, ...]
    votes: tuple[int, ...]
    prices: tuple[int, ...]
    budget: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "candidates", _cands(self.candidates))
        for name in ("weights", "votes", "prices"):
            object.__setattr__(self, name, _ints(getattr(self, name)))
        n = len(self.votes)
        if n < 1:
            raise ValueError("at least one voter is required")
        if not len(self.weights) == len(self.prices) == n:
            raise ValueError("weights, votes and prices must have one entry per voter")
        if not 0 <= self.preferred < self.m:
            raise ValueError("preferred candidate out of range")
        if any(not 0 <= v < self.m for v in self.votes):
            raise ValueError("vote out of range")
        if any(w < 1 for w in self.weights) or any(q < 0 for q in self.prices):
            raise ValueError("weights must be positive and prices nonnegative")
        if sum(self.prices) >= _COST_LIMIT or sum(self.weights) >= _COST_LIMIT:
            raise OverflowError("instance totals exceed the exact-arithmetic bound")

    @property
    def m(self) -> int:
        return len(self.candidates)

    @property
    def n(self) -> int:
        return len(self.votes)

    @property
    def price_count(self) -> int:
        return self.n

    def all_prices(self) -> tuple[int, ...]:
        return self.prices

    def map_prices(self, f) -> "WeightedPluralityInstance":
        return replace(self, prices=tuple(f(q) for q in self.prices))

    def scores(self, bribed=()) -> list[int]:
        bribed = set(bribed)
        s = [0] * self.m
        for i, (w, v) in enumerate(zip(self.weights, self.votes)):
            s[self.preferred if i in bribed else v] += w
        return s

    def cost(self, bribed) -> int:
        return sum(self.prices[i] for i in set(bribed))

    def is_feasible(self, bribed) -> bool:
        s = self.scores(bribed)
        return s[self.preferred] >= max(s)


@dataclass(frozen=True)
class ApprovalPrimeInstance:
    candidates: CandidateSet
    preferred: int
    weights: tuple[int, ...]
    approvals: tuple[tuple[int, ...], ...]
    flip_prices: tuple[tuple[int, ...], ...]
    budget: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "candidates", _cands(self.candidates))
        object.__setattr__(self, "weights", _ints(self.weights))
        object.__setattr__(self, "approvals", tuple(_ints(a) for a in self.approvals))
        object.__setattr__(self, "flip_prices", tuple(_ints(a) for a in self.flip_prices))
        n, m = len(self.weights), self.m
        if n < 1:
            raise ValueError("at least one voter is required")
        if len(self.approvals) != n or len(self.flip_prices) != n:
            raise ValueError("approvals and flip prices must have one entry per voter")
        if any(len(a) != m for a in self.approvals) or any(len(q) != m for q in self.flip_prices):
            raise ValueError(f"approval and price vectors must have length {m}")
        if any(x not in (0, 1) for a in self.approvals for x in a):
            raise ValueError("approval vectors must be 0/1")
        if not 0 <= self.preferred < m:
            raise ValueError("preferred candidate out of range")
        if any(w < 1 for w in self.weights) or any(x < 0 for q in self.flip_prices for x in q):
            raise ValueError("weights must be positive and prices nonnegative")
        if sum(map(sum, self.flip_prices)) >= _COST_LIMIT or sum(self.weights) >= _COST_LIMIT:
            raise OverflowError("instance totals exceed the exact-arithmetic bound")

    @property
    def m(self) -> int:
        return len(self.candidates)

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def price_count(self) -> int:
        return self.n * self.m

    def all_prices(self) -> tuple[int, ...]:
        return tuple(x for q in self.flip_prices for x in q)

    def map_prices(self, f) -> "ApprovalPrimeInstance":
        return replace(self, flip_prices=tuple(tuple(f(x) for x in q) for q in self.flip_prices))

    def useful_flips(self) -> list[tuple[int, int]]:
        p = self.preferred
        out = []
        for v, a in enumerate(self.approvals):
            for c in range(self.m):
                if (c == p and not a[c]) or (c != p and a[c]):
                    out.append((v, c))
        return out

    def scores(self, flips=()) -> list[int]:
        flips = set(flips)
        s = [0] * self.m
        for v, (w, a) in enumerate(zip(self.weights, self.approvals)):
            for c in range(self.m):
                if a[c] ^ ((v, c) in flips):
                    s[c] += w
        return s

    def cost(self, flips) -> int:
        return sum(self.flip_prices[v][c] for v, c in set(flips))

    def is_feasible(self, flips) -> bool:
        s = self.scores(flips)
        return s[self.preferred] >= max(s)


@dataclass(frozen=True)
class NegativeBriberyInstance:
    """Weighted plurality election; up to ``budget`` voters may be re-pointed, never to p."""

    candidates: CandidateSet
    preferred: int
    weights: tuple[int, ...]
    votes: tuple[int, ...]
    budget: int

    def __post_init__(self):
        object.__setattr__(self, "candidates", _cands(self.candidates))
        object.__setattr__(self, "weights", _ints(self.weights))
        object.__setattr__(self, "votes", _ints(self.votes))
        if len(self.votes) < 1 or len(self.weights) != len(self.votes):
            raise ValueError("need at least one voter and one weight per voter")
        if not 0 <= self.preferred < len(self.candidates):
            raise ValueError("preferred candidate out of range")
        if any(not 0 <= v < len(self.candidates) for v in self.votes):
            raise ValueError("vote out of range")
        if any(w < 1 for w in self.weights) or self.budget < 0:
            raise ValueError("weights must be positive and the budget nonnegative")

    @property
    def m(self) -> int:
        return len(self.candidates)

    @property
    def n(self) -> int:
        return len(self.votes)


@dataclass(frozen=True)
class Weighted11Instance:
    """(1,1)-weighted-bribery: weighted plurality voters with per-pair move prices."""

    candidates: CandidateSet
    preferred: int
    weights: tuple[int, ...]
    votes: tuple[int, ...]
    prices: tuple[PriceTable, ...]
    budget: int

    def __post_init__(self):
        object.__setattr__(self, "candidates", _cands(self.candidates))
        object.__setattr__(self, "weights", _ints(self.weights))
        object.__setattr__(self, "votes", _ints(self.votes))
        object.__setattr__(self, "prices", tuple(p if isinstance(p, PriceTable) else PriceTable(p) for p in self.prices))
        m = len(self.candidates)
        if len(self.votes) < 1 or not len(self.weights) == len(self.prices) == len(self.votes):
            raise ValueError("need at least one voter, with one weight and price table each")
        if any(t.size != m for t in self.prices):
            raise ValueError(f"price tables must be {m}x{m}")
        if not 0 <= self.preferred < m or any(not 0 <= v < m for v in self.votes):
            raise ValueError("candidate index out of range")
        if any(w < 1 for w in self.weights) or self.budget < 0:
            raise ValueError("weights must be positive and the budget nonnegative")

    @property
    def m(self) -> int:
        return len(self.candidates)

    @property
    def n(self) -> int:
        return len(self.votes)

    @property
    def election(self) -> KBElection:
        ballots = tuple(Ballot(tuple(int(c == v) for c in range(self.m))) for v in self.votes)
        return KBElection(self.candidates, 1, 1, ballots, weights=self.weights)


@dataclass(frozen=True)
class Solution:
    """Exact or approximate answer for a weighted instance.

    ``chosen`` holds bribed voter indices (plurality) or (voter, candidate)
    flips (approval), sorted.
    """

    chosen: tuple
    cost: int


# ---------------------------------------------------------------- kernels


@njit
def knapsack_exact(weights, prices):
    """Min price for removing exactly r weight, r = 0..sum(weights), with a take table."""
    n = weights.shape[0]
    total = 0
    for i in range(n):
        total += weights[i]
    dp = np.full(total + 1, INF, dtype=np.int64)
    dp[0] = 0
    take = np.zeros((n, total + 1), dtype=np.bool_)
    reach = 0
    for i in range(n):
        w = weights[i]
        q = prices[i]
        reach += w
        for r in range(reach, w - 1, -1):
            if dp[r - w] < INF and dp[r - w] + q < dp[r]:
                dp[r] = dp[r - w] + q
                take[i, r] = True
    return dp, take


@njit
def knapsack_backtrack(weights, take, r):
    chosen = np.zeros(weights.shape[0], dtype=np.bool_)
    for i in range(weights.shape[0] - 1, -1, -1):
        if take[i, r]:
            chosen[i] = True
            r -= weights[i]
    return chosen


@njit
def _rival_stage(best, dp, need, R, out_cost, out_r, out_a):
    # fold one rival group into the "removed so far" (capped at R) table
    size = dp.shape[0]
    for a in range(R + 1):
        out_cost[a] = INF
        out_r[a] = -1
        out_a[a] = -1
    for a in range(R + 1):
        if best[a] >= INF:
            continue
        for r in range(need, size):
            if dp[r] >= INF:
                continue
            na = a + r
            if na > R:
                na = R
            c = best[a] + dp[r]
            if c < out_cost[na]:
                out_cost[na] = c
                out_r[na] = r
                out_a[na] = a


@njit
def plurality_dp_kernel(group_dp, group_off, rival_scores, preferred_score, total):
    """Cheapest plurality bribery via a DP over p's weight gain R.

    ``group_dp`` concatenates each rival's exact-weight knapsack table.
    Returns (cost, R, removed weight per rival).
    """
    G = rival_scores.shape[0]
    best_cost = INF
    best_R = -1
    cur = np.empty(total + 1, dtype=np.int64)
    nxt = np.empty(total + 1, dtype=np.int64)
    tr = np.empty(total + 1, dtype=np.int64)
    ta = np.empty(total + 1, dtype=np.int64)
    for R in range(total + 1):
        for a in range(R + 1):
            cur[a] = INF
        cur[0] = 0
        ok = True
        for g in range(G):
            need = rival_scores[g] - preferred_score - R
            if need < 0:
                need = 0
            dp = group_dp[group_off[g]:group_off[g + 1]]
            if need >= dp.shape[0]:
                ok = False
                break
            _rival_stage(cur, dp, need, R, nxt, tr, ta)
            for a in range(R + 1):
                cur[a] = nxt[a]
        if ok and cur[R] < best_cost:
            best_cost = cur[R]
            best_R = R
    removed = np.zeros(G, dtype=np.int64)
    if best_R < 0:
        return best_cost, best_R, removed
    # replay the winning R, keeping every stage for the backtrack
    R = best_R
    stage_r = np.empty((G, R + 1), dtype=np.int64)
    stage_a = np.empty((G, R + 1), dtype=np.int64)
    for a in range(R + 1):
        cur[a] = INF
    cur[0] = 0
    for g in range(G):
        need = rival_scores[g] - preferred_score - R
        if need < 0:
            need = 0
        dp = group_dp[group_off[g]:group_off[g + 1]]
        _rival_stage(cur, dp, need, R, nxt, stage_r[g], stage_a[g])
        for a in range(R + 1):
            cur[a] = nxt[a]
    a = R
    for g in range(G - 1, -1, -1):
        removed[g] = stage_r[g, a]
        a = stage_a[g, a]
    return best_cost, best_R, removed


# ---------------------------------------------------------------- exact solvers


def _plurality_dp(inst: WeightedPluralityInstance) -> Solution:
    p = inst.preferred
    s = inst.scores()
    rivals = [c for c in range(inst.m) if c != p]
    members, tables, takes = [], [], []
    for c in rivals:
        idx = [i for i, v in enumerate(inst.votes) if v == c]
        w = np.array([inst.weights[i] for i in idx], dtype=np.int64)
        q = np.array([inst.prices[i] for i in idx], dtype=np.int64)
        dp, take = knapsack_exact(w, q)
        members.append((idx, w))
        tables.append(dp)
        takes.append(take)
    off = np.zeros(len(rivals) + 1, dtype=np.int64)
    off[1:] = np.cumsum([len(t) for t in tables])
    flat = np.concatenate(tables) if tables else np.zeros(0, dtype=np.int64)
    total = sum(inst.weights) - s[p]
    cost, R, removed = plurality_dp_kernel(
        flat, off, np.array([s[c] for c in rivals], dtype=np.int64), s[p], total
    )
    if R < 0:
        raise AssertionError("plurality bribery is always feasible")
    chosen = []
    for (idx, w), take, r in zip(members, takes, removed.tolist()):
        mask = knapsack_backtrack(w, take, r)
        chosen.extend(i for i, keep in zip(idx, mask.tolist()) if keep)
    return Solution(tuple(sorted(chosen)), int(cost))


def _plurality_bnb(inst: WeightedPluralityInstance) -> Solution:
    """Depth-first branch and bound with a fractional-knapsack lower bound."""
    p = inst.preferred
    order = sorted(
        (i for i, v in enumerate(inst.votes) if v != p),
        key=lambda i: (-inst.weights[i], inst.prices[i], i),
    )
    # every non-p voter bribed is always feasible
    best_cost = sum(inst.prices[i] for i in order)
    best = list(order)
    scores = inst.scores()
    chosen: list[int] = []

    def lower_bound(pos, deficit):
        # each bribed weight unit closes a rival gap by at most 2
        need = -(-deficit // 2)
        if need <= 0:
            return 0
        rest = sorted(order[pos:], key=lambda i: Fraction(inst.prices[i], inst.weights[i]))
        lb = Fraction(0)
        for i in rest:
            w = inst.weights[i]
            take = min(w, need)
            lb += Fraction(inst.prices[i] * take, w)
            need -= take
            if need == 0:
                return lb
        return None

    def dfs(pos, cost):
        nonlocal best_cost, best
        deficit = max(scores) - scores[p]
        if deficit <= 0:
            if cost < best_cost or (cost == best_cost and sorted(chosen) < sorted(best)):
                best_cost, best = cost, list(chosen)
            return
        if pos == len(order):
            return
        lb = lower_bound(pos, deficit)
        if lb is None or cost + lb > best_cost:
            return
        i = order[pos]
        w, v = inst.weights[i], inst.votes[i]
        scores[v] -= w
        scores[p] += w
        chosen.append(i)
        dfs(pos + 1, cost + inst.prices[i])
        chosen.pop()
        scores[v] += w
        scores[p] -= w
        dfs(pos + 1, cost)

    dfs(0, 0)
    return Solution(tuple(sorted(best)), best_cost)


def solve_plurality_exact(inst: WeightedPluralityInstance, method: str = "auto") -> Solution:
    """Minimum-price set of voters whose switch to p makes p a co-winner."""
    if method == "auto":
        method = "dp" if sum(inst.weights) <= WEIGHT_DP_LIMIT else "bnb"
    if method == "dp":
        return _plurality_dp(inst)
    if method == "bnb":
        return _plurality_bnb(inst)
    raise ValueError(f"unknown method {method!r}")


def _suffix_min(dp):
    # best[r] = min over r' >= r of dp[r'], with the argmin
    best = dp.copy()
    arg = np.arange(len(dp))
    for r in range(len(dp) - 2, -1, -1):
        if best[r + 1] < best[r]:
            best[r] = best[r + 1]
            arg[r] = arg[r + 1]
    return best, arg


def solve_approval_prime_exact(inst: ApprovalPrimeInstance) -> Solution:
    """Minimum-price set of approval flips making p a co-winner.

    p's gain and each rival's loss are independent knapsacks once the gain G
    is fixed, so the search is a single loop over G.
    """
    p = inst.preferred
    s = inst.scores()
    by_cand = {c: [] for c in range(inst.m)}
    for v, c in inst.useful_flips():
        by_cand[c].append(v)
    tables = {}
    for c, voters in by_cand.items():
        w = np.array([inst.weights[v] for v in voters], dtype=np.int64)
        q = np.array([inst.flip_prices[v][c] for v in voters], dtype=np.int64)
        dp, take = knapsack_exact(w, q)
        tables[c] = (voters, w, dp, take, *_suffix_min(dp))
    rivals = [c for c in range(inst.m) if c != p]
    gain_dp = tables[p][2]
    best = None
    for G in range(len(gain_dp)):
        if gain_dp[G] >= INF:
            continue
        total = int(gain_dp[G])
        picks = []
        for c in rivals:
            need = max(0, s[c] - s[p] - G)
            smin, sarg = tables[c][4], tables[c][5]
            if need >= len(smin) or smin[need] >= INF:
                total = None
                break
            total += int(smin[need])
            picks.append((c, int(sarg[need])))
        if total is not None and (best is None or total < best[0]):
            best = (total, G, picks)
    if best is None:
        raise AssertionError("approval bribery is always feasible")
    total, G, picks = best
    flips = []
    for c, r in [(p, G)] + picks:
        voters, w, _, take = tables[c][:4]
        mask = knapsack_backtrack(w, take, r)
        flips.extend((v, c) for v, keep in zip(voters, mask.tolist()) if keep)
    return Solution(tuple(sorted(flips)), total)


def default_solver(inst):
    if isinstance(inst, WeightedPluralityInstance):
        return solve_plurality_exact(inst)
    if isinstance(inst, ApprovalPrimeInstance):
        return solve_approval_prime_exact(inst)
    raise TypeError(f"no exact solver for {type(inst).__name__}")


# ---------------------------------------------------------------- FPTAS


def as_eps(eps) -> Fraction:
    """Exact rational accuracy parameter with 0 < eps < 1 (accepts "num/den")."""
    e = Fraction(eps)
    if not 0 < e < 1:
        raise ValueError(f"epsilon must satisfy 0 < eps < 1, got {e}")
    return e


def big_price(price_count: int, eps) -> int:
    """Integer stand-in for prices above the current guess: ceil((1+2e)/e * N^2 + 1)."""
    e = as_eps(eps)
    num, den = e.numerator, e.denominator
    return -(-((den + 2 * num) * price_count * price_count) // num) + 1


def scale_price(q: int, t: int, price_count: int, eps) -> int:
    e = as_eps(eps)
    if q > t:
        return big_price(price_count, e)
    # ceil(q / (t*e/N)) in integers
    return -(-(q * price_count * e.denominator) // (t * e.numerator))


def scale_prices(inst, t: int, eps):
    """Copy of ``inst`` with prices rounded up to multiples of the grain t*eps/N."""
    if t < 1:
        raise ValueError("t must be a positive integer")
    e = as_eps(eps)
    N = inst.price_count
    return inst.map_prices(lambda q: scale_price(q, t, N, e))


@dataclass(frozen=True)
class FptasResult:
    solution: Solution
    cost: int
    solver_calls: int
    chosen_t: int


def fptas(inst, eps, exact_solver: Callable | None = None) -> FptasResult:
    """(1 + 2*eps)-approximate bribery by repeated price scaling.

    Guesses t = 1, 2, 4, ... for the largest price in an optimal solution,
    solves each scaled copy exactly, discards answers that touch a priced-out
    voter, and keeps the stored answer with the lowest original price.
    """
    e = as_eps(eps)
    solve = exact_solver or default_solver
    T = max(inst.all_prices())
    if T < 1:
        sol = solve(inst)
        return FptasResult(Solution(sol.chosen, inst.cost(sol.chosen)), inst.cost(sol.chosen), 1, 0)
    threshold = big_price(inst.price_count, e)
    best = None
    calls = 0
    t = 1
    while True:
        scaled = scale_prices(inst, t, e)
        sol = solve(scaled)
        calls += 1
        if scaled.cost(sol.chosen) < threshold:
            real = inst.cost(sol.chosen)
            if best is None or real < best[0]:
                best = (real, sol.chosen, t)
        if t >= T:
            break
        t *= 2
    if best is None:
        raise AssertionError("the last scaling round always stores a solution")
    real, chosen, t_best = best
    return FptasResult(Solution(chosen, real), real, calls, t_best)


def fptas_strict(inst, eps, exact_solver: Callable | None = None) -> FptasResult:
    """(1 + eps)-approximation: runs :func:`fptas` with eps/2."""
    return fptas(inst, as_eps(eps) / 2, exact_solver)


def iteration_count(max_price: int) -> int:
    """Exact-solver calls made by :func:`fptas` for a given largest price."""
    return (max(max_price, 1) - 1).bit_length() + 1


# ---------------------------------------------------------------- reduction


def reduce_negative_bribery(inst: NegativeBriberyInstance) -> Weighted11Instance:
    """Map negative bribery to (1,1)-weighted-bribery with unit prices.

    Moving a point to p costs budget+1, which no yes-certificate can afford;
    every other move costs 1, so the budget again counts bribed voters.
    """
    m, p, B = inst.m, inst.preferred, inst.budget
    row = tuple(
        tuple(0 if i == j else (B + 1 if j == p else 1) for j in range(m)) for i in range(m)
    )
    check_int64(B + 1, "price")
    table = PriceTable(row)
    return Weighted11Instance(
        inst.candidates, p, inst.weights, inst.votes, (table,) * inst.n, B
    )
