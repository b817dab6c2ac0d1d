import itertools

import pytest
from hypothesis import given, settings, strategies as st

from briberon import testkit
from briberon.election import Ballot, CandidateSet, InvalidElection, KBElection, encode_rule, tally, winners
from briberon.flow import solve_min_cost_flow, verify_optimality
from briberon.kb import (
    BriberyPlan,
    Infeasible,
    KBBriberyInstance,
    Move,
    PriceTable,
    _Layout,
    apply_plan,
    build_network,
    decide,
    penalty,
    solve_optimal,
    sweep,
    target_range,
)

from conftest import table


def ex1(budget=None):
    e = KBElection(CandidateSet(("p", "a")), 1, 1, (Ballot((0, 1)), Ballot((0, 1)), Ballot((1, 0))))
    prices = (table(2, {(1, 0): 3}), table(2, {(1, 0): 5}), table(2))
    return KBBriberyInstance(e, 0, prices, budget)


def veto_example():
    e = KBElection(
        CandidateSet(("p", "a", "b")), 2, 1, (Ballot((0, 1, 1)), Ballot((0, 1, 1)), Ballot((1, 0, 1)))
    )
    prices = (table(3, {(2, 0): 2}), table(3, {(2, 0): 4}), table(3))
    return KBBriberyInstance(e, 0, prices)


def random_instance(seed, kind="kb", encoder="utility"):
    m = (3, 4) if encoder == "t-approval" else (2, 4)
    return testkit.gen_random(
        testkit.GenParams(seed=seed, kind=kind, encoder=encoder, m=m, n=(1, 4), k=(1, 3), b=(1, 2), prices=(0, 9))
    )


def oracle_cost(inst):
    found = testkit.brute_kb(inst)
    return None if found is None else found[0]


def flow_cost(inst):
    try:
        return solve_optimal(inst).optimal_cost
    except Infeasible:
        return None


def test_example_1():
    out = solve_optimal(ex1())
    assert out.optimal_cost == 3
    assert out.optimal_plan.moves == (Move(0, 1, 0, 1),)
    assert tuple(out.post_scores) == (2, 1)


def test_already_winner():
    e = KBElection(CandidateSet(("p", "a")), 1, 1, (Ballot((0, 1)), Ballot((1, 0))))
    out = solve_optimal(KBBriberyInstance(e, 0, (table(2), table(2))))
    assert out.optimal_cost == 0 and out.optimal_plan.moves == ()


def test_veto_example():
    out = solve_optimal(veto_example())
    assert out.optimal_cost == 2
    assert out.optimal_plan.moves == (Move(0, 2, 0, 1),)
    assert tuple(out.post_scores) == (2, 2, 2)


def test_no_voters():
    e = KBElection(CandidateSet(("p", "a")), 1, 1, ())
    out = solve_optimal(KBBriberyInstance(e, 0, ()))
    assert out.optimal_cost == 0 and tuple(out.post_scores) == (0, 0)


def test_decide():
    assert decide(ex1(), 3).yes
    d = decide(ex1(), 2)
    assert not d.yes and d.plan is None and d.cost == 3
    assert decide(ex1(budget=3)).yes
    with pytest.raises(ValueError):
        decide(ex1())


def test_decide_zero_budget_winner():
    e = KBElection(CandidateSet(("p", "a")), 1, 1, (Ballot((1, 0)),))
    d = decide(KBBriberyInstance(e, 0, (table(2),)), 0)
    assert d.yes and d.plan.moves == ()


def test_default_prices_and_forced_ties():
    # with k=2, m=2, b=1 every ballot is (1,1), so p is always tied
    e = KBElection(CandidateSet(("p", "a", "b")), 1, 1, (Ballot((0, 1, 0)),))
    inst = KBBriberyInstance(e, 0, (table(3),))
    assert solve_optimal(inst).optimal_cost == 9
    e2 = KBElection(CandidateSet(("p", "a")), 2, 1, (Ballot((1, 1)), Ballot((1, 1))))
    assert solve_optimal(KBBriberyInstance(e2, 0, (table(2), table(2)))).optimal_cost == 0


def test_apply_plan():
    inst = ex1()
    assert apply_plan(inst, BriberyPlan((), 0)) == inst.election
    after = apply_plan(inst, BriberyPlan((Move(0, 1, 0, 1),), 3))
    assert [b.points for b in after.ballots] == [(1, 0), (0, 1), (1, 0)]


def test_apply_plan_moved_out_bound():
    with pytest.raises(InvalidElection, match="out of a slot holding 1"):
        apply_plan(ex1(), BriberyPlan((Move(0, 1, 0, 2),), 6))


def test_apply_plan_rejects_b_violation():
    e = KBElection(CandidateSet(("p", "a", "b")), 2, 1, (Ballot((1, 1, 0)),))
    inst = KBBriberyInstance(e, 0, (table(3),))
    with pytest.raises(InvalidElection):
        apply_plan(inst, BriberyPlan((Move(0, 1, 0, 1),), 9))


def test_network_shape():
    e = KBElection(CandidateSet(("p", "a")), 1, 1, (Ballot((0, 1)),))
    inst = KBBriberyInstance(e, 0, (table(2, default=4),))
    net = build_network(inst, 1)
    assert net.node_count == 8
    assert penalty(inst) == 1 + 1 * 1 * 4
    arcs = {(u, v): (c, w) for u, v, c, w in net.arcs}
    # s -> c_{1a}
    assert arcs[(0, 3)] == (1, 0)
    assert arcs[(0, 2)] == (0, 0)


def test_zero_target_blocks_strict_flow():
    inst = ex1()
    net = build_network(inst, 0)
    sink_caps = [c for u, v, c, _ in net.arcs if v == net.sink]
    assert sink_caps == [0, 0]
    assert solve_min_cost_flow(net, 3) is None


def test_penalty_one_when_prices_zero():
    e = KBElection(CandidateSet(("p", "a")), 1, 1, (Ballot((0, 1)),))
    assert penalty(KBBriberyInstance(e, 0, (PriceTable.uniform(2, 0),))) == 1


def test_target_range():
    assert list(target_range(ex1())) == [2, 3]
    e = KBElection(CandidateSet(("p", "a")), 2, 1, (Ballot((1, 0), 1),), free_form=True)
    assert list(target_range(KBBriberyInstance(e, 0, (table(3),)))) == [0, 1]


def test_free_form_all_unassigned():
    e = KBElection(CandidateSet(("p", "a")), 1, 1, (Ballot((0, 0), 1), Ballot((0, 0), 1)), free_form=True)
    out = solve_optimal(KBBriberyInstance(e, 0, (table(3), table(3))))
    assert out.optimal_cost == 0 and out.achieved_score == 0


def test_free_form_prefers_cheapest_route():
    # unassigning a's point (price 1) beats assigning to p (price 5)
    e = KBElection(CandidateSet(("p", "a")), 1, 1, (Ballot((0, 1), 0), Ballot((0, 0), 1)), free_form=True)
    prices = (table(3, {(1, 2): 1}), table(3, {(2, 0): 5}))
    out = solve_optimal(KBBriberyInstance(e, 0, prices))
    assert oracle_cost(KBBriberyInstance(e, 0, prices)) == 1
    assert out.optimal_cost == 1


@pytest.mark.parametrize("kind", ["kb", "kb_freeform"])
def test_oracle_equivalence_sample(kind):
    encoders = ("utility", "plurality", "veto", "t-approval") if kind == "kb" else ("utility", "approval")
    for seed in range(120):
        inst = random_instance(seed, kind, encoders[seed % len(encoders)])
        assert flow_cost(inst) == oracle_cost(inst), seed


@pytest.mark.parametrize("seed", range(40))
def test_cost_decomposition_and_certificates(seed):
    inst = random_instance(seed, "kb_freeform" if seed % 2 else "kb")
    if inst.election.n == 0:
        return
    layout = _Layout(inst)
    kn = inst.election.k * inst.election.n
    for res in sweep(inst, layout):
        if res.flow is None:
            continue
        assert verify_optimality(res.network, res.flow)
        if res.accepted:
            from briberon.kb import _decode

            plan = _decode(inst, layout, res.flow)
            assert res.flow.cost - res.penalty * (kn - res.preferred_inflow) == plan.total_price


@pytest.mark.parametrize("seed", range(30))
def test_output_plan_is_valid(seed):
    inst = random_instance(seed, "kb_freeform" if seed % 3 == 0 else "kb")
    try:
        out = solve_optimal(inst)
    except Infeasible:
        return
    post = tally(apply_plan(inst, out.optimal_plan))
    assert inst.preferred in winners(post)
    assert out.optimal_plan.moves == tuple(sorted(out.optimal_plan.moves))


def _with_price(inst, voter, i, j, value):
    rows = [list(r) for r in inst.prices[voter].prices]
    rows[i][j] = value
    prices = list(inst.prices)
    prices[voter] = PriceTable(tuple(map(tuple, rows)))
    return KBBriberyInstance(inst.election, inst.preferred, tuple(prices))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.data())
def test_price_monotonicity(seed, data):
    inst = random_instance(seed)
    if inst.election.n == 0:
        return
    v = data.draw(st.integers(0, inst.election.n - 1))
    size = inst.slot_count
    i, j = data.draw(st.tuples(st.integers(0, size - 1), st.integers(0, size - 1)).filter(lambda t: t[0] != t[1]))
    lower = data.draw(st.integers(0, inst.prices[v][i, j]))
    before, after = flow_cost(inst), flow_cost(_with_price(inst, v, i, j, lower))
    if before is None:
        return
    assert after is not None and after <= before


@pytest.mark.parametrize("seed", range(30))
def test_zero_price_collapse(seed):
    inst = random_instance(seed, "kb_freeform" if seed % 2 else "kb")
    zero = KBBriberyInstance(
        inst.election, inst.preferred, tuple(PriceTable.uniform(inst.slot_count, 0) for _ in inst.prices)
    )
    cost = flow_cost(zero)
    assert cost in (0, None)
    assert (cost is None) == (oracle_cost(zero) is None)


def _permute(inst, sigma):
    """Relabel candidates by ``sigma`` (a permutation fixing p's index)."""
    e = inst.election
    m = e.m
    full = list(sigma) + ([m] if e.free_form else [])
    inv = [full.index(x) for x in range(len(full))]
    ballots = tuple(Ballot(tuple(b.points[inv[c]] for c in range(m)), b.unassigned) for b in e.ballots)
    names = tuple(e.candidates.names[inv[c]] for c in range(m))
    tables = tuple(
        PriceTable(tuple(tuple(t[inv[x], inv[y]] for y in range(len(full))) for x in range(len(full))))
        for t in inst.prices
    )
    pe = KBElection(CandidateSet(names), e.k, e.b, ballots, e.free_form)
    return KBBriberyInstance(pe, sigma[inst.preferred], tables)


@pytest.mark.parametrize("seed", range(30))
def test_permutation_invariance(seed):
    inst = random_instance(seed, "kb_freeform" if seed % 2 else "kb")
    m = inst.election.m
    base = flow_cost(inst)
    for sigma in itertools.islice(itertools.permutations(range(m)), 6):
        assert flow_cost(_permute(inst, sigma)) == base


def test_threads_do_not_change_results(monkeypatch):
    insts = [random_instance(s) for s in range(20)]
    serial = [flow_cost(i) for i in insts]
    monkeypatch.setenv("BRIBERON_THREADS", "4")
    assert [flow_cost(i) for i in insts] == serial


def test_encoder_instances_solve():
    e = encode_rule("veto", ("p", "a", "b"), [["p", "a", "b"], ["p", "a", "b"], ["a", "b", "p"]])
    inst = KBBriberyInstance(e, 0, tuple(table(3, default=1) for _ in range(3)))
    assert flow_cost(inst) == oracle_cost(inst) == 1
