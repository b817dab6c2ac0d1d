import math
from fractions import Fraction

import pytest

from briberon import testkit
from briberon.kb import PriceTable
from briberon.weighted import (
    ApprovalPrimeInstance,
    NegativeBriberyInstance,
    WeightedPluralityInstance,
    as_eps,
    big_price,
    fptas,
    fptas_strict,
    iteration_count,
    reduce_negative_bribery,
    scale_price,
    scale_prices,
    solve_approval_prime_exact,
    solve_plurality_exact,
)

EPSILONS = (Fraction(1, 10), Fraction(1, 4), Fraction(1, 2))


def plurality_example():
    return WeightedPluralityInstance(("p", "a"), 0, (4, 2, 1), (1, 1, 0), (10, 2, 99))


def approval_example():
    return ApprovalPrimeInstance(("p", "a"), 0, (3, 2), ((0, 1), (1, 0)), ((4, 1), (9, 9)))


def random_plurality(seed, n=(1, 10), prices=(0, 10**6)):
    return testkit.gen_random(
        testkit.GenParams(seed=seed, kind="plurality_weighted", m=(2, 4), n=n, weights=(1, 20), prices=prices)
    )


def random_approval(seed, prices=(0, 10**6)):
    return testkit.gen_random(
        testkit.GenParams(seed=seed, kind="approval_prime", m=(2, 4), n=(1, 5), weights=(1, 20), prices=prices)
    )


@pytest.mark.parametrize("method", ["auto", "dp", "bnb"])
def test_plurality_example(method):
    sol = solve_plurality_exact(plurality_example(), method)
    assert sol.chosen == (0,) and sol.cost == 10


def test_plurality_all_for_p():
    inst = WeightedPluralityInstance(("p", "a"), 0, (3, 1), (0, 0), (5, 5))
    assert solve_plurality_exact(inst).cost == 0


def test_plurality_tie_is_enough():
    inst = WeightedPluralityInstance(("p", "a"), 0, (1, 1), (1, 0), (5, 1))
    sol = solve_plurality_exact(inst)
    assert sol.chosen == () and sol.cost == 0


def test_approval_example():
    inst = approval_example()
    sol = solve_approval_prime_exact(inst)
    assert sol.chosen == ((0, 1),) and sol.cost == 1
    assert inst.scores(sol.chosen) == [2, 0]


def test_approval_already_winning():
    inst = ApprovalPrimeInstance(("p", "a", "b"), 0, (1, 2), ((1, 0, 0), (1, 0, 0)), ((1, 1, 1), (1, 1, 1)))
    assert solve_approval_prime_exact(inst).cost == 0


def test_approval_all_zero_tie():
    inst = ApprovalPrimeInstance(("p", "a"), 0, (1,), ((0, 0),), ((7, 0),))
    sol = solve_approval_prime_exact(inst)
    assert sol.chosen == () and sol.cost == 0


@pytest.mark.parametrize("seed", range(150))
def test_plurality_exact_vs_arbitrary_revotes(seed):
    inst = random_plurality(seed, n=(1, 8), prices=(0, 50))
    want = testkit.brute_weighted_plurality(inst, arbitrary_revotes=True)
    assert testkit.brute_weighted_plurality(inst) == want
    for method in ("dp", "bnb"):
        sol = solve_plurality_exact(inst, method)
        assert sol.cost == want and inst.is_feasible(sol.chosen)


def test_plurality_large_weights_use_bnb():
    inst = WeightedPluralityInstance(("p", "a", "b"), 0, (15000, 9000, 4000, 1), (1, 2, 1, 0), (7, 3, 2, 1))
    assert solve_plurality_exact(inst).cost == solve_plurality_exact(inst, "dp").cost == testkit.brute_weighted_plurality(inst)


@pytest.mark.parametrize("seed", range(150))
def test_approval_exact_vs_oracle(seed):
    inst = random_approval(seed, prices=(0, 50))
    sol = solve_approval_prime_exact(inst)
    assert sol.cost == testkit.brute_approval_prime(inst)
    assert inst.is_feasible(sol.chosen)


def test_scale_price_examples():
    half = Fraction(1, 2)
    assert scale_price(7, 8, 3, half) == 6
    assert scale_price(10, 8, 3, half) == 37
    assert big_price(3, half) == 37
    for t in (1, 8, 1024):
        assert scale_price(0, t, 3, half) == 0


@pytest.mark.parametrize("seed", range(30))
def test_scaled_price_bound(seed):
    inst = random_plurality(seed)
    N = inst.price_count
    for eps in EPSILONS:
        bound = big_price(N, eps)
        assert bound == math.ceil((1 + 2 * eps) / eps * N * N + 1)
        t = 1
        while t < 2 * max(inst.all_prices()) + 2:
            assert max(scale_prices(inst, t, eps).all_prices()) <= bound
            t *= 2


def test_as_eps():
    assert as_eps("1/4") == Fraction(1, 4)
    for bad in (0, 1, "3/2", -1):
        with pytest.raises(ValueError):
            as_eps(bad)


def test_fptas_example():
    inst = plurality_example()
    res = fptas(inst, Fraction(1, 2))
    assert res.cost <= 20 and inst.is_feasible(res.solution.chosen)
    assert fptas_strict(inst, Fraction(1, 2)).cost <= 15


def test_fptas_zero_prices():
    inst = WeightedPluralityInstance(("p", "a"), 0, (4, 1), (1, 0), (0, 0))
    res = fptas(inst, Fraction(1, 10))
    assert res.cost == 0 and res.solver_calls == iteration_count(0) == 1
    assert fptas_strict(inst, Fraction(1, 10)).cost == 0


def test_fptas_eps_near_one():
    inst = plurality_example()
    assert fptas_strict(inst, Fraction(99, 100)).cost < 2 * 10


@pytest.mark.parametrize("seed", range(40))
def test_fptas_uniform_prices_exact(seed):
    inst = random_plurality(seed, prices=(1, 1))
    assert fptas(inst, Fraction(1, 4)).cost == testkit.brute_weighted_plurality(inst)


@pytest.mark.parametrize("T, calls", [(0, 1), (1, 1), (2, 2), (3, 3), (4, 3), (5, 4), (99, 8), (128, 8), (129, 9)])
def test_iteration_count(T, calls):
    assert iteration_count(T) == calls


@pytest.mark.parametrize("seed", range(40))
def test_fptas_call_count_matches(seed):
    inst = random_approval(seed) if seed % 2 else random_plurality(seed)
    calls = []

    def counting(scaled):
        calls.append(1)
        from briberon.weighted import default_solver

        return default_solver(scaled)

    res = fptas(inst, Fraction(1, 4), counting)
    assert res.solver_calls == len(calls) == iteration_count(max(inst.all_prices()))


def test_reduction_prices():
    inst = NegativeBriberyInstance(("p", "a", "b"), 0, (1, 1, 1), (1, 1, 0), 5)
    red = reduce_negative_bribery(inst)
    t = red.prices[0]
    assert (t[1, 0], t[2, 0]) == (6, 6)
    assert (t[1, 2], t[2, 1], t[0, 1], t[0, 2]) == (1, 1, 1, 1)
    assert all(p == t for p in red.prices) and red.budget == 5


def test_reduction_zero_budget():
    inst = NegativeBriberyInstance(("p", "a"), 0, (2, 1), (1, 0), 0)
    red = reduce_negative_bribery(inst)
    assert red.prices[0] == PriceTable(((0, 1), (1, 0)))
    assert testkit.brute_negative(inst) is False
    assert testkit.brute_11_weighted(red) is False


def test_reduction_example():
    inst = NegativeBriberyInstance(("p", "a", "b"), 0, (1, 1, 1), (1, 1, 0), 1)
    assert testkit.brute_negative(inst)
    assert testkit.brute_11_weighted(reduce_negative_bribery(inst))


@pytest.mark.parametrize("seed", range(100))
def test_reduction_equivalence(seed):
    inst = testkit.gen_random(
        testkit.GenParams(seed=seed, kind="negative_plurality", m=(2, 4), n=(1, 6), weights=(1, 9))
    )
    assert testkit.brute_11_weighted(reduce_negative_bribery(inst)) == testkit.brute_negative(inst)


@pytest.mark.parametrize(
    "ctor",
    [
        lambda: WeightedPluralityInstance(("p", "a"), 0, (0,), (1,), (1,)),
        lambda: WeightedPluralityInstance(("p", "a"), 0, (1,), (2,), (1,)),
        lambda: WeightedPluralityInstance(("p", "a"), 0, (), (), ()),
        lambda: ApprovalPrimeInstance(("p", "a"), 0, (1,), ((2, 0),), ((1, 1),)),
        lambda: NegativeBriberyInstance(("p", "a"), 0, (1,), (1,), -1),
    ],
)
def test_instance_validation(ctor):
    with pytest.raises(ValueError):
        ctor()
