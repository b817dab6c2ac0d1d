import json
import os
import subprocess
import sys

import numpy as np
import pytest

from briberon import testkit
from briberon._accel import NUMBA_ENABLED, py_func
from briberon.flow import FlowNetwork, ssp_kernel
from briberon.kb import build_network, solve_optimal
from briberon.weighted import knapsack_exact

SCRIPT = """
import json
from fractions import Fraction
from briberon import _accel, testkit, weighted
from briberon.bench import kb_corpus
from briberon.kb import Infeasible, solve_optimal

costs = []
for _, inst in kb_corpus("kb", 30):
    costs.append(solve_optimal(inst).optimal_cost)
for s in range(10):
    inst = testkit.gen_random(testkit.GenParams(seed=s, kind="plurality_weighted", n=(1, 8), weights=(1, 20), prices=(0, 1000)))
    costs.append(weighted.fptas(inst, Fraction(1, 4)).cost)
print(json.dumps({"numba": _accel.NUMBA_ENABLED, "costs": costs}))
"""


def _run(flag):
    env = dict(os.environ, BRIBERON_DISABLE_NUMBA=flag)
    proc = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def test_fallback_matches_compiled():
    fast, slow = _run("0"), _run("1")
    assert slow["numba"] is False
    assert fast["costs"] == slow["costs"]


@pytest.mark.skipif(not NUMBA_ENABLED, reason="numba disabled")
def test_kernel_py_func_agrees():
    inst = testkit.scaling_instance(4, 6, 3, 2, 20, seed=2)
    net = build_network(inst, 6)
    args = (net.node_count, net.source, net.sink, net.tails, net.heads, net.capacities, net.costs, 18)
    f1, p1 = ssp_kernel(*args)
    f2, p2 = py_func(ssp_kernel)(*args)
    assert p1 == p2 and np.array_equal(f1, f2)
    w = np.array([3, 5, 2, 7], dtype=np.int64)
    q = np.array([4, 1, 9, 2], dtype=np.int64)
    d1, t1 = knapsack_exact(w, q)
    d2, t2 = py_func(knapsack_exact)(w, q)
    assert np.array_equal(d1, d2) and np.array_equal(t1, t2)
