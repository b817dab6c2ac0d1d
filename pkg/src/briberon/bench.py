"""Benchmark suites behind ``briberon bench``.

* ``acceptance``: the oracle-checked corpora (flow vs brute force, FPTAS,
  reduction) with wall-clock times.
* ``scaling``: the m=10, n=50, b=5 instance family for k in 5, 10, 20, 50.
* ``kernels``: the same flow workload with numba-compiled kernels and with the
  pure-Python fallback (run in a child process with BRIBERON_DISABLE_NUMBA=1).
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import time
from fractions import Fraction

from . import _accel, kb, testkit, weighted

SUITES = ("acceptance", "scaling", "kernels")


def _table(headers, rows):
    widths = [max(len(str(x)) for x in col) for col in zip(headers, *rows)]
    line = lambda r: "  ".join(str(x).rjust(w) for x, w in zip(r, widths))
    return "\n".join([line(headers), line(["-" * w for w in widths])] + [line(r) for r in rows])


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


CORPUS_ENCODERS = {"kb": ("utility", "plurality", "veto", "t-approval"), "kb_freeform": ("utility", "approval")}


def kb_corpus(kind: str, count: int, seed0: int = 0):
    """Yield ``(encoder, instance)`` pairs; encoders rotate, t-approval uses t=3.

    Approval sets k = m, so its instances stay at m <= 3 to keep k <= 3.
    """
    encoders = CORPUS_ENCODERS[kind]
    for s in range(count):
        enc = encoders[s % len(encoders)]
        m = {"t-approval": (3, 4), "approval": (2, 3)}.get(enc, (2, 4))
        yield enc, testkit.gen_random(
            testkit.GenParams(seed=seed0 + s, kind=kind, encoder=enc, m=m, n=(1, 4), k=(1, 3), b=(1, 2), prices=(0, 9))
        )


def _kb_row(kind, count):
    mismatches = 0
    flow_t = oracle_t = 0.0
    for _, inst in kb_corpus(kind, count):
        try:
            got, dt = _timed(lambda: kb.solve_optimal(inst).optimal_cost)
        except kb.Infeasible:
            got, dt = None, 0.0
        flow_t += dt
        want, dt = _timed(lambda: testkit.brute_kb(inst))
        oracle_t += dt
        if got != (None if want is None else want[0]):
            mismatches += 1
    return [f"{kind} flow vs oracle", count, f"{flow_t:.2f}", f"{oracle_t:.2f}", "ok" if not mismatches else f"{mismatches} bad"]


def _fptas_row(kind, count):
    bad = 0
    total = 0.0
    for s in range(count):
        if kind == "plurality_weighted":
            params = testkit.GenParams(seed=s, kind=kind, m=(2, 4), n=(1, 10), weights=(1, 20), prices=(0, 10**6))
            oracle = testkit.brute_weighted_plurality
        else:
            params = testkit.GenParams(seed=s, kind=kind, m=(2, 4), n=(1, 5), weights=(1, 20), prices=(0, 10**6))
            oracle = testkit.brute_approval_prime
        inst = testkit.gen_random(params)
        opt = oracle(inst)
        for eps in (Fraction(1, 10), Fraction(1, 4), Fraction(1, 2)):
            res, dt = _timed(lambda: weighted.fptas(inst, eps))
            total += dt
            if res.cost > (1 + 2 * eps) * opt or not inst.is_feasible(res.solution.chosen):
                bad += 1
    return [f"{kind} fptas", count, f"{total:.2f}", "-", "ok" if not bad else f"{bad} bad"]


def _reduction_row(count):
    bad = 0
    t0 = time.perf_counter()
    for s in range(count):
        inst = testkit.gen_random(testkit.GenParams(seed=s, kind="negative_plurality", m=(2, 4), n=(1, 6), weights=(1, 9)))
        if testkit.brute_11_weighted(weighted.reduce_negative_bribery(inst)) != testkit.brute_negative(inst):
            bad += 1
    return ["negative -> (1,1) reduction", count, f"{time.perf_counter() - t0:.2f}", "-", "ok" if not bad else f"{bad} bad"]


def acceptance(quick=False):
    scale = 5 if quick else 1
    rows = [
        _kb_row("kb", 500 // scale),
        _kb_row("kb_freeform", 300 // scale),
        _fptas_row("plurality_weighted", 200 // scale),
        _fptas_row("approval_prime", 200 // scale),
        _reduction_row(200 // scale),
    ]
    return _table(["corpus", "instances", "solver s", "oracle s", "status"], rows)


def scaling_times(ks=(5, 10, 20, 50), m=10, n=50, b=5, max_price=100, seed=0):
    out = []
    for k in ks:
        inst = testkit.scaling_instance(m, n, k, b, max_price, seed)
        res, dt = _timed(lambda: kb.solve_optimal(inst))
        out.append((k, len(kb.target_range(inst)), res.optimal_cost, dt))
    return out


def scaling(quick=False):
    ks = (5, 10, 20) if quick else (5, 10, 20, 50)
    rows = [[k, targets, cost, f"{dt:.2f}"] for k, targets, cost, dt in scaling_times(ks)]
    return _table(["k", "targets K", "optimal cost", "seconds"], rows)


def _kernel_workload(quick):
    # flow-heavy: a mid-size scaling instance plus the kb acceptance corpus
    inst = testkit.scaling_instance(6, 12 if quick else 20, 6, 3, 100, seed=1)
    _, big = _timed(lambda: kb.solve_optimal(inst))
    corpus = [inst for _, inst in kb_corpus("kb", 40 if quick else 150)]
    t0 = time.perf_counter()
    for c in corpus:
        kb.solve_optimal(c)
    small = time.perf_counter() - t0
    winst = testkit.gen_random(testkit.GenParams(seed=3, kind="plurality_weighted", n=(10, 10), m=(4, 4), weights=(1, 20), prices=(1, 10**6)))
    _, fp = _timed(lambda: weighted.fptas(winst, Fraction(1, 10)))
    return {"flow m=6": big, "kb corpus": small, "plurality fptas": fp}


def _warm_up():
    # trigger compilation outside the timed region
    kb.solve_optimal(next(kb_corpus("kb", 1))[1])
    weighted.solve_plurality_exact(
        weighted.WeightedPluralityInstance(("p", "a"), 0, (1, 2), (0, 1), (1, 1))
    )


def kernels(quick=False):
    env = dict(os.environ)
    results = {}
    for label, flag in (("numba", "0"), ("python", "1")):
        env["BRIBERON_DISABLE_NUMBA"] = flag
        cmd = [sys.executable, "-m", "briberon.bench", "--worker"] + (["--quick"] if quick else [])
        proc = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
        results[label] = json.loads(proc.stdout.strip().splitlines()[-1])
    rows = []
    for name in results["numba"]["times"]:
        a, b = results["numba"]["times"][name], results["python"]["times"][name]
        rows.append([name, f"{a:.3f}", f"{b:.3f}", f"{b / a:.1f}x" if a > 0 else "-"])
    header = f"numba enabled in worker: {results['numba']['numba']} / {results['python']['numba']}"
    return header + "\n" + _table(["workload", "numba s", "python s", "speedup"], rows)


def run_suite(name: str, quick: bool = False) -> str:
    return {"acceptance": acceptance, "scaling": scaling, "kernels": kernels}[name](quick=quick)


def _worker(quick):
    _warm_up()
    print(json.dumps({"numba": _accel.NUMBA_ENABLED, "times": _kernel_workload(quick)}))


if __name__ == "__main__":
    if "--worker" in sys.argv:
        _worker("--quick" in sys.argv)
    else:
        suite = sys.argv[1] if len(sys.argv) > 1 else "acceptance"
        print(run_suite(suite, quick="--quick" in sys.argv))
