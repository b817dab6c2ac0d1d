"""Command-line entry point: ``briberon solve|reduce|gen|bench``.

Exit codes: 0 solved/feasible, 1 infeasible or decision "no", 2 input error,
3 internal error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from fractions import Fraction

from . import kb, testkit, weighted
from .election import tally, winners
from .formats import (
    InstanceError,
    Report,
    parse_instance,
    problem_of,
    serialize_instance,
    serialize_report,
    slot_label,
)

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3

METHODS = {
    "kb": ("flow", "exact", "oracle"),
    "kb_freeform": ("flow", "exact", "oracle"),
    "plurality_weighted": ("exact", "fptas", "oracle"),
    "approval_prime": ("exact", "fptas", "oracle"),
    "negative_plurality": ("exact", "oracle"),
    "weighted_11": ("exact", "oracle"),
}


class UsageError(ValueError):
    pass


def _labels(cands, scores):
    return {c: s for c, s in zip(cands.names, scores)}


def _winners(cands, scores):
    return tuple(cands.names[i] for i in sorted(winners(scores)))


def _item(**kv):
    return tuple(kv.items())


def _finish(problem, method, cands, feasible, cost, plan, scores, budget, eps=None, K=None):
    within = None
    if budget is not None:
        within = bool(feasible and cost is not None and cost <= budget)
    return Report(
        problem=problem,
        method=method,
        feasible=feasible,
        optimal_cost=cost,
        plan=tuple(plan),
        post_scores=_labels(cands, scores),
        winners=_winners(cands, scores),
        epsilon=None if eps is None else f"{eps.numerator}/{eps.denominator}",
        budget=budget,
        within_budget=within,
        achieved_score=K,
    )


def _kb_report(inst, method, budget):
    cands = inst.election.candidates
    problem = problem_of(inst)
    if method == "oracle":
        found = testkit.brute_kb(inst)
        if found is None:
            return _finish(problem, method, cands, False, None, (), tally(inst.election), budget)
        cost, plan = found
        post = tally(kb.apply_plan(inst, plan))
        K = post[inst.preferred]
    else:
        try:
            out = kb.solve_optimal(inst)
        except kb.Infeasible:
            return _finish(problem, method, cands, False, None, (), tally(inst.election), budget)
        plan, cost, post, K = out.optimal_plan, out.optimal_cost, out.post_scores, out.achieved_score
    items = [
        _item(voter=mv.voter, **{"from": slot_label(cands, mv.src)}, to=slot_label(cands, mv.dst), count=mv.count)
        for mv in plan.moves
    ]
    return _finish(problem, method, cands, True, cost, items, post, budget, K=K)


def _plurality_items(inst, revotes):
    names = inst.candidates.names
    return [_item(voter=i, **{"from": names[inst.votes[i]]}, to=names[c]) for i, c in sorted(revotes.items())]


def _weighted_report(inst, method, budget, eps):
    problem = problem_of(inst)
    names = inst.candidates.names
    used_eps = None
    if isinstance(inst, weighted.WeightedPluralityInstance):
        if method == "oracle":
            cost, revotes = testkit.search_weighted_plurality(inst)
        else:
            if method == "fptas":
                res = weighted.fptas(inst, eps)
                sol, used_eps = res.solution, eps
            else:
                sol = weighted.solve_plurality_exact(inst)
            cost, revotes = sol.cost, {i: inst.preferred for i in sol.chosen}
        scores = [0] * inst.m
        for i, (w, v) in enumerate(zip(inst.weights, inst.votes)):
            scores[revotes.get(i, v)] += w
        items = _plurality_items(inst, revotes)
    else:
        if method == "oracle":
            cost, flips = testkit.search_approval_prime(inst)
        else:
            if method == "fptas":
                sol, used_eps = weighted.fptas(inst, eps).solution, eps
            else:
                sol = weighted.solve_approval_prime_exact(inst)
            cost, flips = sol.cost, sol.chosen
        scores = inst.scores(flips)
        items = [
            _item(voter=v, candidate=names[c], flip="disapprove" if inst.approvals[v][c] else "approve")
            for v, c in sorted(flips)
        ]
    return _finish(problem, method, inst.candidates, True, cost, items, scores, budget, used_eps)


def _decision_report(inst, method, budget):
    problem = problem_of(inst)
    if budget is not None:
        inst = replace(inst, budget=budget)
    if isinstance(inst, weighted.NegativeBriberyInstance):
        revotes = testkit.search_negative(inst)
        feasible = revotes is not None
        cost = len(revotes) if feasible else None
    else:
        found = testkit.search_11_weighted(inst)
        feasible = found is not None and found[0] <= inst.budget
        cost = found[0] if found is not None else None
        revotes = found[1] if feasible else None
    scores = [0] * inst.m
    for i, (w, v) in enumerate(zip(inst.weights, inst.votes)):
        scores[(revotes or {}).get(i, v)] += w
    items = _plurality_items(inst, revotes or {})
    return _finish(problem, method, inst.candidates, feasible, cost, items, scores, inst.budget)


def solve_report(inst, method: str | None = None, epsilon=None, budget: int | None = None) -> Report:
    problem = problem_of(inst)
    method = method or METHODS[problem][0]
    if method not in METHODS[problem]:
        raise UsageError(f"method {method!r} does not apply to {problem}; use one of {', '.join(METHODS[problem])}")
    if budget is None:
        budget = getattr(inst, "budget", None)
    if problem in ("kb", "kb_freeform"):
        return _kb_report(inst, method, budget)
    if problem in ("plurality_weighted", "approval_prime"):
        eps = weighted.as_eps(epsilon if epsilon is not None else Fraction(1, 10))
        return _weighted_report(inst, method, budget, eps)
    return _decision_report(inst, method, budget)


def exit_code(report: Report) -> int:
    if not report.feasible:
        return EXIT_NO
    if report.within_budget is False:
        return EXIT_NO
    return EXIT_OK


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _range(text):
    try:
        lo, _, hi = text.partition(":")
        lo = int(lo)
        return (lo, int(hi) if hi else lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None


def _epsilon(text):
    try:
        return weighted.as_eps(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="briberon", description="Solvers for election bribery with per-move prices.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("file")
    s.add_argument("--method", choices=("flow", "exact", "fptas", "oracle"))
    s.add_argument("--epsilon", type=_epsilon, help="accuracy N/D for --method fptas (default 1/10)")
    s.add_argument("--budget", type=int)
    s.add_argument("--out")

    r = sub.add_parser("reduce", help="map negative bribery to (1,1)-weighted-bribery")
    r.add_argument("file")
    r.add_argument("--out", required=True)

    g = sub.add_parser("gen", help="emit a seeded random instance")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--kind", choices=testkit.KINDS, required=True)
    g.add_argument("--encoder", choices=testkit.ENCODERS, default="utility")
    for name in ("m", "n", "k", "b", "weights", "prices", "budget"):
        g.add_argument(f"--{name}", type=_range, metavar="LO:HI")
    g.add_argument("--t", type=int, default=3)
    g.add_argument("--out")

    b = sub.add_parser("bench", help="run a benchmark suite and print a timing table")
    b.add_argument("--suite", default="acceptance")
    b.add_argument("--quick", action="store_true", help="smaller corpora")
    return parser


def _cmd_solve(args):
    inst = parse_instance(_read(args.file))
    if args.budget is not None and args.budget < 0:
        raise UsageError("--budget must be nonnegative")
    if args.epsilon is not None and args.method != "fptas":
        raise UsageError("--epsilon only applies to --method fptas")
    report = solve_report(inst, args.method, args.epsilon, args.budget)
    _write(serialize_report(report), args.out)
    return exit_code(report)


def _cmd_reduce(args):
    inst = parse_instance(_read(args.file))
    if not isinstance(inst, weighted.NegativeBriberyInstance):
        raise UsageError("reduce expects a negative_plurality instance")
    _write(serialize_instance(weighted.reduce_negative_bribery(inst)), args.out)
    return EXIT_OK


def _cmd_gen(args):
    kw = {name: getattr(args, name) for name in ("m", "n", "k", "b", "weights", "prices", "budget")}
    kw = {k: v for k, v in kw.items() if v is not None}
    try:
        params = testkit.GenParams(seed=args.seed, kind=args.kind, encoder=args.encoder, t=args.t, **kw)
        inst = testkit.gen_random(params)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(serialize_instance(inst), args.out)
    return EXIT_OK


def _cmd_bench(args):
    from . import bench

    if args.suite not in bench.SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(bench.SUITES)}")
    print(bench.run_suite(args.suite, quick=args.quick))
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        handler = {"solve": _cmd_solve, "reduce": _cmd_reduce, "gen": _cmd_gen, "bench": _cmd_bench}[args.command]
        return handler(args)
    except (UsageError, InstanceError, testkit.OracleCapExceeded) as exc:
        print(f"briberon: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"briberon: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
