"""JSON instance and report documents.

Candidates are referenced by label; indices are bound at parse time.  Price
pairs are written ``"from->to"``; the unassigned slot of free-form instances is
spelled ``_``.  Pairs missing from a price map take ``default_price`` (voter
level, then document level, then 0).  The full schema lives in
``schema/instance.schema.json`` and ``schema/report.schema.json``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .election import INT64_MAX, Ballot, CandidateSet, KBElection
from .kb import EPS_LABEL, KBBriberyInstance, PriceTable
from .weighted import (
    ApprovalPrimeInstance,
    NegativeBriberyInstance,
    Weighted11Instance,
    WeightedPluralityInstance,
)

INSTANCE_FORMAT = "briberon/instance"
REPORT_FORMAT = "briberon/report"
VERSION = 1

PROBLEMS = ("kb", "kb_freeform", "plurality_weighted", "approval_prime", "negative_plurality", "weighted_11")


class InstanceError(ValueError):
    kind = "input"


class FormatSyntaxError(InstanceError):
    kind = "syntax"


class SchemaError(InstanceError):
    kind = "schema"


class ValidationError(InstanceError):
    kind = "validation"


def _load(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatSyntaxError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _int(value, where, lo=0):
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{where}: expected an integer, got {value!r}")
    if not lo <= value <= INT64_MAX:
        raise SchemaError(f"{where}: {value} outside [{lo}, 2^63-1]")
    return value


def _fields(obj, where, required, optional=()):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    for name in required:
        if name not in obj:
            raise SchemaError(f"{where}: missing required field '{name}'")
    extra = sorted(set(obj) - set(required) - set(optional))
    if extra:
        raise SchemaError(f"{where}: unknown field '{extra[0]}'")


def _label(cands: CandidateSet, value, where, allow_eps=False):
    if allow_eps and value == EPS_LABEL:
        return len(cands)
    if not isinstance(value, str) or value not in cands.names:
        raise SchemaError(f"{where}: unknown candidate {value!r}")
    return cands.index(value)


def _price_table(obj, cands, where, default, allow_eps):
    size = len(cands) + (1 if allow_eps else 0)
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected a map of \"from->to\" prices")
    rows = [[0 if i == j else default for j in range(size)] for i in range(size)]
    for pair, price in obj.items():
        parts = pair.split("->")
        if len(parts) != 2:
            raise SchemaError(f"{where}: malformed price key {pair!r}")
        i = _label(cands, parts[0].strip(), f"{where}[{pair!r}]", allow_eps)
        j = _label(cands, parts[1].strip(), f"{where}[{pair!r}]", allow_eps)
        rows[i][j] = _int(price, f"{where}[{pair!r}]")
    try:
        return PriceTable(tuple(map(tuple, rows)))
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def parse_instance(text: str):
    """Parse an instance document into its typed instance."""
    doc = _load(text)
    _fields(doc, "document", ("problem", "candidates", "preferred", "voters"),
            ("format", "version", "k", "b", "budget", "default_price"))
    if doc.get("format", INSTANCE_FORMAT) != INSTANCE_FORMAT:
        raise SchemaError(f"format: expected {INSTANCE_FORMAT!r}")
    if doc.get("version", VERSION) != VERSION:
        raise SchemaError(f"version: unsupported version {doc.get('version')!r}")
    problem = doc["problem"]
    if problem not in PROBLEMS:
        raise SchemaError(f"problem: expected one of {', '.join(PROBLEMS)}, got {problem!r}")
    labels = doc["candidates"]
    if not isinstance(labels, list) or not all(isinstance(c, str) for c in labels):
        raise SchemaError("candidates: expected a list of labels")
    if EPS_LABEL in labels:
        raise SchemaError(f"candidates: label {EPS_LABEL!r} is reserved")
    try:
        cands = CandidateSet(tuple(labels))
    except ValueError as exc:
        raise ValidationError(f"candidates: {exc}") from None
    p = _label(cands, doc["preferred"], "preferred")
    budget = None if doc.get("budget") is None else _int(doc["budget"], "budget")
    default = _int(doc.get("default_price", 0), "default_price")
    voters = doc["voters"]
    if not isinstance(voters, list):
        raise SchemaError("voters: expected a list")
    try:
        if problem in ("kb", "kb_freeform"):
            return _parse_kb(doc, problem == "kb_freeform", cands, p, budget, default, voters)
        return _parse_weighted(problem, cands, p, budget, default, voters)
    except InstanceError:
        raise
    except (ValueError, OverflowError) as exc:
        raise ValidationError(str(exc)) from None


def _parse_kb(doc, free, cands, p, budget, default, voters):
    for name in ("k", "b"):
        if name not in doc:
            raise SchemaError(f"document: missing required field '{name}'")
    k, b = _int(doc["k"], "k", 1), _int(doc["b"], "b", 1)
    ballots, tables = [], []
    for v, obj in enumerate(voters):
        where = f"voters[{v}]"
        opt = ("weight", "prices", "default_price") + (("unassigned",) if free else ())
        _fields(obj, where, ("points",), opt)
        if "weight" in obj and _int(obj["weight"], f"{where}.weight", 1) != 1:
            raise ValidationError(f"{where}.weight: (k,b)-bribery voters are unweighted")
        pts = [0] * len(cands)
        if not isinstance(obj["points"], dict):
            raise SchemaError(f"{where}.points: expected a map from labels to points")
        for label, x in obj["points"].items():
            pts[_label(cands, label, f"{where}.points")] = _int(x, f"{where}.points[{label!r}]")
        unassigned = _int(obj.get("unassigned", 0), f"{where}.unassigned")
        ballots.append(Ballot(tuple(pts), unassigned))
        d = _int(obj.get("default_price", default), f"{where}.default_price")
        tables.append(_price_table(obj.get("prices", {}), cands, f"{where}.prices", d, free))
    election = KBElection(cands, k, b, tuple(ballots), free_form=free)
    return KBBriberyInstance(election, p, tuple(tables), budget)


def _parse_weighted(problem, cands, p, budget, default, voters):
    weights, votes, prices, approvals, flips, tables = [], [], [], [], [], []
    for v, obj in enumerate(voters):
        where = f"voters[{v}]"
        if problem == "plurality_weighted":
            _fields(obj, where, ("vote", "price"), ("weight",))
            prices.append(_int(obj["price"], f"{where}.price"))
        elif problem == "approval_prime":
            _fields(obj, where, ("approvals", "flip_prices"), ("weight",))
            if not isinstance(obj["approvals"], list):
                raise SchemaError(f"{where}.approvals: expected a list of labels")
            chosen = {_label(cands, c, f"{where}.approvals") for c in obj["approvals"]}
            approvals.append(tuple(int(c in chosen) for c in range(len(cands))))
            fp = obj["flip_prices"]
            if not isinstance(fp, list) or len(fp) != len(cands):
                raise SchemaError(f"{where}.flip_prices: expected {len(cands)} integers")
            flips.append(tuple(_int(x, f"{where}.flip_prices[{i}]") for i, x in enumerate(fp)))
        elif problem == "negative_plurality":
            _fields(obj, where, ("vote",), ("weight",))
        else:
            _fields(obj, where, ("vote",), ("weight", "prices", "default_price"))
            d = _int(obj.get("default_price", default), f"{where}.default_price")
            tables.append(_price_table(obj.get("prices", {}), cands, f"{where}.prices", d, False))
        weights.append(_int(obj.get("weight", 1), f"{where}.weight", 1))
        if problem != "approval_prime":
            votes.append(_label(cands, obj["vote"], f"{where}.vote"))
    if problem == "plurality_weighted":
        return WeightedPluralityInstance(cands, p, weights, votes, prices, budget)
    if problem == "approval_prime":
        return ApprovalPrimeInstance(cands, p, weights, approvals, flips, budget)
    if budget is None:
        raise SchemaError("document: missing required field 'budget'")
    if problem == "negative_plurality":
        return NegativeBriberyInstance(cands, p, weights, votes, budget)
    return Weighted11Instance(cands, p, weights, votes, tables, budget)


def problem_of(inst) -> str:
    if isinstance(inst, KBBriberyInstance):
        return "kb_freeform" if inst.election.free_form else "kb"
    return {
        WeightedPluralityInstance: "plurality_weighted",
        ApprovalPrimeInstance: "approval_prime",
        NegativeBriberyInstance: "negative_plurality",
        Weighted11Instance: "weighted_11",
    }[type(inst)]


def slot_label(cands: CandidateSet, slot: int) -> str:
    return EPS_LABEL if slot == len(cands) else cands.names[slot]


def _price_map(table: PriceTable, cands):
    out = {}
    for i in range(table.size):
        for j in range(table.size):
            if i != j:
                out[f"{slot_label(cands, i)}->{slot_label(cands, j)}"] = table[i, j]
    return out


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def serialize_instance(inst) -> str:
    problem = problem_of(inst)
    cands = inst.candidates if not isinstance(inst, KBBriberyInstance) else inst.election.candidates
    doc = {"format": INSTANCE_FORMAT, "version": VERSION, "problem": problem}
    if isinstance(inst, KBBriberyInstance):
        doc["k"] = inst.election.k
        doc["b"] = inst.election.b
    doc["candidates"] = list(cands.names)
    doc["preferred"] = cands.names[inst.preferred]
    if inst.budget is not None:
        doc["budget"] = inst.budget
    voters = []
    if isinstance(inst, KBBriberyInstance):
        for v, ballot in enumerate(inst.election.ballots):
            obj = {"points": {c: x for c, x in zip(cands.names, ballot.points) if x}}
            if inst.election.free_form:
                obj["unassigned"] = ballot.unassigned
            obj["prices"] = _price_map(inst.prices[v], cands)
            voters.append(obj)
    elif isinstance(inst, WeightedPluralityInstance):
        for w, v, q in zip(inst.weights, inst.votes, inst.prices):
            voters.append({"vote": cands.names[v], "weight": w, "price": q})
    elif isinstance(inst, ApprovalPrimeInstance):
        for w, a, q in zip(inst.weights, inst.approvals, inst.flip_prices):
            approved = [c for c, x in zip(cands.names, a) if x]
            voters.append({"approvals": approved, "weight": w, "flip_prices": list(q)})
    elif isinstance(inst, NegativeBriberyInstance):
        for w, v in zip(inst.weights, inst.votes):
            voters.append({"vote": cands.names[v], "weight": w})
    else:
        for w, v, t in zip(inst.weights, inst.votes, inst.prices):
            voters.append({"vote": cands.names[v], "weight": w, "prices": _price_map(t, cands)})
    doc["voters"] = voters
    return _dump(doc)


# ---------------------------------------------------------------- reports

_REPORT_KEYS = (
    "problem", "method", "epsilon", "feasible", "optimal_cost", "budget",
    "within_budget", "achieved_score", "plan", "post_scores", "winners",
)


@dataclass(frozen=True)
class Report:
    problem: str
    method: str
    feasible: bool
    optimal_cost: int | None
    plan: tuple = ()
    post_scores: dict = field(default_factory=dict)
    winners: tuple[str, ...] = ()
    epsilon: str | None = None
    budget: int | None = None
    within_budget: bool | None = None
    achieved_score: int | None = None

    def to_doc(self) -> dict:
        doc = {"format": REPORT_FORMAT, "version": VERSION}
        for key in _REPORT_KEYS:
            value = getattr(self, key)
            if key in ("epsilon", "budget", "within_budget", "achieved_score") and value is None:
                continue
            if key == "plan":
                value = [dict(item) for item in value]
            elif key == "winners":
                value = list(value)
            elif key == "post_scores":
                value = dict(value)
            doc[key] = value
        return doc


def _freeze_item(item):
    return tuple(item.items())


def serialize_report(report: Report) -> str:
    return _dump(report.to_doc())


def parse_report(text: str) -> Report:
    doc = _load(text)
    _fields(doc, "report", ("problem", "method", "feasible", "optimal_cost", "plan", "post_scores", "winners"),
            ("format", "version", "epsilon", "budget", "within_budget", "achieved_score"))
    if doc.get("format", REPORT_FORMAT) != REPORT_FORMAT:
        raise SchemaError(f"format: expected {REPORT_FORMAT!r}")
    if not isinstance(doc["plan"], list) or not all(isinstance(x, dict) for x in doc["plan"]):
        raise SchemaError("plan: expected a list of objects")
    if doc.get("epsilon") is not None:
        Fraction(doc["epsilon"])
    return Report(
        problem=doc["problem"],
        method=doc["method"],
        feasible=bool(doc["feasible"]),
        optimal_cost=doc["optimal_cost"],
        plan=tuple(_freeze_item(x) for x in doc["plan"]),
        post_scores=dict(doc["post_scores"]),
        winners=tuple(doc["winners"]),
        epsilon=doc.get("epsilon"),
        budget=doc.get("budget"),
        within_budget=doc.get("within_budget"),
        achieved_score=doc.get("achieved_score"),
    )
