import json
from pathlib import Path

import jsonschema
import pytest

from briberon.cli import solve_report
from briberon.formats import (
    FormatSyntaxError,
    InstanceError,
    Report,
    SchemaError,
    ValidationError,
    parse_instance,
    parse_report,
    serialize_instance,
    serialize_report,
)
from briberon.kb import KBBriberyInstance

from conftest import FIXTURES

SCHEMA = Path(__file__).resolve().parents[1] / "schema"
FIXTURE_FILES = sorted(FIXTURES.glob("*.json"))

MINIMAL = {
    "problem": "kb",
    "k": 1,
    "b": 1,
    "candidates": ["p", "a"],
    "preferred": "p",
    "voters": [{"points": {"a": 1}, "prices": {"a->p": 2}}],
}


def schema(name):
    return json.loads((SCHEMA / f"{name}.schema.json").read_text())


def test_fixture_corpus_present():
    assert len(FIXTURE_FILES) >= 7


def test_minimal_document():
    inst = parse_instance(json.dumps(MINIMAL))
    assert isinstance(inst, KBBriberyInstance)
    assert inst.election.n == 1
    assert inst.prices[0][1, 0] == 2 and inst.prices[0][0, 1] == 0


def test_default_price():
    inst = parse_instance(json.dumps(dict(MINIMAL, default_price=7)))
    assert inst.prices[0][0, 1] == 7 and inst.prices[0][1, 0] == 2


def test_missing_preferred():
    doc = dict(MINIMAL)
    del doc["preferred"]
    with pytest.raises(SchemaError, match="preferred"):
        parse_instance(json.dumps(doc))


def test_unknown_field():
    with pytest.raises(SchemaError, match="colour"):
        parse_instance(json.dumps(dict(MINIMAL, colour="red")))


def test_diagonal_price():
    doc = dict(MINIMAL, voters=[{"points": {"a": 1}, "prices": {"a->a": 1}}])
    with pytest.raises(ValidationError, match="diagonal price must be 0"):
        parse_instance(json.dumps(doc))


def test_syntax_error_location():
    with pytest.raises(FormatSyntaxError, match="line 2"):
        parse_instance('{\n  "problem": }')


def test_unknown_label():
    doc = dict(MINIMAL, preferred="z")
    with pytest.raises(InstanceError, match="preferred"):
        parse_instance(json.dumps(doc))


def test_invalid_ballot_rejected():
    doc = dict(MINIMAL, voters=[{"points": {"a": 2}, "prices": {}}])
    with pytest.raises(ValidationError):
        parse_instance(json.dumps(doc))


@pytest.mark.parametrize("path", FIXTURE_FILES, ids=lambda p: p.name)
def test_fixture_round_trip(path):
    text = path.read_text()
    inst = parse_instance(text)
    assert serialize_instance(inst) == text
    assert parse_instance(serialize_instance(inst)) == inst


@pytest.mark.parametrize("path", FIXTURE_FILES, ids=lambda p: p.name)
def test_fixtures_match_schema(path):
    jsonschema.validate(json.loads(path.read_text()), schema("instance"))


@pytest.mark.parametrize("path", FIXTURE_FILES, ids=lambda p: p.name)
def test_reports_round_trip_and_match_schema(path):
    report = solve_report(parse_instance(path.read_text()))
    text = serialize_report(report)
    assert parse_report(text) == report
    assert serialize_report(parse_report(text)) == text
    jsonschema.validate(json.loads(text), schema("report"))


def test_empty_plan_report():
    text = serialize_report(Report("kb", "flow", True, 0, (), {"p": 1, "a": 1}, ("p", "a")))
    doc = json.loads(text)
    assert doc["plan"] == [] and doc["feasible"] is True


def test_example_1_report_plan():
    report = solve_report(parse_instance((FIXTURES / "ex1.kb.json").read_text()))
    assert json.loads(serialize_report(report))["plan"] == [{"voter": 0, "from": "a", "to": "p", "count": 1}]
