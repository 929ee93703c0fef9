import json
import random

import pytest

from dlp import direct
from dlp.export import dumps, export_provenance, import_provenance, provenance_document
from dlp.props import Atom, Not, atom
from dlp.syntax import load_document
from dlp.theory import TheoryStore
from generators import safe_ground_document

TJ = Atom("TrafficJam")
OBS = atom("Observe", "WeekdayAt5PM")


def boston():
    s = TheoryStore()
    s.create_theory("Boston")
    s.add_rule("Boston", [OBS], TJ)
    s.assert_prop("Boston", Not(TJ))
    s.assert_prop("Boston", OBS)
    return s


def test_empty_theory_export(tmp_path):
    s = TheoryStore()
    s.create_theory("Empty")
    out = tmp_path / "e.json"
    n = export_provenance(s, "Empty", out)
    data = out.read_bytes()
    assert n == len(data)
    doc = json.loads(data)
    assert list(doc) == ["theory", "assertions", "rules", "derivations", "arguments"]
    assert doc["theory"] == "Empty"
    assert all(doc[k] == [] for k in ("assertions", "rules", "derivations", "arguments"))


def test_boston_export_contains_contradiction_pair():
    s = boston()
    direct.saturate(s, "Boston")
    pairs = s.list_inconsistencies("Boston")
    doc = provenance_document(s, "Boston")
    by_id = {d["id"]: d for d in doc["derivations"]}
    (_, d_pos, d_neg), = pairs
    assert by_id[d_pos]["conclusion"] == "TrafficJam"
    assert by_id[d_pos]["rule"] == "rule-application"
    assert by_id[d_neg]["conclusion"] == "(not TrafficJam)"
    for d in doc["derivations"]:
        assert list(d)[:5] == ["id", "conclusion", "rule", "premises", "depth"]


def test_unwritable_path_raises_with_path(tmp_path):
    s = boston()
    bad = tmp_path / "missing-dir" / "x.json"
    with pytest.raises(OSError) as e:
        export_provenance(s, "Boston", bad)
    assert str(bad) in str(e.value)
    assert not bad.exists()


def test_import_reproduces_ledger(tmp_path):
    s = boston()
    direct.saturate(s, "Boston")
    d = direct.prove(s, "Boston", TJ).derivation
    a = s.argue("Boston", TJ, "pro", d, "alice")
    s.argue("Boston", a, "con", "sensor fault", "bob")
    out = tmp_path / "b.json"
    export_provenance(s, "Boston", out)

    s2 = TheoryStore()
    import_provenance(s2, out)
    assert provenance_document(s2, "Boston") == provenance_document(s, "Boston")
    t = s2.theory("Boston")
    assert all(direct.check_derivation(t, x.id) for x in t.derivations)


def test_import_then_continue_reasoning():
    s = boston()
    direct.saturate(s, "Boston")
    s2 = TheoryStore()
    import_provenance(s2, provenance_document(s, "Boston"), name="Copy")
    assert direct.prove(s2, "Copy", TJ)
    assert s2.assert_prop("Copy", Atom("Late")) == "A4"


def test_export_is_deterministic():
    a, b = boston(), boston()
    direct.saturate(a, "Boston")
    direct.saturate(b, "Boston")
    assert dumps(provenance_document(a, "Boston")) == dumps(provenance_document(b, "Boston"))


def test_round_trip_generated_ledgers():
    rng = random.Random(21)
    for _ in range(100):
        doc = safe_ground_document(rng)
        s = TheoryStore()
        load_document(s, doc)
        for th in doc.theories:
            direct.saturate(s, th.name, budget=direct.ProofBudget(max_steps=2000))
            exported = json.loads(dumps(provenance_document(s, th.name)))
            s2 = TheoryStore()
            import_provenance(s2, exported)
            assert provenance_document(s2, th.name) == exported
