"""JSON provenance export and import.

Document layout (keys always in this order)::

    {
      "theory": "<name>",
      "assertions": [{"id", "prop", "source", "cause"}],
      "rules": [{"id", "premises", "conclusion"}],
      "derivations": [{"id", "conclusion", "rule", "premises", "depth",
                       "hypotheses", "ref"}],
      "arguments": [{"id", "target", "target_kind", "polarity", "support",
                     "author"}]
    }

Propositions are written in the s-expression surface syntax.  ``cause``
is ``[plan id, trigger assertion id]`` for planner-made assertions and
``null`` otherwise.  Plans and probability constraints belong to the KB
text format, not to the provenance ledger.
"""

from __future__ import annotations

import json
import os

from .props import Proposition, format_prop
from .syntax import parse_prop
from .theory import Derivation

__all__ = ["provenance_document", "export_provenance", "import_provenance", "dumps"]


def provenance_document(store, theory: str) -> dict:
    t = store.theory(theory)
    snap = t.snapshot()
    return {
        "theory": t.name,
        "assertions": [
            {
                "id": a.id,
                "prop": format_prop(a.prop),
                "source": a.source,
                "cause": list(a.cause) if a.cause is not None else None,
            }
            for a in snap.assertions
        ],
        "rules": [
            {
                "id": r.id,
                "premises": [format_prop(p) for p in r.premises],
                "conclusion": format_prop(r.conclusion),
            }
            for r in snap.rules
        ],
        "derivations": [
            {
                "id": d.id,
                "conclusion": format_prop(d.conclusion),
                "rule": d.rule,
                "premises": list(d.premises),
                "depth": d.depth,
                "hypotheses": [format_prop(h) for h in d.hypotheses],
                "ref": d.ref,
            }
            for d in t.derivations
        ],
        "arguments": [
            {
                "id": a.id,
                "target": format_prop(a.target) if isinstance(a.target, Proposition) else a.target,
                "target_kind": "proposition" if isinstance(a.target, Proposition) else "argument",
                "polarity": a.polarity,
                "support": a.support,
                "author": a.author,
            }
            for a in t.arguments.values()
        ],
    }


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def export_provenance(store, theory: str, path) -> int:
    """Write the theory's ledger as JSON; returns the number of bytes written.

    Raises :class:`OSError` naming ``path`` when the file cannot be written.
    """
    data = dumps(provenance_document(store, theory)).encode("utf-8")
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as e:
        raise OSError(e.errno, f"cannot write provenance export: {e.strerror}", os.fspath(path)) from None
    return len(data)


def import_provenance(store, source, name: str | None = None) -> str:
    """Rebuild a theory from an exported ledger (a dict or a JSON file path).

    Assertion, rule, derivation and argument ids are kept as exported.
    """
    if isinstance(source, dict):
        doc = source
    else:
        try:
            with open(source, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as e:
            raise OSError(e.errno, f"cannot read provenance export: {e.strerror}", os.fspath(source)) from None
    name = name or doc["theory"]
    store.create_theory(name)
    for a in doc["assertions"]:
        cause = tuple(a["cause"]) if a.get("cause") is not None else None
        store.assert_prop(name, parse_prop(a["prop"]), a["source"], cause, item_id=a["id"])
    for r in doc["rules"]:
        store.add_rule(
            name, [parse_prop(p) for p in r["premises"]], parse_prop(r["conclusion"]), item_id=r["id"]
        )
    t = store.theory(name)
    for d in doc["derivations"]:
        t._add_derivation(
            Derivation(
                d["id"],
                parse_prop(d["conclusion"]),
                d["rule"],
                tuple(d["premises"]),
                name,
                d["depth"],
                tuple(parse_prop(h) for h in d.get("hypotheses", ())),
                d.get("ref"),
            )
        )
    for g in doc["arguments"]:
        target = g["target"] if g["target_kind"] == "argument" else parse_prop(g["target"])
        store.argue(name, target, g["polarity"], g["support"], g["author"], arg_id=g["id"])
    return name
