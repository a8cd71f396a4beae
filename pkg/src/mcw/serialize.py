"""JSON views of the package's value types.

Formats are flat and order-stable: arrows are listed in id order, relation
pairs and diagonals sorted, and every loader goes through the ordinary
constructors so a hand-edited file gets the same validation as code.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from .algebra import QuiverWithRelations, quiver
from .geometry import Dissection, dissection
from .homology import DerivedInvariant, IntMatrix
from .mutation import MoveRecord
from .normalform import ReductionTrace


class SerializeError(ValueError):
    """A JSON document does not match the expected shape."""


def dumps(payload: Mapping[str, Any]) -> str:
    """One stable text form: sorted keys, no trailing spaces."""

    return json.dumps(payload, sort_keys=True, separators=(", ", ": "))


def _require(obj: Any, *keys: str) -> None:
    if not isinstance(obj, Mapping):
        raise SerializeError(f"expected a JSON object, got {type(obj).__name__}")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise SerializeError(f"missing keys: {', '.join(missing)}")


def _int_pairs(value: Any, what: str) -> list[tuple[int, int]]:
    try:
        pairs = [(int(a), int(b)) for a, b in value]
    except (TypeError, ValueError) as exc:
        raise SerializeError(f"{what} must be a list of integer pairs") from exc
    return pairs


def dissection_to_json(t: Dissection) -> dict[str, Any]:
    return {
        "n": t.params.n,
        "m": t.params.m,
        "diagonals": [[d.a, d.b] for d in t.diagonals],
    }


def dissection_from_json(obj: Any) -> Dissection:
    _require(obj, "n", "m", "diagonals")
    return dissection(
        int(obj["n"]), int(obj["m"]), _int_pairs(obj["diagonals"], "diagonals")
    )


def quiver_to_json(q: QuiverWithRelations) -> dict[str, Any]:
    return {
        "m": q.m,
        "vertices": q.vertex_count,
        "arrows": [[a.source, a.target] for a in q.arrows],
        "relations": sorted([i, j] for i, j in q.relations),
    }


def quiver_from_json(obj: Any) -> QuiverWithRelations:
    _require(obj, "m", "vertices", "arrows", "relations")
    # Arrows are serialized in id order, which is the constructor's
    # normalized order, so relation indices survive the round trip.
    return quiver(
        int(obj["m"]),
        int(obj["vertices"]),
        _int_pairs(obj["arrows"], "arrows"),
        _int_pairs(obj["relations"], "relations"),
    )


def matrix_to_json(mat: IntMatrix) -> dict[str, Any]:
    return {"size": mat.size, "rows": [list(row) for row in mat.rows]}


def matrix_from_json(obj: Any) -> IntMatrix:
    _require(obj, "size", "rows")
    try:
        mat = IntMatrix(tuple(tuple(int(x) for x in row) for row in obj["rows"]))
    except (TypeError, ValueError) as exc:
        raise SerializeError("rows must be a square list of integer lists") from exc
    if mat.size != int(obj["size"]):
        raise SerializeError(f"size {obj['size']} does not match {mat.size} rows")
    return mat


def invariant_to_json(inv: DerivedInvariant) -> dict[str, Any]:
    return {
        "s": inv.s,
        "r": inv.r,
        "snf": list(inv.snf),
        "parity": list(inv.cycle_parity_counts),
    }


def invariant_from_json(obj: Any) -> DerivedInvariant:
    _require(obj, "s", "r", "snf", "parity")
    odd, even = (int(x) for x in obj["parity"])
    return DerivedInvariant(
        int(obj["s"]),
        int(obj["r"]),
        tuple(int(x) for x in obj["snf"]),
        (odd, even),
    )


def move_to_json(rec: MoveRecord) -> dict[str, Any]:
    return {
        "kind": rec.kind,
        "site": list(rec.site),
        "before": invariant_to_json(rec.invariant_before),
        "after": invariant_to_json(rec.invariant_after),
    }


def move_from_json(obj: Any) -> MoveRecord:
    _require(obj, "kind", "site", "before", "after")
    return MoveRecord(
        str(obj["kind"]),
        tuple(int(v) for v in obj["site"]),
        invariant_from_json(obj["before"]),
        invariant_from_json(obj["after"]),
    )


def trace_to_json(trace: ReductionTrace) -> dict[str, Any]:
    return {
        "steps": [move_to_json(rec) for rec in trace.steps],
        "final": quiver_to_json(trace.final),
        "iso": list(trace.iso_witness),
    }


def trace_from_json(obj: Any) -> ReductionTrace:
    _require(obj, "steps", "final", "iso")
    return ReductionTrace(
        tuple(move_from_json(rec) for rec in obj["steps"]),
        quiver_from_json(obj["final"]),
        tuple(int(v) for v in obj["iso"]),
    )
