"""Round-trip and validation tests for the JSON views."""

from __future__ import annotations

import pytest

from conftest import all_dissections
from mcw.algebra import AlgebraError, quiver, quiver_of
from mcw.geometry import dissection
from mcw.homology import cartan_matrix, derived_invariant
from mcw.mutation import record_move, tilting_mutation_plus
from mcw.normalform import reduce
from mcw.serialize import (
    SerializeError,
    dissection_from_json,
    dissection_to_json,
    dumps,
    invariant_from_json,
    invariant_to_json,
    matrix_from_json,
    matrix_to_json,
    move_from_json,
    move_to_json,
    quiver_from_json,
    quiver_to_json,
    trace_from_json,
    trace_to_json,
)


def test_dumps_is_key_sorted():
    assert dumps({"b": 1, "a": [2, 3]}) == '{"a": [2, 3], "b": 1}'


def test_dissection_round_trip_exhaustive():
    for t in all_dissections(3, 2):
        assert dissection_from_json(dissection_to_json(t)) == t


def test_quiver_round_trip_exhaustive():
    for t in all_dissections(3, 2):
        q = quiver_of(t)
        back = quiver_from_json(quiver_to_json(q))
        assert back == q
        assert back.relation_triples() == q.relation_triples()


def test_matrix_round_trip():
    mat = cartan_matrix(quiver_of(dissection(3, 1, [(0, 2), (2, 4), (0, 4)])))
    assert matrix_from_json(matrix_to_json(mat)) == mat


def test_invariant_round_trip_keeps_all_fields():
    inv = derived_invariant(quiver_of(dissection(3, 1, [(0, 2), (2, 4), (0, 4)])))
    back = invariant_from_json(invariant_to_json(inv))
    assert (back.s, back.r, back.snf, back.cycle_parity_counts) == (
        inv.s,
        inv.r,
        inv.snf,
        inv.cycle_parity_counts,
    )


def test_move_record_round_trip():
    q = quiver_of(dissection(2, 1, [(0, 2), (0, 3)]))
    rec = record_move("plus", (0,), q, tilting_mutation_plus(q, 0))
    back = move_from_json(move_to_json(rec))
    assert back == rec


def test_trace_round_trip():
    trace = reduce(dissection(3, 1, [(0, 2), (2, 5), (3, 5)]), 0)
    assert trace.steps, "fixture should need at least one move"
    assert trace_from_json(trace_to_json(trace)) == trace


def test_shape_errors():
    with pytest.raises(SerializeError, match="missing keys"):
        dissection_from_json({"n": 2, "m": 1})
    with pytest.raises(SerializeError, match="JSON object"):
        quiver_from_json([1, 2, 3])
    with pytest.raises(SerializeError, match="integer pairs"):
        dissection_from_json({"n": 2, "m": 1, "diagonals": [[0, 2, 4]]})
    with pytest.raises(SerializeError, match="does not match"):
        matrix_from_json({"size": 3, "rows": [[1, 0], [0, 1]]})
    with pytest.raises(SerializeError, match="square"):
        matrix_from_json({"size": 2, "rows": [[1, 0], [0]]})


def test_semantic_errors_come_from_the_constructors():
    # Shape is fine but the content is not; the domain validation runs.
    with pytest.raises(AlgebraError):
        quiver_from_json(
            {"m": 1, "vertices": 2, "arrows": [[0, 1]], "relations": [[0, 5]]}
        )


def test_quiver_relation_indices_survive_unsorted_input():
    # Arrows written out of id order still land on the same relations.
    q = quiver(1, 3, [(1, 2), (0, 1)], [(1, 0)])
    back = quiver_from_json(quiver_to_json(q))
    assert back.relation_triples() == q.relation_triples() == {(0, 1, 2)}
