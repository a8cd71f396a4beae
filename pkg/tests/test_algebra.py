"""Quiver-layer tests: construction from dissections, gentleness, components,
cycles, relation chains, isomorphism, canonical forms."""

from __future__ import annotations

import pytest

from conftest import all_dissections, small_range
from mcw.algebra import (
    AlgebraError,
    canonical_form,
    canonical_key,
    components,
    full_relation_cycles,
    is_gentle,
    iso_quivers,
    max_relation_chain,
    opposite,
    quiver,
    quiver_of,
)
from mcw.geometry import diagonal, dissection


def test_pentagon_fan_is_a2():
    q = quiver_of(dissection(2, 1, [(0, 2), (0, 3)]))
    # vertex order follows sorted diagonals: 0 = d(0,2), 1 = d(0,3)
    assert q.vertex_count == 2
    assert q.arrow_pairs() == {(0, 1)}
    assert q.relations == frozenset()


def test_ten_gon_chain_with_one_relation():
    q = quiver_of(dissection(3, 2, [(0, 3), (3, 6), (6, 9)]))
    # vertices: 0 = d(0,3), 1 = d(3,6), 2 = d(6,9); arrows run clockwise
    assert q.arrow_pairs() == {(2, 1), (1, 0)}
    assert q.relation_triples() == {(2, 1, 0)}


def test_twelve_gon_inner_quadrilateral_full_cycle():
    q = quiver_of(dissection(4, 2, [(0, 3), (3, 6), (6, 9), (0, 9)]))
    # vertices: 0 = d(0,3), 1 = d(0,9), 2 = d(3,6), 3 = d(6,9)
    assert q.arrow_pairs() == {(1, 3), (3, 2), (2, 0), (0, 1)}
    report = full_relation_cycles(q)
    assert len(report.cycles) == 1
    cyc = report.cycles[0]
    assert len(cyc) == 4 and cyc.full_relations
    assert report.full_count == 1


def test_hexagon_triangle_full_relations():
    q = quiver_of(dissection(3, 1, [(0, 2), (2, 4), (0, 4)]))
    report = full_relation_cycles(q)
    assert [len(c) for c in report.cycles] == [3]
    assert report.cycles[0].full_relations
    assert len(q.relations) == 3


def test_tree_quiver_has_no_cycles():
    q = quiver(1, 3, [(0, 1), (2, 1)])
    assert full_relation_cycles(q).cycles == ()


def test_gentle_spec_cases():
    assert is_gentle(quiver(1, 2, [(0, 1)])).ok
    three_out = quiver(1, 4, [(0, 1), (0, 2), (0, 3)])
    rep = is_gentle(three_out)
    assert not rep.ok and "out-arrows" in rep.problem
    two_free = quiver(1, 3, [(0, 1), (1, 2), (1, 0)])
    assert not is_gentle(two_free).ok


def test_gentle_on_sampled_dissections():
    for n, m in small_range(5, 3):
        for t in all_dissections(n, m)[:30]:
            q = quiver_of(t)
            assert is_gentle(q).ok, t


def test_components_spec_example():
    t = dissection(3, 2, [(0, 3), (5, 8)])
    q = quiver_of(t)
    comps = components(q)
    assert len(comps) == 2
    assert all(c.quiver.arrows == () for c in comps)
    assert [c.vertices for c in comps] == [(0,), (1,)]


def test_components_partition_and_labels():
    for n, m in small_range(5, 3):
        for t in all_dissections(n, m)[:20]:
            q = quiver_of(t)
            comps = components(q)
            all_verts = sorted(v for c in comps for v in c.vertices)
            assert all_verts == list(range(q.vertex_count))
            assert sum(len(c.quiver.arrows) for c in comps) == len(q.arrows)
            assert sum(len(c.quiver.relations) for c in comps) == len(q.relations)
            for c in comps:
                assert c.quiver.vertex_labels == tuple(
                    q.vertex_labels[v] for v in c.vertices
                )


def test_max_relation_chain_cases():
    chain = quiver_of(dissection(3, 2, [(0, 3), (3, 6), (6, 9)]))
    assert max_relation_chain(chain) == 1
    free = quiver_of(dissection(3, 2, [(0, 3), (0, 5), (0, 7)]))
    assert max_relation_chain(free) == 0
    # relations on a full cycle do not count
    cycle = quiver_of(dissection(4, 2, [(0, 3), (3, 6), (6, 9), (0, 9)]))
    assert max_relation_chain(cycle) == 0


def test_chain_bound_on_sampled_range():
    for n, m in small_range(5, 3):
        for t in all_dissections(n, m)[:30]:
            assert max_relation_chain(quiver_of(t)) <= m - 1


def test_iso_identity_and_relabeling():
    q = quiver_of(dissection(3, 2, [(0, 3), (3, 6), (6, 9)]))
    assert iso_quivers(q, q) == (0, 1, 2)
    # image of q under 2 -> 0, 1 -> 2, 0 -> 1
    relabeled = quiver(2, 3, [(0, 2), (2, 1)], [(0, 1)])
    found = iso_quivers(q, relabeled)
    assert found is not None
    # the mapping transports arrows and relations
    pairs = {(found[s], found[t]) for s, t in q.arrow_pairs()}
    assert pairs == relabeled.arrow_pairs()


def test_iso_distinguishes_relation_sets():
    with_rel = quiver(2, 3, [(0, 1), (1, 2)], [(0, 1)])
    without = quiver(2, 3, [(0, 1), (1, 2)])
    assert iso_quivers(with_rel, without) is None


def test_two_a3_presentations_are_not_isomorphic():
    chain = quiver_of(dissection(3, 2, [(0, 3), (3, 6), (6, 9)]))
    fan = quiver_of(dissection(3, 2, [(0, 3), (0, 5), (0, 7)]))
    assert chain.arrow_pairs() != fan.arrow_pairs()  # orientations differ
    stripped_chain = quiver(2, 3, list(chain.arrow_pairs()))
    stripped_fan = quiver(2, 3, list(fan.arrow_pairs()))
    assert iso_quivers(stripped_chain, stripped_fan) is not None
    assert iso_quivers(chain, fan) is None


def test_m1_relations_determined_by_quiver():
    for n in (2, 3, 4):
        groups: dict[tuple, list] = {}
        for t in all_dissections(n, 1):
            q = quiver_of(t)
            stripped = quiver(1, q.vertex_count, list(q.arrow_pairs()))
            groups.setdefault(canonical_key(stripped), []).append(q)
        for qs in groups.values():
            for a, b in zip(qs, qs[1:]):
                assert iso_quivers(a, b) is not None


def test_m2_counterexample_exists():
    pairs_seen: dict[tuple, list] = {}
    for t in all_dissections(3, 2):
        q = quiver_of(t)
        stripped = quiver(2, q.vertex_count, list(q.arrow_pairs()))
        pairs_seen.setdefault(canonical_key(stripped), []).append(q)
    assert any(
        iso_quivers(a, b) is None
        for qs in pairs_seen.values()
        for a, b in zip(qs, qs[1:])
    )


def test_quiver_invariant_under_polygon_rotation():
    for n, m in [(2, 1), (2, 2), (3, 2), (2, 3)]:
        N = (n + 1) * m + 2
        for t in all_dissections(n, m)[:15]:
            rotated = dissection(
                n, m, [((d.a + m) % N, (d.b + m) % N) for d in t.diagonals]
            )
            assert iso_quivers(quiver_of(t), quiver_of(rotated)) is not None


def test_arrow_count_matches_corner_incidences():
    from mcw.geometry import faces

    for n, m in small_range(5, 3):
        for t in all_dissections(n, m)[:25]:
            q = quiver_of(t)
            incidences = 0
            for f in faces(t):
                k = len(f.side_diagonals)
                for j in range(k):
                    if (
                        f.side_diagonals[j - 1] is not None
                        and f.side_diagonals[j] is not None
                    ):
                        incidences += 1
            assert len(q.arrows) == incidences


def test_canonical_key_agrees_with_iso():
    qs = [quiver_of(t) for t in all_dissections(3, 2)[:40]]
    for i, a in enumerate(qs):
        for b in qs[i + 1 : i + 6]:
            same_key = canonical_key(a) == canonical_key(b)
            assert same_key == (iso_quivers(a, b) is not None)


def test_canonical_form_witness_is_a_relabeling():
    q = quiver_of(dissection(4, 2, [(0, 3), (3, 6), (6, 9), (0, 9)]))
    key, perm = canonical_form(q)
    assert sorted(perm) == list(range(q.vertex_count))
    relabeled_pairs = tuple(sorted((perm[s], perm[t]) for s, t in q.arrow_pairs()))
    assert key[1] == relabeled_pairs


def test_opposite_involution():
    q = quiver_of(dissection(3, 2, [(0, 3), (3, 6), (6, 9)]))
    assert opposite(opposite(q)) == q
    assert opposite(q).arrow_pairs() == {(1, 2), (0, 1)}


def test_constructor_rejects_malformed():
    with pytest.raises(AlgebraError):
        quiver(1, 2, [(0, 0)])  # loop
    with pytest.raises(AlgebraError):
        quiver(1, 2, [(0, 1), (0, 1)])  # parallel
    with pytest.raises(AlgebraError):
        quiver(1, 3, [(0, 1), (2, 1)], [(0, 1)])  # not composable
    with pytest.raises(AlgebraError):
        quiver(1, 2, [(0, 3)])  # vertex out of range
