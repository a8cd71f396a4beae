"""Cartan matrix, Smith normal form, and derived invariant tests."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_dissections, small_range
from mcw.algebra import quiver, quiver_of
from mcw.geometry import dissection
from mcw.homology import (
    DerivedInvariant,
    HomologyError,
    IntMatrix,
    bh_diagonal,
    cartan_matrix,
    cycle_parity_counts,
    derived_invariant,
    determinant,
    happel_hom_dims,
    smith_normal_form,
    snf_diagonal,
)


def brute_force_cartan(q):
    """Count relation-free paths by plain breadth-first enumeration."""

    n = q.vertex_count
    counts = [[0] * n for _ in range(n)]
    for start in range(n):
        frontier = [(start, None)]
        while frontier:
            nxt = []
            for vertex, last in frontier:
                counts[start][vertex] += 1
                for a in q.arrows:
                    if a.source != vertex:
                        continue
                    if last is not None and (last, a.id) in q.relations:
                        continue
                    nxt.append((a.target, a.id))
            if len(nxt) > 4 * len(q.arrows) * n + 4:
                raise AssertionError("unbounded path count")
            frontier = nxt
    return IntMatrix(tuple(tuple(row) for row in counts))


def test_cartan_a2():
    q = quiver_of(dissection(2, 1, [(0, 2), (0, 3)]))
    assert cartan_matrix(q).rows == ((1, 1), (0, 1))


def test_cartan_chain_with_relation():
    q = quiver(2, 3, [(0, 1), (1, 2)], [(0, 1)])
    assert cartan_matrix(q).rows == ((1, 1, 0), (0, 1, 1), (0, 0, 1))


def test_cartan_chain_without_relation():
    q = quiver(2, 3, [(0, 1), (1, 2)])
    assert cartan_matrix(q).rows == ((1, 1, 1), (0, 1, 1), (0, 0, 1))


def test_cartan_triangle_cycle():
    q = quiver_of(dissection(3, 1, [(0, 2), (2, 4), (0, 4)]))
    c = cartan_matrix(q)
    assert all(c[i, i] == 1 for i in range(3))
    assert determinant(c) == 2
    assert snf_diagonal(c) == (1, 1, 2)


def test_cartan_four_cycle():
    q = quiver_of(dissection(4, 2, [(0, 3), (3, 6), (6, 9), (0, 9)]))
    c = cartan_matrix(q)
    assert determinant(c) == 0
    assert snf_diagonal(c) == (1, 1, 1, 0)


def test_cartan_rejects_relation_free_cycle():
    loop = quiver(1, 3, [(0, 1), (1, 2), (2, 0)])
    with pytest.raises(HomologyError):
        cartan_matrix(loop)


def test_cartan_matches_brute_force_on_range():
    for n, m in small_range(5, 3):
        for t in all_dissections(n, m)[:25]:
            q = quiver_of(t)
            assert cartan_matrix(q) == brute_force_cartan(q)


def test_cartan_entries_are_zero_or_one_on_range():
    for n, m in small_range(5, 3):
        for t in all_dissections(n, m)[:25]:
            c = cartan_matrix(quiver_of(t))
            assert all(x in (0, 1) for row in c.rows for x in row)


square = st.integers(1, 5).flatmap(
    lambda n: st.lists(
        st.lists(st.integers(-9, 9), min_size=n, max_size=n),
        min_size=n,
        max_size=n,
    )
)


@settings(max_examples=120, deadline=None)
@given(square)
def test_snf_transforms_and_divisibility(rows):
    m = IntMatrix(tuple(tuple(r) for r in rows))
    res = smith_normal_form(m)
    assert res.u @ m @ res.v == res.d
    assert abs(determinant(res.u)) == 1
    assert abs(determinant(res.v)) == 1
    diag = res.diagonal
    assert all(x >= 0 for x in diag)
    for a, b in zip(diag, diag[1:]):
        if a == 0:
            assert b == 0
        else:
            assert b % a == 0
    # off-diagonal must vanish
    assert all(
        res.d[i, j] == 0
        for i in range(m.size)
        for j in range(m.size)
        if i != j
    )


@settings(max_examples=80, deadline=None)
@given(square)
def test_snf_agrees_with_sympy(rows):
    sympy = pytest.importorskip("sympy")
    from sympy.matrices.normalforms import smith_normal_form as sympy_snf

    m = IntMatrix(tuple(tuple(r) for r in rows))
    ours = sorted(abs(x) for x in snf_diagonal(m))
    theirs = sympy_snf(sympy.Matrix(rows))
    reference = sorted(abs(int(theirs[i, i])) for i in range(theirs.rows))
    assert ours == reference


def test_determinant_small_cases():
    assert determinant(IntMatrix(((2,),))) == 2
    assert determinant(IntMatrix(((1, 2), (3, 4)))) == -2
    assert determinant(IntMatrix.identity(4)) == 1
    assert determinant(IntMatrix.diagonal((3, 0, 5))) == 0


def test_bh_diagonal_examples():
    triangle = quiver_of(dissection(3, 1, [(0, 2), (2, 4), (0, 4)]))
    assert cycle_parity_counts(triangle) == (1, 0)
    assert bh_diagonal(triangle).rows == IntMatrix.diagonal((2, 1, 1)).rows

    square_cycle = quiver_of(dissection(4, 2, [(0, 3), (3, 6), (6, 9), (0, 9)]))
    assert cycle_parity_counts(square_cycle) == (0, 1)
    assert bh_diagonal(square_cycle).rows == IntMatrix.diagonal((0, 1, 1, 1)).rows


def test_bh_matches_cartan_on_range():
    for n, m in small_range(5, 3):
        for t in all_dissections(n, m)[:20]:
            q = quiver_of(t)
            assert snf_diagonal(cartan_matrix(q)) == snf_diagonal(bh_diagonal(q))


def test_derived_invariant_equality_is_s_r():
    a = DerivedInvariant(s=3, r=1, snf=(1, 1, 2), cycle_parity_counts=(1, 0))
    b = DerivedInvariant(s=3, r=1, snf=(1, 1, 0), cycle_parity_counts=(0, 1))
    c = DerivedInvariant(s=3, r=0, snf=(1, 1, 1))
    assert a == b and hash(a) == hash(b)
    assert a != c
    assert a != "not an invariant"


def test_derived_invariant_of_quivers():
    inv = derived_invariant(quiver_of(dissection(3, 1, [(0, 2), (2, 4), (0, 4)])))
    assert (inv.s, inv.r) == (3, 1)
    assert inv.snf == (1, 1, 2)
    assert inv.cycle_parity_counts == (1, 0)

    lin = derived_invariant(quiver(2, 3, [(0, 1), (1, 2)], [(0, 1)]))
    assert (lin.s, lin.r) == (3, 0)
    assert lin.snf == (1, 1, 1)


def test_happel_stalk_complexes_reproduce_cartan():
    q = quiver_of(dissection(3, 2, [(0, 3), (3, 6), (6, 9)]))
    c = cartan_matrix(q)
    stalks = [{0: [i]} for i in range(q.vertex_count)]
    assert happel_hom_dims(stalks, c) == c


def test_happel_two_term_complex_a2():
    c = IntMatrix(((1, 1), (0, 1)))
    complexes = [{0: [0]}, {0: [0], 1: [1]}]
    assert happel_hom_dims(complexes, c).rows == ((1, 0), (1, 1))


def test_intmatrix_rejects_ragged():
    with pytest.raises(HomologyError):
        IntMatrix(((1, 2), (3,)))
