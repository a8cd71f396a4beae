"""Cartan matrices and their invariants.

The Cartan matrix of a bound quiver counts relation-free paths between
vertices.  Its Smith normal form, together with the vertex count and the
number of fully-relational cycles, is what the rest of the package uses to
recognise derived equivalence.  The normal form is computed over the
integers with explicit unimodular transforms so callers can audit
``u @ m @ v == d`` directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import QuiverWithRelations, full_relation_cycles


class HomologyError(ValueError):
    """Raised for malformed matrices or quivers outside the supported shape."""


@dataclass(frozen=True)
class IntMatrix:
    """A square integer matrix stored as a tuple of row tuples."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(x) for x in row) for row in self.rows)
        n = len(rows)
        if any(len(row) != n for row in rows):
            raise HomologyError("matrix must be square")
        object.__setattr__(self, "rows", rows)

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.size != other.size:
            raise HomologyError("size mismatch in matrix product")
        n = self.size
        return IntMatrix(
            tuple(
                tuple(
                    sum(self.rows[i][k] * other.rows[k][j] for k in range(n))
                    for j in range(n)
                )
                for i in range(n)
            )
        )

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows))) if self.rows else IntMatrix(())

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @staticmethod
    def diagonal(entries: Sequence[int]) -> "IntMatrix":
        n = len(entries)
        return IntMatrix(
            tuple(
                tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n)
            )
        )


def determinant(m: IntMatrix) -> int:
    """Exact integer determinant (fraction-free row reduction)."""

    n = m.size
    if n == 0:
        return 1
    a = [[Fraction(x) for x in row] for row in m.rows]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            return 0
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            factor = a[r][col] / a[col][col]
            a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    assert det.denominator == 1
    return int(det)


def cartan_matrix(q: QuiverWithRelations) -> IntMatrix:
    """Count relation-free paths between vertices.

    Entry (i, j) is the number of paths from vertex i to vertex j that do
    not pass through any relation, including the length-zero path when
    i == j.  Quivers with a relation-free cycle have no finite count and
    are reported as an error; the depth guard is one more than the number
    of arrows, which no repetition-free path can exceed.
    """

    n = q.vertex_count
    cap = len(q.arrows) + 1
    forbidden = q.relations
    counts = [[0] * n for _ in range(n)]

    def walk(start: int, vertex: int, last_arrow: int | None, depth: int) -> None:
        if depth > cap:
            raise HomologyError(
                "relation-free cycle detected while counting paths"
            )
        counts[start][vertex] += 1
        for a in q.out_arrows.get(vertex, ()):
            if last_arrow is not None and (last_arrow, a.id) in forbidden:
                continue
            walk(start, a.target, a.id, depth + 1)

    for v in range(n):
        walk(v, v, None, 0)
    return IntMatrix(tuple(tuple(row) for row in counts))


@dataclass(frozen=True)
class SmithNormalForm:
    """Diagonal form ``d`` with unimodular ``u``, ``v`` so u @ m @ v == d."""

    d: IntMatrix
    u: IntMatrix
    v: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.d.rows[i][i] for i in range(self.d.size))


def smith_normal_form(m: IntMatrix) -> SmithNormalForm:
    """Smith normal form over the integers.

    Classic elimination: repeatedly move the smallest nonzero entry of the
    working block to the pivot, clear its row and column with integer row
    and column operations, and fix up divisibility afterwards.  All row
    operations are mirrored on ``u`` and all column operations on ``v``.
    """

    n = m.size
    a = [list(row) for row in m.rows]
    u = [list(row) for row in IntMatrix.identity(n).rows]
    v = [list(row) for row in IntMatrix.identity(n).rows]

    def swap_rows(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst: int, src: int, k: int) -> None:
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst: int, src: int, k: int) -> None:
        for row in a:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    def negate_row(i: int) -> None:
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    for t in range(n):
        while True:
            entries = [
                (abs(a[i][j]), i, j)
                for i in range(t, n)
                for j in range(t, n)
                if a[i][j]
            ]
            if not entries:
                break
            _, pi, pj = min(entries)
            swap_rows(t, pi)
            swap_cols(t, pj)
            for i in range(t + 1, n):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
            if all(a[i][t] == 0 for i in range(t + 1, n)) and all(
                a[t][j] == 0 for j in range(t + 1, n)
            ):
                break
        if a[t][t] < 0:
            negate_row(t)

    # Enforce the divisibility chain d[t] | d[t+1].
    changed = True
    while changed:
        changed = False
        for t in range(n - 1):
            x, y = a[t][t], a[t + 1][t + 1]
            if x and y % x == 0:
                continue
            if x == 0 and y != 0:
                swap_rows(t, t + 1)
                swap_cols(t, t + 1)
                changed = True
                continue
            if x == 0:
                continue
            # Fold entry t+1 into the pivot block and re-run elimination
            # on the 2x2 corner: gcd lands at (t, t), lcm at (t+1, t+1).
            add_row(t, t + 1, 1)
            while a[t][t + 1] or a[t + 1][t]:
                if a[t][t] == 0 or (a[t][t + 1] and abs(a[t][t + 1]) < abs(a[t][t])):
                    swap_cols(t, t + 1)
                if a[t][t + 1]:
                    add_col(t + 1, t, -(a[t][t + 1] // a[t][t]))
                if a[t + 1][t]:
                    add_row(t + 1, t, -(a[t + 1][t] // a[t][t]))
            if a[t][t] < 0:
                negate_row(t)
            if a[t + 1][t + 1] < 0:
                negate_row(t + 1)
            changed = True

    d = IntMatrix(tuple(tuple(row) for row in a))
    u_m = IntMatrix(tuple(tuple(row) for row in u))
    v_m = IntMatrix(tuple(tuple(row) for row in v))
    if u_m @ m @ v_m != d:
        raise HomologyError("transform bookkeeping broke: u @ m @ v != d")
    return SmithNormalForm(d=d, u=u_m, v=v_m)


def snf_diagonal(m: IntMatrix) -> tuple[int, ...]:
    return smith_normal_form(m).diagonal


def cycle_parity_counts(q: QuiverWithRelations) -> tuple[int, int]:
    """(odd, even) counts of fully-relational cycle lengths."""

    odd = even = 0
    for cyc in full_relation_cycles(q).cycles:
        if not cyc.full_relations:
            continue
        if len(cyc) % 2:
            odd += 1
        else:
            even += 1
    return odd, even


def bh_diagonal(q: QuiverWithRelations) -> IntMatrix:
    """Diagonal matrix predicted by the cycle parities of a gentle quiver.

    One 2 per odd fully-relational cycle, one 0 per even one, and 1 in the
    remaining slots.  Its Smith normal form must agree with the Cartan
    matrix's.
    """

    odd, even = cycle_parity_counts(q)
    rest = q.vertex_count - odd - even
    if rest < 0:
        raise HomologyError("more cycles than vertices")
    return IntMatrix.diagonal([2] * odd + [0] * even + [1] * rest)


@dataclass(frozen=True, eq=False)
class DerivedInvariant:
    """Vertex count and cycle count, with corroborating Cartan data.

    Equality deliberately compares only (s, r): the Smith normal form and
    the parity counts are determined by them for the algebras this package
    produces, and carrying them as data lets the consistency be asserted
    rather than assumed.
    """

    s: int
    r: int
    snf: tuple[int, ...]
    cycle_parity_counts: tuple[int, int] = field(default=(0, 0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DerivedInvariant):
            return NotImplemented
        return (self.s, self.r) == (other.s, other.r)

    def __hash__(self) -> int:
        return hash((self.s, self.r))


def derived_invariant(q: QuiverWithRelations) -> DerivedInvariant:
    odd, even = cycle_parity_counts(q)
    return DerivedInvariant(
        s=q.vertex_count,
        r=odd + even,
        snf=snf_diagonal(cartan_matrix(q)),
        cycle_parity_counts=(odd, even),
    )


Complex = Mapping[int, Sequence[int]]


def happel_hom_dims(complexes: Sequence[Complex], cartan: IntMatrix) -> IntMatrix:
    """Euler-form prediction for the Cartan matrix of a tilting complex.

    Each complex is a map from cohomological degree to the multiset of
    vertices whose projectives appear there.  Entry (i, j) is the
    alternating sum over degree pairs of relation-free path counts, one
    term per (summand of complex i, summand of complex j) pair.
    """

    n = len(complexes)
    out = [[0] * n for _ in range(n)]
    for i, ti in enumerate(complexes):
        for j, tj in enumerate(complexes):
            total = 0
            for r, us in ti.items():
                for s, vs in tj.items():
                    sign = -1 if (r - s) % 2 else 1
                    total += sign * sum(
                        cartan[u, v] for u in us for v in vs
                    )
            out[i][j] = total
    return IntMatrix(tuple(tuple(row) for row in out))
