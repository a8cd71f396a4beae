"""Quivers with relations: construction from a dissection, gentleness
diagnostics, components, oriented-cycle reports, and exact isomorphism.

A quiver value is immutable and normalized: arrow ids are the positions in
the (source, target)-sorted arrow list, so two equal presentations compare
equal and JSON round-trips are exact.  Relations are stored extensionally as
ordered pairs of arrow ids (alpha, beta), meaning the path "alpha then beta"
is zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations, product
from typing import Iterable, NamedTuple

from .geometry import Diagonal, Dissection, faces


class AlgebraError(ValueError):
    """Structurally invalid quiver input."""


class Arrow(NamedTuple):
    id: int
    source: int
    target: int


@dataclass(frozen=True)
class QuiverWithRelations:
    m: int
    vertex_count: int
    arrows: tuple[Arrow, ...]
    relations: frozenset[tuple[int, int]]
    vertex_labels: tuple[Diagonal, ...] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        by_pair = sorted(self.arrows, key=lambda a: (a.source, a.target))
        remap = {a.id: i for i, a in enumerate(by_pair)}
        if len(remap) != len(self.arrows):
            raise AlgebraError("duplicate arrow ids")
        arrows = tuple(Arrow(i, a.source, a.target) for i, a in enumerate(by_pair))
        seen_pairs = set()
        for a in arrows:
            if not (0 <= a.source < self.vertex_count and 0 <= a.target < self.vertex_count):
                raise AlgebraError(f"arrow {a} out of vertex range")
            if a.source == a.target:
                raise AlgebraError(f"loop at vertex {a.source}")
            if (a.source, a.target) in seen_pairs:
                raise AlgebraError(f"parallel arrows {a.source}->{a.target}")
            seen_pairs.add((a.source, a.target))
        for first, second in self.relations:
            if first not in remap or second not in remap:
                raise AlgebraError(
                    f"relation ({first},{second}) references missing arrow"
                )
        relations = frozenset(
            (remap[first], remap[second]) for first, second in self.relations
        )
        lookup = {a.id: a for a in arrows}
        for first, second in relations:
            if lookup[first].target != lookup[second].source:
                raise AlgebraError(f"relation ({first},{second}) is not composable")
        object.__setattr__(self, "arrows", arrows)
        object.__setattr__(self, "relations", relations)

    @cached_property
    def arrow_by_id(self) -> dict[int, Arrow]:
        return {a.id: a for a in self.arrows}

    @cached_property
    def out_arrows(self) -> dict[int, tuple[Arrow, ...]]:
        table: dict[int, list[Arrow]] = {v: [] for v in range(self.vertex_count)}
        for a in self.arrows:
            table[a.source].append(a)
        return {v: tuple(arrs) for v, arrs in table.items()}

    @cached_property
    def in_arrows(self) -> dict[int, tuple[Arrow, ...]]:
        table: dict[int, list[Arrow]] = {v: [] for v in range(self.vertex_count)}
        for a in self.arrows:
            table[a.target].append(a)
        return {v: tuple(arrs) for v, arrs in table.items()}

    def arrow_pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset((a.source, a.target) for a in self.arrows)

    def relation_triples(self) -> frozenset[tuple[int, int, int]]:
        """Relations as (start, middle, end) vertex triples; well-defined
        because there is at most one arrow per ordered vertex pair."""
        look = self.arrow_by_id
        return frozenset(
            (look[f].source, look[f].target, look[s].target)
            for f, s in self.relations
        )

    def __repr__(self) -> str:
        arrs = ", ".join(f"{a.source}->{a.target}" for a in self.arrows)
        return (
            f"Quiver(m={self.m}, V={self.vertex_count}, arrows=[{arrs}], "
            f"relations={sorted(self.relations)})"
        )


def quiver(
    m: int,
    vertex_count: int,
    arrows: Iterable[tuple[int, int]],
    relations: Iterable[tuple[int, int]] = (),
    labels: tuple[Diagonal, ...] | None = None,
) -> QuiverWithRelations:
    """Build a quiver from (source, target) pairs; relations are given as
    index pairs into the arrow list as written here."""
    arrs = tuple(Arrow(i, s, t) for i, (s, t) in enumerate(arrows))
    return QuiverWithRelations(m, vertex_count, arrs, frozenset(relations), labels)


def quiver_of(t: Dissection) -> QuiverWithRelations:
    """The gentle presentation attached to a dissection: one vertex per
    diagonal; one arrow for each corner of each cell where two diagonal sides
    meet (earlier side to later side in the clockwise boundary walk); one
    zero-relation for every composable arrow pair inside a single cell."""
    arrow_ids: dict[tuple[int, int], int] = {}
    arrow_list: list[tuple[int, int]] = []
    relation_list: list[tuple[int, int]] = []

    def arrow_id(s: int, tgt: int) -> int:
        key = (s, tgt)
        if key not in arrow_ids:
            arrow_ids[key] = len(arrow_list)
            arrow_list.append(key)
        return arrow_ids[key]

    for f in faces(t):
        tags = f.side_diagonals
        k = len(tags)
        for i in range(k):
            a, b = tags[i], tags[(i + 1) % k]
            if a is not None and b is not None:
                arrow_id(a, b)
        for i in range(k):
            a, b, c = tags[i], tags[(i + 1) % k], tags[(i + 2) % k]
            if a is not None and b is not None and c is not None:
                relation_list.append((arrow_id(a, b), arrow_id(b, c)))

    return quiver(
        t.params.m,
        len(t.diagonals),
        arrow_list,
        relation_list,
        labels=t.diagonals,
    )


@dataclass(frozen=True)
class GentleReport:
    ok: bool
    problem: str | None = None


def is_gentle(q: QuiverWithRelations) -> GentleReport:
    """Check the gentle conditions: at most two arrows in and out per vertex,
    and per arrow at most one zero and one nonzero continuation on each side.
    Loops, parallel arrows and non-composable relations are already excluded
    by construction."""
    for v in range(q.vertex_count):
        if len(q.out_arrows[v]) > 2:
            return GentleReport(False, f"vertex {v} has more than two out-arrows")
        if len(q.in_arrows[v]) > 2:
            return GentleReport(False, f"vertex {v} has more than two in-arrows")
    for a in q.arrows:
        zero_next = [b for b in q.out_arrows[a.target] if (a.id, b.id) in q.relations]
        free_next = [b for b in q.out_arrows[a.target] if (a.id, b.id) not in q.relations]
        if len(zero_next) > 1:
            return GentleReport(False, f"arrow {a.source}->{a.target} has two zero continuations")
        if len(free_next) > 1:
            return GentleReport(False, f"arrow {a.source}->{a.target} has two nonzero continuations")
        zero_prev = [b for b in q.in_arrows[a.source] if (b.id, a.id) in q.relations]
        free_prev = [b for b in q.in_arrows[a.source] if (b.id, a.id) not in q.relations]
        if len(zero_prev) > 1:
            return GentleReport(False, f"arrow {a.source}->{a.target} has two zero predecessors")
        if len(free_prev) > 1:
            return GentleReport(False, f"arrow {a.source}->{a.target} has two nonzero predecessors")
    return GentleReport(True)


@dataclass(frozen=True)
class Component:
    """A connected component, vertices renumbered 0..k-1; vertices[i] is the
    index of component vertex i in the parent quiver."""

    quiver: QuiverWithRelations
    vertices: tuple[int, ...]


def components(q: QuiverWithRelations) -> list[Component]:
    """Connected components of the underlying undirected graph, ordered by
    smallest parent vertex."""
    parent = list(range(q.vertex_count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in q.arrows:
        ra, rb = find(a.source), find(a.target)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    groups: dict[int, list[int]] = {}
    for v in range(q.vertex_count):
        groups.setdefault(find(v), []).append(v)

    out: list[Component] = []
    for root in sorted(groups):
        verts = sorted(groups[root])
        index = {v: i for i, v in enumerate(verts)}
        arrs = [
            (index[a.source], index[a.target])
            for a in q.arrows
            if a.source in index
        ]
        ids = [a.id for a in q.arrows if a.source in index]
        id_pos = {aid: i for i, aid in enumerate(ids)}
        rels = [
            (id_pos[f], id_pos[s])
            for f, s in q.relations
            if f in id_pos and s in id_pos
        ]
        labels = None
        if q.vertex_labels is not None:
            labels = tuple(q.vertex_labels[v] for v in verts)
        out.append(Component(quiver(q.m, len(verts), arrs, rels, labels), tuple(verts)))
    return out


@dataclass(frozen=True)
class Cycle:
    arrows: tuple[int, ...]
    vertices: tuple[int, ...]
    full_relations: bool

    def __len__(self) -> int:
        return len(self.arrows)


@dataclass(frozen=True)
class CycleReport:
    cycles: tuple[Cycle, ...]

    @property
    def full_count(self) -> int:
        return sum(1 for c in self.cycles if c.full_relations)


def full_relation_cycles(q: QuiverWithRelations) -> CycleReport:
    """All oriented simple cycles, each rooted at its smallest vertex, with a
    flag marking those whose every length-two subpath is a relation."""
    found: list[Cycle] = []

    def dfs(root: int, v: int, path_vertices: list[int], path_arrows: list[int]) -> None:
        for a in q.out_arrows[v]:
            w = a.target
            if w == root and path_arrows:
                cyc_arrows = tuple(path_arrows + [a.id])
                pairs = [
                    (cyc_arrows[i], cyc_arrows[(i + 1) % len(cyc_arrows)])
                    for i in range(len(cyc_arrows))
                ]
                full = all(p in q.relations for p in pairs)
                found.append(Cycle(cyc_arrows, tuple(path_vertices), full))
            elif w > root and w not in path_vertices:
                dfs(root, w, path_vertices + [w], path_arrows + [a.id])

    for root in range(q.vertex_count):
        dfs(root, root, [root], [])
    found.sort(key=lambda c: c.vertices)
    return CycleReport(tuple(found))


def cycle_relation_pairs(q: QuiverWithRelations) -> frozenset[tuple[int, int]]:
    """Relation pairs lying on some full-relation cycle."""
    pairs: set[tuple[int, int]] = set()
    for cyc in full_relation_cycles(q).cycles:
        if cyc.full_relations:
            k = len(cyc.arrows)
            pairs.update(
                (cyc.arrows[i], cyc.arrows[(i + 1) % k]) for i in range(k)
            )
    return frozenset(pairs)


def max_relation_chain(q: QuiverWithRelations) -> int:
    """Length (in relations) of the longest run of consecutive zero-relations
    not lying on a full-relation cycle."""
    excluded = cycle_relation_pairs(q)
    rels = [r for r in q.relations if r not in excluded]
    by_first = {}
    for r in rels:
        by_first.setdefault(r[0], []).append(r)

    best = 0
    lengths: dict[tuple[int, int], int] = {}

    def longest_from(r: tuple[int, int], stack: set) -> int:
        if r in lengths:
            return lengths[r]
        if r in stack:
            raise AlgebraError("relation chain closes a non-full cycle")
        stack.add(r)
        nxt = max(
            (longest_from(s, stack) for s in by_first.get(r[1], [])),
            default=0,
        )
        stack.discard(r)
        lengths[r] = 1 + nxt
        return lengths[r]

    for r in rels:
        best = max(best, longest_from(r, set()))
    return best


def _vertex_signatures(q: QuiverWithRelations, rounds: int = 2) -> list:
    """Permutation-invariant vertex signatures (degrees, relation roles,
    then neighborhood refinement)."""
    triples = q.relation_triples()
    sig = []
    for v in range(q.vertex_count):
        sig.append(
            (
                len(q.out_arrows[v]),
                len(q.in_arrows[v]),
                sum(1 for tr in triples if tr[0] == v),
                sum(1 for tr in triples if tr[1] == v),
                sum(1 for tr in triples if tr[2] == v),
            )
        )
    for _ in range(rounds):
        nxt = []
        for v in range(q.vertex_count):
            outs = sorted(sig[a.target] for a in q.out_arrows[v])
            ins = sorted(sig[a.source] for a in q.in_arrows[v])
            nxt.append((sig[v], tuple(outs), tuple(ins)))
        sig = nxt
    return sig


def iso_quivers(q1: QuiverWithRelations, q2: QuiverWithRelations) -> tuple[int, ...] | None:
    """A vertex bijection preserving arrows and relations, or None.

    Deterministic: vertices of q1 are assigned in index order and candidates
    tried in ascending order, so the first bijection found is canonical for
    the search order.  Backtracking with signature pruning; instance sizes
    make this exact approach safe.
    """
    if q1.vertex_count != q2.vertex_count:
        return None
    if len(q1.arrows) != len(q2.arrows) or len(q1.relations) != len(q2.relations):
        return None
    sig1 = _vertex_signatures(q1)
    sig2 = _vertex_signatures(q2)
    if sorted(sig1) != sorted(sig2):
        return None
    pairs1, pairs2 = q1.arrow_pairs(), q2.arrow_pairs()
    trip1, trip2 = q1.relation_triples(), q2.relation_triples()

    n = q1.vertex_count
    mapping: list[int | None] = [None] * n
    used = [False] * n

    def consistent(v1: int, v2: int) -> bool:
        for u1 in range(n):
            u2 = mapping[u1]
            if u2 is None:
                continue
            if ((v1, u1) in pairs1) != ((v2, u2) in pairs2):
                return False
            if ((u1, v1) in pairs1) != ((u2, v2) in pairs2):
                return False
        return True

    def assign(v1: int) -> bool:
        if v1 == n:
            image = {
                (mapping[a], mapping[b], mapping[c]) for a, b, c in trip1
            }
            return image == trip2
        for v2 in range(n):
            if used[v2] or sig2[v2] != sig1[v1]:
                continue
            if not consistent(v1, v2):
                continue
            mapping[v1] = v2
            used[v2] = True
            if assign(v1 + 1):
                return True
            mapping[v1] = None
            used[v2] = False
        return False

    if assign(0):
        return tuple(mapping)  # type: ignore[arg-type]
    return None


def canonical_key(q: QuiverWithRelations) -> tuple:
    """A complete isomorphism invariant: the lexicographically least
    (arrows, relations) presentation over all vertex relabelings compatible
    with the signature partition."""
    key, _ = canonical_form(q)
    return key


def canonical_form(q: QuiverWithRelations) -> tuple[tuple, tuple[int, ...]]:
    """(canonical key, relabeling) where relabeling[v] is the canonical index
    of vertex v and the key is the minimized certificate."""
    sig = _vertex_signatures(q)
    order = sorted(range(q.vertex_count), key=lambda v: (repr(sig[v]), v))
    classes: list[list[int]] = []
    for v in order:
        if classes and sig[classes[-1][0]] == sig[v]:
            classes[-1].append(v)
        else:
            classes.append([v])

    sizes = 1
    for cls in classes:
        for i in range(2, len(cls) + 1):
            sizes *= i
    if sizes > 500_000:
        raise AlgebraError(f"canonical form search too large ({sizes} relabelings)")

    pairs = [(a.source, a.target) for a in q.arrows]
    triples = sorted(q.relation_triples())
    best_key: tuple | None = None
    best_perm: tuple[int, ...] | None = None

    slots: list[list[int]] = []
    start = 0
    for cls in classes:
        slots.append(list(range(start, start + len(cls))))
        start += len(cls)

    for arrangement in product(*(permutations(s) for s in slots)):
        perm = [0] * q.vertex_count
        for cls, slot_order in zip(classes, arrangement):
            for v, pos in zip(cls, slot_order):
                perm[v] = pos
        key = (
            q.vertex_count,
            tuple(sorted((perm[s], perm[t]) for s, t in pairs)),
            tuple(sorted((perm[a], perm[b], perm[c]) for a, b, c in triples)),
        )
        if best_key is None or key < best_key:
            best_key = key
            best_perm = tuple(perm)
    assert best_key is not None and best_perm is not None
    return best_key, best_perm


def opposite(q: QuiverWithRelations) -> QuiverWithRelations:
    """The opposite quiver: arrows reversed (ids kept), relation pairs
    swapped, labels preserved."""
    arrows = tuple(Arrow(a.id, a.target, a.source) for a in q.arrows)
    relations = frozenset((second, first) for first, second in q.relations)
    return QuiverWithRelations(q.m, q.vertex_count, arrows, relations, q.vertex_labels)
