"""Mutations of gentle presentations and their geometric counterparts.

Three kinds of moves live here.  ``tilting_mutation_plus`` reverses the
arrows into a vertex (``tilting_mutation_minus`` the arrows out of one),
rewrites the relations around that vertex, and accepts the move only when
the result is again gentle with the same component and cycle structure.
``geometric_mutation`` performs the corresponding diagonal move on a
dissection and rebuilds the quiver from scratch; it is the ground truth the
algebra-level rewrite is validated against.  ``remove_relation_chain``
trades a run of consecutive zero-relations for a reversed arrow chain,
which preserves the Cartan invariants but can leave the class of
dissection-realizable presentations.

Rejected moves raise :class:`MoveRejected`; internal consistency failures
(a move that passed its preconditions but broke an invariant that the
theory guarantees) raise :class:`MutationError`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algebra import (
    AlgebraError,
    Arrow,
    QuiverWithRelations,
    components,
    full_relation_cycles,
    is_gentle,
    max_relation_chain,
    opposite,
    quiver_of,
)
from .geometry import Diagonal, Dissection, apply_move
from .homology import (
    DerivedInvariant,
    HomologyError,
    cartan_matrix,
    derived_invariant,
    happel_hom_dims,
    snf_diagonal,
)


class MutationError(RuntimeError):
    """A move that should have been safe broke a guaranteed invariant."""


class MoveRejected(Exception):
    """The requested move is not admissible on this quiver."""


@dataclass(frozen=True)
class MutationContext:
    """Local structure around a mutation vertex.

    Slots are indexed 0 and 1.  An in-arrow and an out-arrow share a slot
    exactly when their composition through ``mut`` is nonzero; leftover
    arrows fill the free slots, in-arrows first, ties broken by smallest
    neighbor vertex.  ``pres[t]`` is the arrow whose composition with
    ``ins[t]`` vanishes, ``posts[t]`` the arrow killed after ``outs[t]``.
    """

    mut: int
    ins: tuple[Arrow | None, Arrow | None]
    outs: tuple[Arrow | None, Arrow | None]
    pres: tuple[Arrow | None, Arrow | None]
    posts: tuple[Arrow | None, Arrow | None]
    pairs: tuple[int, ...]


def mutation_context(q: QuiverWithRelations, mut: int) -> MutationContext:
    if not 0 <= mut < q.vertex_count:
        raise AlgebraError(f"vertex {mut} out of range")
    ins = sorted(q.in_arrows[mut], key=lambda a: a.source)
    outs = sorted(q.out_arrows[mut], key=lambda a: a.target)
    if len(ins) > 2 or len(outs) > 2:
        raise AlgebraError("mutation context requires a gentle vertex")

    paired: list[tuple[Arrow, Arrow]] = []
    free_ins: list[Arrow] = []
    used_outs: set[int] = set()
    for i in ins:
        partner = [o for o in outs if (i.id, o.id) not in q.relations]
        if len(partner) > 1:
            raise AlgebraError("two nonzero continuations; not gentle")
        if partner:
            paired.append((i, partner[0]))
            used_outs.add(partner[0].id)
        else:
            free_ins.append(i)

    in_slot: list[Arrow | None] = [None, None]
    out_slot: list[Arrow | None] = [None, None]
    slot = 0
    for i, o in paired:
        in_slot[slot], out_slot[slot] = i, o
        slot += 1
    pair_indices = tuple(range(slot))
    for i in free_ins:
        in_slot[in_slot.index(None)] = i
    # Unpaired out-arrows take the highest free slot: with one in-arrow and
    # one out-arrow composing to zero this yields ins[0]/outs[1], so a slot
    # is shared only by a genuine pair.
    for o in reversed(outs):
        if o.id not in used_outs:
            out_slot[1 if out_slot[1] is None else 0] = o

    def zero_pred(a: Arrow | None) -> Arrow | None:
        if a is None:
            return None
        hits = [b for b in q.in_arrows[a.source] if (b.id, a.id) in q.relations]
        return hits[0] if hits else None

    def zero_cont(a: Arrow | None) -> Arrow | None:
        if a is None:
            return None
        hits = [b for b in q.out_arrows[a.target] if (a.id, b.id) in q.relations]
        return hits[0] if hits else None

    return MutationContext(
        mut=mut,
        ins=tuple(in_slot),
        outs=tuple(out_slot),
        pres=tuple(zero_pred(a) for a in in_slot),
        posts=tuple(zero_cont(a) for a in out_slot),
        pairs=pair_indices,
    )


class _Builder:
    """Mutable working copy with stable arrow ids."""

    def __init__(self, q: QuiverWithRelations):
        self.m = q.m
        self.vertex_count = q.vertex_count
        self.ends: dict[int, tuple[int, int]] = {
            a.id: (a.source, a.target) for a in q.arrows
        }
        self.relations: set[tuple[int, int]] = set(q.relations)
        self._next = max(self.ends, default=-1) + 1
        self.labels = q.vertex_labels

    def add(self, source: int, target: int) -> int:
        aid = self._next
        self._next += 1
        self.ends[aid] = (source, target)
        return aid

    def delete(self, aid: int) -> None:
        del self.ends[aid]
        self.relations = {r for r in self.relations if aid not in r}

    def retarget(self, aid: int, target: int) -> None:
        self.ends[aid] = (self.ends[aid][0], target)

    def build(self) -> QuiverWithRelations:
        arrows = tuple(Arrow(aid, s, t) for aid, (s, t) in self.ends.items())
        return QuiverWithRelations(
            self.m, self.vertex_count, arrows, frozenset(self.relations), self.labels
        )


def mutation_complexes(
    q: QuiverWithRelations, mut: int, kind: str
) -> list[dict[int, list[int]]]:
    """Complex family for the Happel alternating-sum prediction.

    Every vertex other than ``mut`` contributes a degree-0 stalk.  At a
    vertex with in-arrows, a plus move uses the two-term complex with the
    in-neighbors in degree 0 and ``mut`` in degree 1.  At a source, the
    zero-chain of each out-arrow is laid out with alternating signs:
    ``mut`` sits in the top degree and each chain descends one degree per
    arrow.  The prediction is exact on all moves whose chains have equal
    length, which covers every admissible site; it is not a single-complex
    tilt for unequal chains, so callers must not rely on it there.  Minus
    moves mirror the plus family through the opposite quiver.
    """

    if kind == "minus":
        return mutation_complexes(opposite(q), mut, "plus")
    if kind != "plus":
        raise MutationError(f"unknown move kind {kind!r}")
    out: list[dict[int, list[int]]] = [{0: [v]} for v in range(q.vertex_count)]
    ins = q.in_arrows[mut]
    if ins:
        out[mut] = {0: [a.source for a in ins], 1: [mut]}
    elif q.out_arrows[mut]:
        chains = [_chase_zero_chain(q, o) for o in q.out_arrows[mut]]
        top = max(len(c) for c in chains)
        at_mut: dict[int, list[int]] = {top: [mut]}
        for chain in chains:
            for depth, a in enumerate(chain, start=1):
                at_mut.setdefault(top - depth, []).append(a.target)
        out[mut] = at_mut
    return out


def _chase_zero_chain(q: QuiverWithRelations, start: Arrow) -> list[Arrow]:
    """Follow the unique run of zero-compositions starting at ``start``."""

    chain = [start]
    seen = {start.id}
    while True:
        nxt = [
            b for b in q.out_arrows[chain[-1].target] if (chain[-1].id, b.id) in q.relations
        ]
        if not nxt:
            return chain
        if len(nxt) > 1:
            raise AlgebraError("two zero continuations; not gentle")
        if nxt[0].id in seen:
            raise MoveRejected("zero-chain from the mutation vertex wraps a cycle")
        chain.append(nxt[0])
        seen.add(nxt[0].id)


def _check_acceptance(
    old: QuiverWithRelations, new: QuiverWithRelations
) -> QuiverWithRelations:
    gentle = is_gentle(new)
    if not gentle.ok:
        raise MoveRejected(f"result not gentle: {gentle.problem}")
    if len(components(new)) != len(components(old)):
        raise MoveRejected("move changes the number of components")
    if full_relation_cycles(new).full_count != full_relation_cycles(old).full_count:
        raise MoveRejected("move changes the number of full-relation cycles")
    return new


def tilting_mutation_plus(q: QuiverWithRelations, mut: int) -> QuiverWithRelations:
    """Reverse the arrows into ``mut`` and rewrite the local relations.

    At a vertex with in-arrows this implements the reflection-with-
    shortcuts rewrite and cross-checks the resulting Cartan matrix against
    the alternating-sum prediction (a mismatch is a hard error).  At a
    source it reattaches each out-arrow at the far end of its zero-chain.
    Isolated vertices mutate to themselves.  Moves whose result would not
    be gentle, or would change the component or cycle structure, raise
    :class:`MoveRejected`.
    """

    ctx = mutation_context(q, mut)
    if not any(ctx.ins) and not any(ctx.outs):
        return q
    if not any(ctx.ins):
        return _source_plus(q, ctx)
    return _regular_plus(q, ctx)


def _regular_plus(q: QuiverWithRelations, ctx: MutationContext) -> QuiverWithRelations:
    mut = ctx.mut
    unpaired_outs = [
        ctx.outs[t] for t in (0, 1) if ctx.outs[t] and t not in ctx.pairs
    ]
    if unpaired_outs:
        a = unpaired_outs[0]
        raise MoveRejected(
            f"out-arrow {a.source}->{a.target} composes to zero with every in-arrow"
        )

    deleted = {ctx.ins[t].id for t in (0, 1) if ctx.ins[t]}
    deleted |= {ctx.outs[t].id for t in ctx.pairs}
    for a in list(ctx.pres) + list(ctx.posts):
        if a is not None and a.id in deleted:
            raise MoveRejected(
                "a neighboring zero-composition arrow is attached to the "
                "mutation vertex itself"
            )

    b = _Builder(q)
    for aid in deleted:
        b.delete(aid)
    reversed_in: dict[int, int] = {}
    for t in (0, 1):
        i = ctx.ins[t]
        if i is None:
            continue
        if ctx.pres[t] is not None:
            b.retarget(ctx.pres[t].id, mut)
        reversed_in[t] = b.add(mut, i.source)
    for t in ctx.pairs:
        comp = b.add(ctx.ins[t].source, ctx.outs[t].target)
        b.relations.add((reversed_in[t], comp))
        if ctx.posts[t] is not None:
            b.relations.add((comp, ctx.posts[t].id))
    for t in (0, 1):
        if ctx.pres[t] is None:
            continue
        for s in (0, 1):
            if s != t and s in reversed_in:
                b.relations.add((ctx.pres[t].id, reversed_in[s]))

    try:
        new = b.build()
    except AlgebraError as exc:
        raise MoveRejected(f"local shape not supported: {exc}") from exc
    new = _check_acceptance(q, new)

    predicted = happel_hom_dims(mutation_complexes(q, mut, "plus"), cartan_matrix(q))
    if cartan_matrix(new) != predicted:
        raise MutationError(
            f"mutation at {mut} disagrees with the alternating-sum prediction"
        )
    return new


def _source_plus(q: QuiverWithRelations, ctx: MutationContext) -> QuiverWithRelations:
    mut = ctx.mut
    b = _Builder(q)
    for o in ctx.outs:
        if o is None:
            continue
        chain = _chase_zero_chain(q, o)
        landing = chain[-1].target
        b.delete(o.id)
        new_arrow = b.add(landing, mut)
        if len(chain) > 1:
            b.relations.add((chain[-1].id, new_arrow))
    try:
        new = b.build()
    except AlgebraError as exc:
        raise MoveRejected(f"local shape not supported: {exc}") from exc
    new = _check_acceptance(q, new)

    if snf_diagonal(cartan_matrix(new)) != snf_diagonal(cartan_matrix(q)):
        raise MutationError(f"source mutation at {mut} changed the Cartan class")
    return new


def tilting_mutation_minus(q: QuiverWithRelations, mut: int) -> QuiverWithRelations:
    """Reverse the arrows out of ``mut``; dual to the plus move."""

    return opposite(tilting_mutation_plus(opposite(q), mut))


def geometric_mutation(
    t: Dissection, d: Diagonal, k: int
) -> tuple[Dissection, QuiverWithRelations]:
    """Move a diagonal and rebuild; the ground truth for the rewrites."""

    moved = apply_move(t, d, k)
    return moved, quiver_of(moved)


def preserves_invariant(t: Dissection, d: Diagonal, k: int) -> bool:
    """Whether moving ``d`` keeps the component partition (with the moved
    diagonal identified with its image) and the full-relation cycle count."""

    q1 = quiver_of(t)
    t2, q2 = geometric_mutation(t, d, k)
    replaced = set(t2.diagonals) - set(t.diagonals)
    image = replaced.pop() if replaced else d

    def partition(q: QuiverWithRelations, rename: dict) -> set[frozenset]:
        assert q.vertex_labels is not None
        return {
            frozenset(
                rename.get(q.vertex_labels[v], q.vertex_labels[v])
                for v in comp.vertices
            )
            for comp in components(q)
        }

    if partition(q1, {}) != partition(q2, {image: d}):
        return False
    return (
        full_relation_cycles(q1).full_count == full_relation_cycles(q2).full_count
    )


def remove_relation_chain(
    q: QuiverWithRelations, chain: Sequence[int]
) -> QuiverWithRelations:
    """Replace a separating run of zero-relations by a reversed arrow chain.

    ``chain`` lists the vertices v_0, ..., v_q of a directed path whose
    every consecutive arrow pair is a relation and whose interior vertices
    carry no other arrows.  The two ends must lie in different components
    once the chain arrows are removed.  The output reverses the first q-1
    arrows, keeps a forward arrow into v_q, re-attaches any relation that
    continued past v_q, and drops the chain relations; the Smith normal
    form of the Cartan matrix and the component count are unchanged (a
    violation is a hard error, not a rejection).
    """

    verts = list(chain)
    if len(verts) < 3:
        raise MoveRejected("chain needs at least two arrows")
    if len(set(verts)) != len(verts):
        raise MoveRejected("chain revisits a vertex")
    by_ends = {(a.source, a.target): a for a in q.arrows}
    try:
        arrows = [by_ends[(verts[r], verts[r + 1])] for r in range(len(verts) - 1)]
    except KeyError as exc:
        raise MoveRejected(f"chain edge {exc} is not an arrow") from exc
    for a, b in zip(arrows, arrows[1:]):
        if (a.id, b.id) not in q.relations:
            raise MoveRejected(
                f"consecutive arrows through {a.target} do not compose to zero"
            )
    if any(second == arrows[0].id for _, second in q.relations):
        raise MoveRejected(
            f"relation run extends backwards past vertex {verts[0]}; "
            "the chain is not maximal"
        )
    for v in verts[1:-1]:
        incident = set(q.in_arrows[v]) | set(q.out_arrows[v])
        if incident - set(arrows):
            raise MoveRejected(f"interior vertex {v} has arrows off the chain")

    chain_ids = {a.id for a in arrows}
    neighbors: dict[int, set[int]] = {v: set() for v in range(q.vertex_count)}
    for a in q.arrows:
        if a.id not in chain_ids:
            neighbors[a.source].add(a.target)
            neighbors[a.target].add(a.source)
    stack, reached = [verts[0]], {verts[0]}
    while stack:
        for w in neighbors[stack.pop()]:
            if w not in reached:
                reached.add(w)
                stack.append(w)
    if verts[-1] in reached:
        raise MoveRejected("chain ends stay connected without the chain")

    continuation = [
        second for first, second in q.relations if first == arrows[-1].id
    ]
    b = _Builder(q)
    for aid in chain_ids:
        b.delete(aid)
    for r in range(1, len(verts) - 1):
        b.add(verts[r], verts[r - 1])
    last = b.add(verts[-2], verts[-1])
    for aid in continuation:
        b.relations.add((last, aid))
    try:
        new = b.build()
    except AlgebraError as exc:
        raise MoveRejected(f"chain surgery not supported here: {exc}") from exc

    gentle = is_gentle(new)
    if not gentle.ok:
        raise MoveRejected(f"result not gentle: {gentle.problem}")
    if len(components(new)) != len(components(q)):
        raise MutationError("chain removal changed the component count")
    if snf_diagonal(cartan_matrix(new)) != snf_diagonal(cartan_matrix(q)):
        raise MutationError("chain removal changed the Cartan class")
    return new


def apply_mutation(
    q: QuiverWithRelations, kind: str, site: Sequence[int]
) -> QuiverWithRelations:
    """Dispatch a recorded move: kind is plus, minus, or rel_rem."""

    if kind == "plus":
        return tilting_mutation_plus(q, site[0])
    if kind == "minus":
        return tilting_mutation_minus(q, site[0])
    if kind == "rel_rem":
        return remove_relation_chain(q, site)
    raise MutationError(f"unknown move kind {kind!r}")


@dataclass(frozen=True)
class MoveRecord:
    """Audit entry for one accepted move."""

    kind: str
    site: tuple[int, ...]
    invariant_before: DerivedInvariant
    invariant_after: DerivedInvariant

    def __post_init__(self) -> None:
        if self.kind not in ("plus", "minus", "rel_rem"):
            raise MutationError(f"unknown move kind {self.kind!r}")
        before, after = self.invariant_before, self.invariant_after
        if (before.s, before.r, before.snf) != (after.s, after.r, after.snf):
            raise MutationError(
                f"accepted {self.kind} move at {self.site} changed the "
                f"invariant: {before} -> {after}"
            )


def record_move(
    kind: str,
    site: Sequence[int],
    before: QuiverWithRelations,
    after: QuiverWithRelations,
) -> MoveRecord:
    return MoveRecord(
        kind, tuple(site), derived_invariant(before), derived_invariant(after)
    )


@dataclass(frozen=True)
class RealizabilityReport:
    """Outcome of the structural screen for dissection-derived quivers."""

    ok: bool
    problems: tuple[str, ...]


def realizability_report(q: QuiverWithRelations) -> RealizabilityReport:
    """Check the constraints every dissection-derived quiver satisfies.

    Gentle; every oriented cycle has length m + 2 and carries full
    relations; runs of consecutive relations off cycles are shorter than m;
    Cartan entries are 0 or 1.  A quiver failing any of these cannot come
    from a dissection, though it may still be derived equivalent to one.
    """

    problems: list[str] = []
    gentle = is_gentle(q)
    if not gentle.ok:
        problems.append(f"not gentle: {gentle.problem}")
    for cyc in full_relation_cycles(q).cycles:
        if not cyc.full_relations:
            problems.append(f"cycle through {cyc.vertices} lacks full relations")
        elif len(cyc) != q.m + 2:
            problems.append(
                f"cycle through {cyc.vertices} has length {len(cyc)}, "
                f"expected {q.m + 2}"
            )
    try:
        longest = max_relation_chain(q)
    except AlgebraError as exc:
        problems.append(str(exc))
    else:
        if longest > q.m - 1:
            problems.append(
                f"relation chain of length {longest} exceeds bound {q.m - 1}"
            )
    try:
        c = cartan_matrix(q)
    except HomologyError as exc:
        problems.append(str(exc))
    else:
        if any(x not in (0, 1) for row in c.rows for x in row):
            problems.append("Cartan matrix has an entry outside {0, 1}")
    return RealizabilityReport(not problems, tuple(problems))


def is_realizable(q: QuiverWithRelations) -> bool:
    return realizability_report(q).ok
