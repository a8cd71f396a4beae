"""Command-line front end.

Exit codes: 0 success, 1 invariant or oracle failure, 2 invalid input,
3 cap exceeded.  Every command is deterministic for fixed inputs and flags;
randomized spot checks take an explicit --seed.
"""

from __future__ import annotations

import json
import random
import re
import sys
from collections import Counter, defaultdict
from pathlib import Path
from typing import Any, Mapping, NoReturn

import click

from .algebra import (
    AlgebraError,
    QuiverWithRelations,
    canonical_form,
    components,
    iso_quivers,
    quiver_of,
)
from .geometry import (
    CapExceeded,
    Diagonal,
    Dissection,
    GeometryError,
    PolygonParams,
    diagonal,
    enumerate_dissections,
    fuss_catalan,
)
from .homology import (
    HomologyError,
    bh_diagonal,
    cartan_matrix,
    cycle_parity_counts,
    derived_invariant,
    determinant,
    snf_diagonal,
)
from .mutation import (
    MoveRejected,
    MutationError,
    geometric_mutation,
    preserves_invariant,
    realizability_report,
    record_move,
    tilting_mutation_minus,
    tilting_mutation_plus,
)
from .normalform import NormalFormError, derived_equivalent, reduce_component
from .render import RenderError, render
from .serialize import (
    SerializeError,
    dissection_from_json,
    dissection_to_json,
    dumps,
    invariant_to_json,
    move_to_json,
    quiver_from_json,
    quiver_to_json,
    trace_to_json,
)

_MOVE_RE = re.compile(r"^d\((\d+)\s*,\s*(\d+)\)\s*:\s*([+-]?\d+)$")


def _fail(code: int, message: str) -> NoReturn:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guarded(work):
    """Run one command body, mapping domain errors to exit codes."""

    try:
        return work()
    except CapExceeded as exc:
        _fail(3, str(exc))
    except NormalFormError as exc:
        text = str(exc)
        _fail(3 if ("cap" in text or "budget" in text) else 1, text)
    except (MutationError, HomologyError) as exc:
        _fail(1, str(exc))
    except (GeometryError, AlgebraError, SerializeError, json.JSONDecodeError) as exc:
        _fail(2, str(exc))


def _load_json(path: str) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _load_object(path: str) -> Dissection | QuiverWithRelations:
    obj = _load_json(path)
    if isinstance(obj, Mapping) and "diagonals" in obj:
        return dissection_from_json(obj)
    if isinstance(obj, Mapping) and "arrows" in obj:
        return quiver_from_json(obj)
    raise SerializeError("expected a dissection or quiver JSON object")


def _as_quiver(obj: Dissection | QuiverWithRelations) -> QuiverWithRelations:
    return quiver_of(obj) if isinstance(obj, Dissection) else obj


def _emit(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _parse_move(spec: str) -> tuple[Diagonal, int]:
    match = _MOVE_RE.match(spec.strip())
    if match is None:
        _fail(2, f'move {spec!r} does not match "d(a,b):+1"')
    a, b, k = (int(g) for g in match.groups())
    if k == 0:
        _fail(2, "rotation count must be nonzero")
    return diagonal(a, b), k


_in_opt = click.option(
    "--in", "infile", type=click.Path(exists=True, dir_okay=False), required=True
)
_out_opt = click.option("--out", type=click.Path(dir_okay=False), default=None)


@click.group()
def main() -> None:
    """Polygon dissections, their gentle quivers, and derived-class tools."""


@main.command("enumerate")
@click.option("--n", type=int, required=True)
@click.option("--m", type=int, required=True)
@click.option("--cap", type=int, default=None, help="Refuse larger enumerations.")
@_out_opt
def enumerate_cmd(n: int, m: int, cap: int | None, out: str | None) -> None:
    """List all dissections of the (m(n+1)+2)-gon, one JSON object per line."""

    def work() -> None:
        params = PolygonParams(n, m)
        ts = sorted(
            enumerate_dissections(params, cap=cap or 10**6),
            key=lambda t: t.diagonals,
        )
        lines = [dumps(dissection_to_json(t)) for t in ts]
        _emit("\n".join(lines) + "\n", out)

    _guarded(work)


@main.command("quiver")
@_in_opt
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "dot", "svg"]),
    default="json",
    show_default=True,
)
@_out_opt
def quiver_cmd(infile: str, fmt: str, out: str | None) -> None:
    """Build the quiver with relations of a dissection."""

    def work() -> None:
        t = dissection_from_json(_load_json(infile))
        q = quiver_of(t)
        text = dumps(quiver_to_json(q)) + "\n" if fmt == "json" else render(q, fmt)
        _emit(text, out)

    _guarded(work)


@main.command("invariants")
@_in_opt
@_out_opt
def invariants_cmd(infile: str, out: str | None) -> None:
    """Derived invariant of each component, one JSON object per line."""

    def work() -> None:
        q = _as_quiver(_load_object(infile))
        lines = [
            dumps(invariant_to_json(derived_invariant(c.quiver)))
            for c in components(q)
        ]
        _emit("\n".join(lines) + "\n", out)

    _guarded(work)


@main.command("mutate")
@_in_opt
@click.option("--move", "move_spec", required=True, help='Move spec "d(a,b):+1".')
@_out_opt
def mutate_cmd(infile: str, move_spec: str, out: str | None) -> None:
    """Rotate one diagonal; refuses moves that change the derived class."""

    def work() -> None:
        t = dissection_from_json(_load_json(infile))
        d, k = _parse_move(move_spec)
        if d not in t.diagonals:
            _fail(2, f"{d!r} is not a diagonal of the dissection")
        if not preserves_invariant(t, d, k):
            _fail(1, f"moving {d!r} by {k:+d} changes the derived invariant")
        before = quiver_of(t)
        assert before.vertex_labels is not None
        moved, moved_q = geometric_mutation(t, d, k)
        rec = record_move(
            "plus" if k > 0 else "minus",
            (before.vertex_labels.index(d),),
            before,
            moved_q,
        )
        payload = {
            "dissection": dissection_to_json(moved),
            "quiver": quiver_to_json(moved_q),
            "record": move_to_json(rec),
        }
        _emit(dumps(payload) + "\n", out)

    _guarded(work)


@main.command("reduce")
@_in_opt
@click.option("--component", "comp_idx", type=int, default=0, show_default=True)
@click.option(
    "--cap",
    type=int,
    default=None,
    envvar="MCW_CAP",
    help="Step cap override (also read from MCW_CAP).",
)
@_out_opt
def reduce_cmd(infile: str, comp_idx: int, cap: int | None, out: str | None) -> None:
    """Reduce one component to its normal form and print the trace."""

    def work() -> None:
        q = _as_quiver(_load_object(infile))
        comps = components(q)
        if not 0 <= comp_idx < len(comps):
            _fail(2, f"component {comp_idx} out of range; quiver has {len(comps)}")
        trace = reduce_component(comps[comp_idx].quiver)
        if cap is not None and len(trace.steps) > cap:
            _fail(3, f"reduction used {len(trace.steps)} steps, cap {cap}")
        _emit(dumps(trace_to_json(trace)) + "\n", out)

    _guarded(work)


@main.command("equiv")
@click.argument("left", type=click.Path(exists=True, dir_okay=False))
@click.argument("right", type=click.Path(exists=True, dir_okay=False))
@_out_opt
def equiv_cmd(left: str, right: str, out: str | None) -> None:
    """Decide derived equivalence of two connected components."""

    def work() -> None:
        sides = {}
        for name, path in (("left", left), ("right", right)):
            q = _as_quiver(_load_object(path))
            comps = components(q)
            if len(comps) != 1:
                _fail(
                    2,
                    f"{name} input has {len(comps)} components; "
                    "equivalence compares connected algebras",
                )
            sides[name] = comps[0].quiver
        if sides["left"].m != sides["right"].m:
            _fail(2, f'levels differ: {sides["left"].m} vs {sides["right"].m}')
        answer = derived_equivalent(sides["left"], sides["right"])
        payload = {
            "equivalent": answer,
            "left": invariant_to_json(derived_invariant(sides["left"])),
            "right": invariant_to_json(derived_invariant(sides["right"])),
        }
        _emit(dumps(payload) + "\n", out)

    _guarded(work)


@main.command("census")
@click.option("--n", type=int, required=True)
@click.option("--m", type=int, required=True)
@click.option("--cap", type=int, default=None)
@_out_opt
def census_cmd(n: int, m: int, cap: int | None, out: str | None) -> None:
    """Component counts of every (s, r) class across all dissections."""

    def work() -> None:
        params = PolygonParams(n, m)
        tally: Counter[tuple[int, int]] = Counter()
        for t in enumerate_dissections(params, cap=cap or 10**6):
            for comp in components(quiver_of(t)):
                inv = derived_invariant(comp.quiver)
                tally[(inv.s, inv.r)] += 1
        lines = [
            dumps({"s": s, "r": r, "count": count})
            for (s, r), count in sorted(tally.items())
        ]
        _emit("\n".join(lines) + "\n", out)

    _guarded(work)


@main.command("render")
@_in_opt
@click.option("--format", "fmt", type=click.Choice(["svg", "dot"]), required=True)
@_out_opt
def render_cmd(infile: str, fmt: str, out: str | None) -> None:
    """Draw a dissection or quiver as an SVG or DOT document."""

    def work() -> None:
        try:
            _emit(render(_load_object(infile), fmt), out)
        except RenderError as exc:
            _fail(2, str(exc))

    _guarded(work)


def _check_cell(n: int, m: int, rng: random.Random, samples: int) -> str:
    """All structural invariants for one (n, m) cell; returns a summary."""

    ts = list(enumerate_dissections(PolygonParams(n, m)))
    expected = fuss_catalan(n, m)
    if len(ts) != expected:
        raise MutationError(
            f"n={n} m={m}: enumerated {len(ts)} dissections, expected {expected}"
        )

    classes: defaultdict[tuple[int, int], set] = defaultdict(set)
    for t in ts:
        q = quiver_of(t)
        report = realizability_report(q)
        if report.problems:
            raise MutationError(f"n={n} m={m} {t!r}: {report.problems[0]}")
        for comp in components(q):
            inv = derived_invariant(comp.quiver)
            cartan = cartan_matrix(comp.quiver)
            if snf_diagonal(cartan) != snf_diagonal(bh_diagonal(comp.quiver)):
                raise HomologyError(f"n={n} m={m} {t!r}: Smith form mismatch")
            odd, _ = cycle_parity_counts(comp.quiver)
            if determinant(cartan) not in (0, 2**odd):
                raise HomologyError(f"n={n} m={m} {t!r}: Cartan determinant")
            classes[(inv.s, inv.r)].add(canonical_form(reduce_component(comp.quiver).final)[0])

    for pair, keys in classes.items():
        if len(keys) != 1:
            raise NormalFormError(
                f"n={n} m={m}: class {pair} reduced to {len(keys)} distinct forms"
            )

    checked = 0
    admissible = [
        (t, d, k)
        for t in ts
        for d in t.diagonals
        for k in (1, -1)
        if preserves_invariant(t, d, k)
    ]
    rng.shuffle(admissible)
    for t, d, k in admissible[:samples]:
        q = quiver_of(t)
        assert q.vertex_labels is not None
        site = q.vertex_labels.index(d)
        movers = [tilting_mutation_plus, tilting_mutation_minus]
        if k == -1:
            movers.reverse()
        if m >= 2:
            movers = movers[:1]
        outcome = None
        for mover in movers:
            try:
                outcome = mover(q, site)
                break
            except MoveRejected:
                continue
        geo = geometric_mutation(t, d, k)[1]
        if outcome is None or iso_quivers(outcome, geo) is None:
            raise MutationError(
                f"n={n} m={m} {t!r}: algebra move at {d!r} k={k:+d} "
                "disagrees with geometry"
            )
        checked += 1
    return (
        f"n={n} m={m}: {len(ts)} dissections, {len(classes)} classes, "
        f"{checked} sampled moves ok"
    )


@main.command("check")
@click.option("--n", type=int, required=True, help="Largest n, inclusive.")
@click.option("--m", type=int, required=True, help="Largest m, inclusive.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--samples", type=int, default=20, show_default=True)
def check_cmd(n: int, m: int, seed: int, samples: int) -> None:
    """Run the invariant suite over every cell n' <= n, m' <= m."""

    def work() -> None:
        rng = random.Random(seed)
        for mm in range(1, m + 1):
            for nn in range(1, n + 1):
                click.echo(_check_cell(nn, mm, rng, samples))
        click.echo("all checks passed")

    _guarded(work)


if __name__ == "__main__":
    main()
