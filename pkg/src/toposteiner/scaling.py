"""Coarse-to-fine solver.

The search starts with every Steiner point on the root and a step of
``2**m`` half-units, then halves the step down to one half-unit.  Two modes:

``STRICT``
    Level ``k`` solves the rounded instance ``I_k`` (terminals pulled toward the
    root onto the ``2**k`` grid, limits rounded down accordingly) with step
    ``2**k`` half-units.  Each level's result is optimal for ``I_k`` and seeds
    the next level after re-pinning terminals and repairing violated limits.
``PRACTICAL``
    Every level works on the original instance; coarse levels only keep the
    Steiner points on a coarse grid.  Optimality comes from the final level.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

from .components import Axis, Component, maximal_components, move_component
from .dp import EvalContext, local_search
from .errors import InfeasibleError, InstanceError
from .model import (
    INF,
    Embedding,
    HalfPoint,
    Instance,
    Terminal,
    cost,
    is_feasible,
    path_lengths,
    trivial_embedding,
    validate_instance,
    violations,
)

log = logging.getLogger(__name__)


class Mode(str, Enum):
    STRICT = "strict"
    PRACTICAL = "practical"


@dataclass(frozen=True)
class SolveConfig:
    mode: Mode = Mode.PRACTICAL
    max_rounds_per_level: int | None = None
    repair_cap: int = 16
    emit_level_trace: bool = True

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.repair_cap < 1:
            raise ValueError("repair_cap must be at least 1")


class LevelTrace(NamedTuple):
    k: int
    step: int
    dp_rounds: int
    repair_iterations: int
    cost_after: int


@dataclass(frozen=True)
class SolveReport:
    final: Embedding
    cost: int
    path_lengths: dict[str, int]
    feasible: bool
    levels: tuple[LevelTrace, ...]
    m: int
    start_cost: int
    mode: Mode = Mode.PRACTICAL
    notes: tuple[str, ...] = field(default=())


def _toward_root(c: int, grid: int) -> int:
    return (abs(c) // grid) * grid * (1 if c >= 0 else -1)


def round_instance(inst: Instance, k: int) -> Instance:
    """The instance with terminals on the ``2**k`` grid around the root.

    Each coordinate is truncated toward the root's coordinate; each finite
    limit loses the distance its terminal moved and is rounded down to a
    multiple of ``2**k``.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    report = validate_instance(inst)
    if not report.ok:
        raise InstanceError("; ".join(report.messages()))
    if not report.feasible:
        raise InfeasibleError("cannot round an infeasible instance", report)
    grid = 2 ** (k + 1)  # 2**k real units
    root = inst.root_position
    terms = {}
    for t, term in inst.terminals.items():
        rel = inst.relative(term.position)
        p = HalfPoint(root.x2 + _toward_root(rel.x2, grid), root.y2 + _toward_root(rel.y2, grid))
        lim = term.limit
        if lim != INF:
            lim = grid * ((lim - term.position.l1(p)) // grid)
        terms[t] = Terminal(p, lim)
    return inst.with_terminals(terms)


def grid_exponent(inst: Instance) -> int:
    """Smallest m >= 0 with every terminal within ``2**m`` (exclusive) of the root per axis."""
    reach = 0
    for term in inst.terminals.values():
        rel = inst.relative(term.position)
        reach = max(reach, abs(rel.x2), abs(rel.y2))
    m = 0
    while reach >= 2 ** (m + 1):
        m += 1
    return m


# -- repair -----------------------------------------------------------------


def _same_side_crossing(path: list[str], C: Component) -> bool:
    inside = [i for i, v in enumerate(path) if v in C.members]
    if not inside:
        return False
    enter, leave = path[inside[0] - 1], path[inside[-1] + 1]
    return (enter in C.gamma_lt and leave in C.gamma_lt) or (enter in C.gamma_gt and leave in C.gamma_gt)


def _gap(emb: Embedding, axis: Axis, coord: int, side: frozenset[str] | set[str]) -> int:
    return min(abs(axis.of(emb[w]) - coord) for w in side)


def _move_toward_predecessor(inst: Instance, emb: Embedding, t: str, step: int) -> Embedding | None:
    path = inst.root_path(t)
    for axis in Axis:
        for C in maximal_components(inst, emb, axis):
            if not C.terminal_free or not _same_side_crossing(path, C):
                continue
            side = C.gamma_lt if C.sign == 1 else C.gamma_gt
            delta = min(step, _gap(emb, axis, C.coord, side))
            return move_component(emb, C, -C.sign * delta)
    return None


def _flatten_detour(inst: Instance, emb: Embedding, t: str, step: int) -> Embedding | None:
    """Pull a Steiner plateau of the root-``t`` path toward both its path neighbours.

    Used when every same-side crossing of the path belongs to a component
    that also holds a terminal; the moved Steiner part then detaches from it.
    """
    path = inst.root_path(t)
    for axis in Axis:
        coords = [axis.of(emb[v]) for v in path]
        i = 1
        while i < len(path) - 1:
            j = i
            while j + 1 < len(path) - 1 and coords[j + 1] == coords[i]:
                j += 1
            c, before, after = coords[i], coords[i - 1], coords[j + 1]
            run = path[i : j + 1]
            if (before - c) * (after - c) > 0 and not any(v in inst.terminals for v in run):
                members = set(run)
                stack = list(run)
                while stack:
                    v = stack.pop()
                    for w in inst.adjacency[v]:
                        if w not in members and w not in inst.terminals and axis.of(emb[w]) == c:
                            members.add(w)
                            stack.append(w)
                direction = 1 if before > c else -1
                side = {
                    w
                    for v in members
                    for w in inst.adjacency[v]
                    if w not in members and (axis.of(emb[w]) - c) * direction > 0
                }
                delta = direction * min(step, _gap(emb, axis, c, side))
                return emb.updated({v: axis.shift(emb[v], delta) for v in members})
            i = j + 1
    return None


def repair(view: EvalContext, emb: Embedding, repair_cap: int = 16) -> tuple[Embedding, int]:
    """Restore feasibility by shortening violated root paths.

    Each sweep visits the violated terminals in id order and moves one
    component toward its predecessor for each (at most ``view.step``), which
    shortens that path and never lengthens another root path.  After
    ``repair_cap`` sweeps, or a sweep without any possible move, the trivial
    embedding is returned instead.
    """
    inst = view.instance
    moves = 0
    for _ in range(repair_cap):
        if is_feasible(inst, emb):
            return emb, moves
        progressed = False
        for t in sorted(violations(inst, emb)):
            if path_lengths(inst, emb)[t] <= inst.terminals[t].limit:
                continue
            new = _move_toward_predecessor(inst, emb, t, view.step)
            if new is None:
                new = _flatten_detour(inst, emb, t, view.step)
            if new is None:
                continue
            emb = new
            moves += 1
            progressed = True
        if not progressed:
            break
    if is_feasible(inst, emb):
        return emb, moves
    log.debug("repair gave up after %d moves; falling back to the trivial embedding", moves)
    return trivial_embedding(inst), moves


def warm_start(target_view: EvalContext, prev: Embedding, repair_cap: int = 16) -> tuple[Embedding, int]:
    """Carry Steiner points over, re-pin terminals, repair if needed."""
    inst = target_view.instance
    emb = prev.updated({t: term.position for t, term in inst.terminals.items()})
    if is_feasible(inst, emb):
        return emb, 0
    return repair(target_view, emb, repair_cap)


# -- driver -----------------------------------------------------------------


def solve(inst: Instance, config: SolveConfig | None = None) -> SolveReport:
    config = config or SolveConfig()
    report = validate_instance(inst)
    if not report.ok:
        raise InstanceError("; ".join(report.messages()))
    if not report.feasible:
        raise InfeasibleError("instance is infeasible: " + "; ".join(report.messages()), report)

    strict = config.mode is Mode.STRICT
    m = grid_exponent(inst)
    emb: Embedding | None = None
    levels: list[LevelTrace] = []
    notes: list[str] = []
    for k in range(m, -1, -1):
        step = 1 << k
        level_inst = inst
        if strict and k > 0:
            level_inst = round_instance(inst, k)
            if not validate_instance(level_inst).feasible:
                # only possible when some terminal is an inner vertex of the tree
                notes.append(f"level {k} skipped: rounded instance infeasible")
                continue
        view = EvalContext(level_inst, step)
        if emb is None:
            emb, repairs = trivial_embedding(level_inst), 0
        else:
            emb, repairs = warm_start(view, emb, config.repair_cap)
        emb, rounds = local_search(view, emb, config.max_rounds_per_level)
        level_cost = cost(level_inst, emb)
        log.debug("level k=%d step=%d rounds=%d repairs=%d cost2=%d", k, step, rounds, repairs, level_cost)
        levels.append(LevelTrace(k, step, rounds, repairs, level_cost))

    lengths = path_lengths(inst, emb)
    return SolveReport(
        final=emb,
        cost=cost(inst, emb),
        path_lengths=lengths,
        feasible=is_feasible(inst, emb, lengths),
        levels=tuple(levels) if config.emit_level_trace else (),
        m=m,
        start_cost=cost(inst, trivial_embedding(inst)),
        mode=config.mode,
        notes=tuple(notes),
    )
