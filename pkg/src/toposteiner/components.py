"""Constant-coordinate components of an embedded tree and how moving them acts.

An x-component is a connected set of vertices sharing one x-coordinate.
Shifting a maximal component along its axis (terminals stay pinned) changes
only the edges leaving it, so the effect on the total length and on every
root path can be read off the component's frontier:

* ``cost_delta = delta * (|lower neighbours| - |upper neighbours|)``
* the root path to ``t`` changes by ``2 * sign * delta`` if the path enters and
  leaves the component on the same side (``t`` in ``affected_terminals``), and
  not at all otherwise.

Both hold as long as no edge flips its coordinate order, which
:func:`predict_deltas` checks explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .errors import LocalOrderError
from .model import Embedding, HalfPoint, Instance


class Axis(Enum):
    X = 0
    Y = 1

    def of(self, p: HalfPoint) -> int:
        return p[self.value]

    def shift(self, p: HalfPoint, delta: int) -> HalfPoint:
        return HalfPoint(p.x2 + delta, p.y2) if self is Axis.X else HalfPoint(p.x2, p.y2 + delta)


@dataclass(frozen=True)
class Component:
    axis: Axis
    members: frozenset[str]
    coord: int
    gamma_lt: frozenset[str]
    gamma_gt: frozenset[str]
    predecessor: str | None
    sign: int | None
    terminals: frozenset[str]

    @property
    def terminal_free(self) -> bool:
        return not self.terminals

    @property
    def key(self) -> tuple:
        return (self.axis.value, self.coord, min(self.members))


def maximal_components(inst: Instance, emb: Embedding, axis: Axis) -> list[Component]:
    """Partition the vertices into maximal ``axis``-components."""
    pos = emb.positions
    coord = {v: axis.of(pos[v]) for v in inst.vertices}
    parent = inst.parent
    seen: set[str] = set()
    comps = []
    for start in inst.vertices:
        if start in seen:
            continue
        c = coord[start]
        members = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in inst.adjacency[v]:
                if w not in members and coord[w] == c:
                    members.add(w)
                    stack.append(w)
        seen |= members
        lt, gt = set(), set()
        for v in members:
            for w in inst.adjacency[v]:
                if w not in members:
                    (lt if coord[w] < c else gt).add(w)
        pred = sign = None
        if inst.root not in members:
            # the member nearest the root is the only one whose parent lies outside
            top = next(v for v in members if parent[v] not in members)
            pred = parent[top]
            sign = 1 if pred in lt else -1
        comps.append(
            Component(
                axis=axis,
                members=frozenset(members),
                coord=c,
                gamma_lt=frozenset(lt),
                gamma_gt=frozenset(gt),
                predecessor=pred,
                sign=sign,
                terminals=frozenset(v for v in members if v in inst.terminals),
            )
        )
    comps.sort(key=lambda C: (C.coord, min(C.members)))
    return comps


def component_frontier(C: Component) -> tuple[frozenset[str], frozenset[str], str | None, int | None]:
    return C.gamma_lt, C.gamma_gt, C.predecessor, C.sign


def affected_terminals(inst: Instance, C: Component) -> frozenset[str]:
    """Terminals whose root path enters and leaves ``C`` on the same side."""
    if not C.terminal_free:
        raise ValueError("affected terminals are only defined for terminal-free components")
    out = set()
    for t in inst.terminals:
        path = inst.root_path(t)
        inside = [i for i, v in enumerate(path) if v in C.members]
        if not inside:
            continue
        enter, leave = path[inside[0] - 1], path[inside[-1] + 1]
        if (enter in C.gamma_lt and leave in C.gamma_lt) or (enter in C.gamma_gt and leave in C.gamma_gt):
            out.add(t)
    return frozenset(out)


def move_component(emb: Embedding, C: Component, delta: int) -> Embedding:
    """Shift the non-terminal members of ``C`` by ``delta`` along its axis."""
    if delta == 0:
        return emb
    return emb.updated({v: C.axis.shift(emb[v], delta) for v in C.members - C.terminals})


def apply_moves(emb: Embedding, moves: Iterable[tuple[Component, int]]) -> Embedding:
    for C, delta in moves:
        emb = move_component(emb, C, delta)
    return emb


def preserves_local_order(inst: Instance, before: Embedding, after: Embedding) -> bool:
    """True if no edge's x- or y-order of endpoints flips between the two."""
    for a, b in inst.edges:
        for k in (0, 1):
            pa, pb = before[a][k], before[b][k]
            qa, qb = after[a][k], after[b][k]
            if (pa <= pb and qa > qb) or (pb <= pa and qb > qa):
                return False
    return True


def predict_deltas(
    inst: Instance, emb: Embedding, moves: Sequence[tuple[Component, int]]
) -> tuple[int, dict[str, int]]:
    """Cost change and per-terminal path change of a simultaneous move.

    Raises :class:`LocalOrderError` if the components overlap on an axis, if a
    component holding a terminal is asked to move, or if the moved embedding
    does not preserve the local order of ``emb``.
    """
    seen = {Axis.X: set(), Axis.Y: set()}
    for C, delta in moves:
        if seen[C.axis] & C.members:
            raise LocalOrderError("components of one axis must be disjoint")
        seen[C.axis] |= C.members
        if delta and not C.terminal_free:
            raise LocalOrderError("a component containing a terminal cannot move")
    moved = apply_moves(emb, moves)
    if not preserves_local_order(inst, emb, moved):
        raise LocalOrderError("move does not preserve the local order; shrink delta")

    cost_delta = 0
    path_delta = {t: 0 for t in inst.terminals}
    for C, delta in moves:
        if not delta:
            continue
        cost_delta += delta * (len(C.gamma_lt) - len(C.gamma_gt))
        if C.predecessor is None:
            continue
        for t in affected_terminals(inst, C):
            path_delta[t] += 2 * C.sign * delta
    return cost_delta, path_delta


def check_laminar(family: Iterable[Iterable[str]]) -> bool:
    """True iff every two sets of the family are nested or disjoint."""
    sets = [frozenset(s) for s in family]
    for i, a in enumerate(sets):
        for b in sets[i + 1 :]:
            if a & b and not (a <= b or b <= a):
                return False
    return True


def affected_family(inst: Instance, emb: Embedding, axis: Axis) -> list[frozenset[str]]:
    """``affected_terminals`` of every maximal terminal-free ``axis``-component."""
    return [affected_terminals(inst, C) for C in maximal_components(inst, emb, axis) if C.terminal_free]
