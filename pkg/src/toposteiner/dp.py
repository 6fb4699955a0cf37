"""Best simultaneous one-step displacement of all Steiner points.

Given a feasible embedding and a step ``s`` (half-units), every Steiner point
may move by a vector in ``{-s, 0, s}^2`` while terminals stay put.  The
cheapest feasible combination is found by a dynamic program over the tree
oriented away from the root:

``gamma(v, d, lam)`` is the minimum length of the subtree below ``v`` when
``v`` is displaced by ``d`` and the root-``v`` path has already consumed
``lam`` half-units of every descendant's budget.  A terminal contributes 0 if
it is undisplaced and ``lam`` does not exceed its limit; otherwise children
add ``e + gamma(w, d', lam + e)`` with ``e`` the displaced edge length, each
child minimised independently.  The improved cost is ``gamma(root, 0, 0)``.

Tables are stored per vertex as an ``int64`` array of shape
``(displacements, lam range)``.  The lam range of a vertex is the interval of
root-path lengths reachable under the allowed displacements, truncated at the
tightest limit below the vertex; subtrees without finite limits do not depend
on ``lam`` at all and keep a single column.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError
from .model import INF, Embedding, HalfPoint, Instance, cost, is_feasible

# (0, 0) first, then lexicographic: this is also the tie-break order.
UNIT_DISPLACEMENTS = ((0, 0),) + tuple(
    d for d in itertools.product((-1, 0, 1), repeat=2) if d != (0, 0)
)

_INF = np.int64(1 << 60)


@dataclass(frozen=True)
class EvalContext:
    """Positions and limits in force (an instance) plus the step size."""

    instance: Instance
    step: int

    def __post_init__(self):
        s = self.step
        if s < 1 or s & (s - 1):
            raise ValueError(f"step must be a positive power of two, got {s}")

    def displacements(self) -> tuple[tuple[int, int], ...]:
        return tuple((dx * self.step, dy * self.step) for dx, dy in UNIT_DISPLACEMENTS)


def _to_public(value) -> int | float:
    return math.inf if value >= _INF else int(value)


class DpContext:
    """Tables of ``gamma`` for one base embedding and one step size."""

    def __init__(self, view: EvalContext, base: Embedding):
        inst = view.instance
        self.view = view
        self.instance = inst
        self.base = base
        disp = view.displacements()
        self._disp = disp

        # candidate positions per vertex; terminals only keep displacement (0, 0)
        self.candidates: dict[str, list[HalfPoint]] = {}
        for v in inst.vertices:
            p = base[v]
            if v in inst.terminals:
                self.candidates[v] = [p]
            else:
                self.candidates[v] = [p.shifted(dx, dy) for dx, dy in disp]

        cap: dict[str, int | float] = {}
        for v in reversed(inst.order):
            c = inst.terminals[v].limit if v in inst.terminals else INF
            for w in inst.children[v]:
                c = min(c, cap[w])
            cap[v] = c
        self.cap = cap

        self.edge_len: dict[str, np.ndarray] = {}
        self.lo: dict[str, int] = {inst.root: 0}
        hi: dict[str, int] = {inst.root: 0}
        for v in inst.order:
            cv = self.candidates[v]
            for w in inst.children[v]:
                cw = self.candidates[w]
                e = np.array([[a.l1(b) for b in cw] for a in cv], dtype=np.int64)
                if e.size and int(e.max()) >= _INF >> 4:
                    raise ValueError("coordinates too large for the dynamic program")
                self.edge_len[w] = e
                self.lo[w] = self.lo[v] + int(e.min())
                hi[w] = hi[v] + int(e.max())
        self.hi = hi
        self.top = {v: (None if cap[v] == INF else min(hi[v], cap[v])) for v in inst.vertices}

        self.tables: dict[str, np.ndarray] = {}
        for v in reversed(inst.order):
            self.tables[v] = self._build(v)

    # -- construction ------------------------------------------------------

    def _lams(self, v: str) -> np.ndarray | None:
        top = self.top[v]
        if top is None:
            return None
        return np.arange(self.lo[v], top + 1, dtype=np.int64)

    def _build(self, v: str) -> np.ndarray:
        inst = self.instance
        lams = self._lams(v)
        width = 1 if lams is None else max(len(lams), 0)
        nv = len(self.candidates[v])
        table = np.zeros((nv, width), dtype=np.int64)
        if v in inst.terminals and lams is not None:
            table[:, lams > inst.terminals[v].limit] = _INF
        for w in inst.children[v]:
            table = np.minimum(table + self._child_best(v, w, lams, width), _INF)
        return table

    def _child_best(self, v: str, w: str, lams: np.ndarray | None, width: int) -> np.ndarray:
        """min over the child's displacement of ``e + gamma(w, d', lam + e)``."""
        e = self.edge_len[w]  # (nv, nw)
        tw = self.tables[w]
        if self.top[w] is None:
            vals = e + tw[:, 0][None, :]
            return np.minimum(vals.min(axis=1), _INF)[:, None] * np.ones((1, width), dtype=np.int64)
        # w restricted implies v restricted, so lams is an array here
        ww = tw.shape[1]
        if ww == 0:
            return np.full((e.shape[0], width), _INF, dtype=np.int64)
        idx = lams[None, None, :] + e[:, :, None] - self.lo[w]
        inside = idx < ww
        rows = np.arange(e.shape[1])[None, :, None]
        gathered = tw[rows, np.minimum(idx, ww - 1)]
        vals = np.where(inside, gathered, _INF) + e[:, :, None]
        return np.minimum(vals.min(axis=1), _INF)

    # -- queries -----------------------------------------------------------

    def _lookup(self, v: str, row: int, lam: int) -> np.int64:
        top = self.top[v]
        table = self.tables[v]
        if top is None:
            return table[row, 0]
        if lam > self.cap[v]:
            return _INF
        if self.lo[v] <= lam <= top:
            return table[row, lam - self.lo[v]]
        # outside the tabulated range: only reachable from direct queries
        inst = self.instance
        if v in inst.terminals and lam > inst.terminals[v].limit:
            return _INF
        total = np.int64(0)
        for w in inst.children[v]:
            e = self.edge_len[w][row]
            best = min(e[j] + self._lookup(w, j, lam + int(e[j])) for j in range(len(e)))
            total = min(total + best, _INF)
        return total

    def _row(self, v: str, delta: tuple[int, int]) -> int | None:
        if delta not in self._disp:
            raise ValueError(f"displacement {delta} is not in {{-s, 0, s}}^2 for s={self.view.step}")
        if v in self.instance.terminals:
            return 0 if delta == (0, 0) else None
        return self._disp.index(delta)

    def gamma(self, v: str, delta: tuple[int, int], lam: int) -> int | float:
        row = self._row(v, tuple(delta))
        if row is None:
            return math.inf
        return _to_public(self._lookup(v, row, lam))

    def value(self) -> int | float:
        return self.gamma(self.instance.root, (0, 0), 0)

    def lambda_span(self, v: str) -> tuple[int, int]:
        """Reachable interval of consumed budget at ``v`` (before truncation)."""
        return self.lo[v], self.hi[v]

    def reconstruct(self) -> Embedding:
        """Argmin embedding for ``gamma(root, 0, 0)``; ties prefer no move."""
        inst = self.instance
        if self.value() == math.inf:
            raise InfeasibleError("no feasible displacement exists")
        pos = {inst.root: self.candidates[inst.root][0]}
        stack = [(inst.root, 0, 0)]
        while stack:
            v, row, lam = stack.pop()
            for w in inst.children[v]:
                e = self.edge_len[w][row]
                best_j, best = 0, None
                for j in range(len(e)):
                    val = e[j] + self._lookup(w, j, lam + int(e[j]))
                    if best is None or val < best:
                        best_j, best = j, val
                pos[w] = self.candidates[w][best_j]
                stack.append((w, best_j, lam + int(e[best_j])))
        return Embedding(pos)


def gamma(ctx: DpContext, v: str, delta: tuple[int, int], lam: int) -> int | float:
    return ctx.gamma(v, delta, lam)


def improve_round(view: EvalContext, emb: Embedding) -> tuple[Embedding, int]:
    """Cheapest feasible embedding within one step of ``emb`` (per axis)."""
    if not is_feasible(view.instance, emb):
        raise InfeasibleError("improve_round needs a feasible starting embedding")
    ctx = DpContext(view, emb)
    return ctx.reconstruct(), int(ctx.value())


def local_search(
    view: EvalContext, emb: Embedding, max_rounds: int | None = None
) -> tuple[Embedding, int]:
    """Repeat :func:`improve_round` until the cost stops decreasing.

    Returns the final embedding and the number of rounds run, including the
    last one that certified no further improvement.
    """
    current = cost(view.instance, emb)
    rounds = 0
    while max_rounds is None or rounds < max_rounds:
        rounds += 1
        new, value = improve_round(view, emb)
        if value >= current:
            break
        emb, current = new, value
    return emb, rounds
