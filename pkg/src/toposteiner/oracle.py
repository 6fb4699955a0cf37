"""Exhaustive ground truth for small instances.

Some optimal embedding of an integral instance is half-integral, and clamping
Steiner points into the terminal bounding box never makes anything longer.
So the minimum over all assignments of Steiner points to half-unit grid
points inside the bounding box is the true optimum.

Two exact evaluators cover that finite search space:

``enumerate``
    Plain product over all assignments, evaluated in vectorized chunks.  Ties
    go to the lexicographically smallest position vector (Steiner points in
    id order).
``grid-dp``
    Tree recursion over absolute grid positions and consumed path budget;
    visits the same search space without pruning, in time polynomial in the
    grid size.  Used when enumeration would exceed its budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BudgetExceeded, InfeasibleError, InstanceError
from .model import INF, Embedding, HalfPoint, Instance, bounding_box, validate_instance

_BIG = np.int64(1 << 60)
_CHUNK = 1 << 18


@dataclass(frozen=True)
class OracleBudget:
    max_placements: int = 10_000_000
    max_dp_cells: int = 400_000_000

    def __post_init__(self):
        if self.max_placements < 1 or self.max_dp_cells < 1:
            raise ValueError("oracle budgets must be positive")


class OracleResult(NamedTuple):
    cost: int
    embedding: Embedding
    method: str


def enumerate_grid(inst: Instance, unit: int = 1) -> list[HalfPoint]:
    """Grid points ``unit`` half-units apart covering the terminal bounding box."""
    if unit < 1:
        raise ValueError("unit must be >= 1")
    x0, y0, x1, y1 = bounding_box(inst)
    return [HalfPoint(x, y) for x in range(x0, x1 + 1, unit) for y in range(y0, y1 + 1, unit)]


def _check(inst: Instance) -> None:
    report = validate_instance(inst)
    if not report.ok:
        raise InstanceError("; ".join(report.messages()))
    if not report.feasible:
        raise InfeasibleError("instance is infeasible", report)


def brute_force_optimum(
    inst: Instance,
    budget: OracleBudget | None = None,
    method: str = "auto",
    unit: int = 1,
) -> OracleResult:
    """Exact minimum-cost feasible embedding over the bounding-box grid.

    ``method`` is ``"enumerate"``, ``"grid-dp"`` or ``"auto"`` (enumerate when
    within ``max_placements``, otherwise grid-dp).  Raises
    :class:`BudgetExceeded` when the chosen method is over budget.
    """
    budget = budget or OracleBudget()
    if method not in ("auto", "enumerate", "grid-dp"):
        raise ValueError(f"unknown oracle method {method!r}")
    _check(inst)
    grid = enumerate_grid(inst, unit)
    placements = len(grid) ** len(inst.steiner_points)
    if method == "enumerate" or (method == "auto" and placements <= budget.max_placements):
        if placements > budget.max_placements:
            raise BudgetExceeded(
                f"{len(grid)}^{len(inst.steiner_points)} = {placements} placements > {budget.max_placements}"
            )
        return _enumerate(inst, grid)
    cells = _dp_cells(inst, grid)
    if cells > budget.max_dp_cells:
        raise BudgetExceeded(f"grid dp needs {cells} cells > {budget.max_dp_cells}")
    return _grid_dp(inst, grid)


def _enumerate(inst: Instance, grid: list[HalfPoint]) -> OracleResult:
    steiner = list(inst.steiner_points)
    k = len(steiner)
    gx = np.array([p.x2 for p in grid], dtype=np.int64)
    gy = np.array([p.y2 for p in grid], dtype=np.int64)
    n = len(grid)
    total = n**k
    restricted = [(t, term.limit) for t, term in inst.terminals.items() if term.limit != INF]
    slot = {v: i for i, v in enumerate(steiner)}

    best_cost, best_index = None, None
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        digits = np.unravel_index(idx, (n,) * k) if k else ()
        xs, ys = {}, {}
        for v in inst.vertices:
            if v in slot:
                xs[v], ys[v] = gx[digits[slot[v]]], gy[digits[slot[v]]]
            else:
                p = inst.terminals[v].position
                xs[v], ys[v] = np.int64(p.x2), np.int64(p.y2)
        depth = {inst.root: np.zeros(len(idx), dtype=np.int64)}
        total_len = np.zeros(len(idx), dtype=np.int64)
        for v in inst.order[1:]:
            u = inst.parent[v]
            e = np.abs(xs[u] - xs[v]) + np.abs(ys[u] - ys[v])
            depth[v] = depth[u] + e
            total_len = total_len + e
        ok = np.ones(len(idx), dtype=bool)
        for t, lim in restricted:
            ok &= depth[t] <= lim
        if not ok.any():
            continue
        masked = np.where(ok, total_len, _BIG)
        i = int(np.argmin(masked))
        if best_cost is None or masked[i] < best_cost:
            best_cost, best_index = int(masked[i]), int(idx[i])

    if best_cost is None:
        raise InfeasibleError("no feasible placement on the grid")
    choice = np.unravel_index(best_index, (n,) * k) if k else ()
    pos = {t: term.position for t, term in inst.terminals.items()}
    for v, d in zip(steiner, choice):
        pos[v] = grid[int(d)]
    return OracleResult(best_cost, Embedding(pos), "enumerate")


def _caps(inst: Instance) -> dict[str, int | float]:
    cap: dict[str, int | float] = {}
    for v in reversed(inst.order):
        c = inst.terminals[v].limit if v in inst.terminals else INF
        for w in inst.children[v]:
            c = min(c, cap[w])
        cap[v] = c
    return cap


def _dp_cells(inst: Instance, grid: list[HalfPoint]) -> int:
    cap = _caps(inst)
    size = {v: 1 if v in inst.terminals else len(grid) for v in inst.vertices}
    cells = 0
    for v in inst.vertices:
        width = 1 if cap[v] == INF else int(cap[v]) + 1
        for w in inst.children[v]:
            cells += size[v] * size[w] * width
    return cells


def _grid_dp(inst: Instance, grid: list[HalfPoint]) -> OracleResult:
    cap = _caps(inst)
    gx = np.array([p.x2 for p in grid], dtype=np.int64)
    gy = np.array([p.y2 for p in grid], dtype=np.int64)

    def coords(v):
        if v in inst.terminals:
            p = inst.terminals[v].position
            return np.array([p.x2], dtype=np.int64), np.array([p.y2], dtype=np.int64)
        return gx, gy

    # table[v][p, lam]: cheapest subtree of v with v at candidate p after a
    # root path of length lam; lam runs over 0..cap[v] (one column if no cap)
    table: dict[str, np.ndarray] = {}
    dist: dict[str, np.ndarray] = {}
    for v in reversed(inst.order):
        vx, vy = coords(v)
        width = 1 if cap[v] == INF else int(cap[v]) + 1
        tv = np.zeros((len(vx), width), dtype=np.int64)
        for w in inst.children[v]:
            wx, wy = coords(w)
            d = np.abs(vx[:, None] - wx[None, :]) + np.abs(vy[:, None] - wy[None, :])
            dist[w] = d
            tw = table[w]
            if cap[w] == INF:
                best = (d + tw[None, :, 0]).min(axis=1)[:, None]
            else:
                best = np.empty((len(vx), width), dtype=np.int64)
                cols = np.arange(len(wx))[None, :]
                for lam in range(width):
                    reach = lam + d
                    vals = np.where(reach <= cap[w], tw[cols, np.minimum(reach, int(cap[w]))], _BIG)
                    best[:, lam] = np.minimum(vals + d, _BIG).min(axis=1)
            tv = np.minimum(tv + best, _BIG)
        table[v] = tv

    value = int(table[inst.root][0, 0])
    if value >= _BIG:
        raise InfeasibleError("no feasible placement on the grid")

    pos = {inst.root: inst.terminals[inst.root].position}
    stack = [(inst.root, 0, 0)]
    while stack:
        v, p, lam = stack.pop()
        for w in inst.children[v]:
            d = dist[w][p]
            tw = table[w]
            if cap[w] == INF:
                vals = d + tw[:, 0]
            else:
                reach = lam + d
                vals = np.where(reach <= cap[w], tw[np.arange(len(d)), np.minimum(reach, int(cap[w]))], _BIG) + d
            q = int(np.argmin(vals))
            wx, wy = coords(w)
            pos[w] = HalfPoint(int(wx[q]), int(wy[q]))
            stack.append((w, q, lam + int(d[q])))
    return OracleResult(value, Embedding(pos), "grid-dp")
