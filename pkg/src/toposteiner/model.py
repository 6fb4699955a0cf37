"""Instances, embeddings and exact length evaluation.

Every coordinate and every length is an ``int`` in half-units: the stored value
``x2`` stands for the real coordinate ``x2 / 2``.  Instances read from disk are
integral, so their terminal coordinates and finite limits are even.  Optimal
embeddings of integral instances can always be chosen half-integral, which is
why nothing in this package ever needs a float or a fraction.

Missing length restrictions are represented by :data:`INF` (``math.inf``), which
compares and saturates correctly against ints.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple

from .errors import InstanceError

INF = math.inf

#: Coordinates must satisfy ``abs(x2) < COORD_LIMIT`` so that sums over a tree
#: stay well inside a signed 64-bit range.
COORD_LIMIT = 1 << 61


class HalfPoint(NamedTuple):
    x2: int
    y2: int

    @classmethod
    def from_real(cls, x: int, y: int) -> "HalfPoint":
        return cls(2 * x, 2 * y)

    def l1(self, other: "HalfPoint") -> int:
        return abs(self.x2 - other.x2) + abs(self.y2 - other.y2)

    def shifted(self, dx2: int, dy2: int) -> "HalfPoint":
        return HalfPoint(self.x2 + dx2, self.y2 + dy2)

    def real(self) -> tuple[float, float]:
        return (self.x2 / 2, self.y2 / 2)


class Terminal(NamedTuple):
    position: HalfPoint
    limit: int | float = INF


class Violation(NamedTuple):
    kind: str
    where: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    feasible: bool
    violations: tuple[Violation, ...] = ()

    def messages(self) -> list[str]:
        return [f"{v.kind} [{v.where}]: {v.message}" for v in self.violations]


@dataclass(frozen=True)
class Instance:
    """A fixed tree topology with pinned terminals and root-path length limits.

    ``terminals`` maps terminal id to :class:`Terminal` (position and limit in
    half-units).  Vertex ids are strings; all derived orders are sorted by id.
    The constructor rejects dangling references but not cycles or parity
    problems; those are reported by :func:`validate_instance`.
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    root: str
    terminals: Mapping[str, Terminal]
    name: str = ""

    def __post_init__(self):
        verts = tuple(self.vertices)
        if len(set(verts)) != len(verts):
            dup = sorted(v for v in set(verts) if verts.count(v) > 1)
            raise InstanceError(f"duplicate vertex ids: {dup}")
        vset = set(verts)
        edges = []
        for a, b in self.edges:
            for end in (a, b):
                if end not in vset:
                    raise InstanceError(f"edge ({a}, {b}) references unknown vertex {end!r}")
            edges.append((a, b) if a <= b else (b, a))
        terms = {}
        for t in sorted(self.terminals):
            if t not in vset:
                raise InstanceError(f"terminal {t!r} is not a vertex")
            term = self.terminals[t]
            if not isinstance(term, Terminal):
                term = Terminal(HalfPoint(*term[0]), term[1])
            terms[t] = term
        if self.root not in vset:
            raise InstanceError(f"root {self.root!r} is not a vertex")
        object.__setattr__(self, "vertices", tuple(sorted(verts)))
        object.__setattr__(self, "edges", tuple(sorted(edges)))
        object.__setattr__(self, "terminals", terms)

    @classmethod
    def from_real(
        cls,
        edges: Iterable[tuple[str, str]],
        root: str,
        terminals: Mapping[str, tuple[int, int]],
        limits: Mapping[str, int] | None = None,
        name: str = "",
    ) -> "Instance":
        """Build an integral instance from real-unit coordinates and limits."""
        edges = [tuple(e) for e in edges]
        verts = sorted({v for e in edges for v in e} | set(terminals) | {root})
        limits = limits or {}
        terms = {
            t: Terminal(HalfPoint.from_real(*xy), 2 * limits[t] if limits.get(t) is not None else INF)
            for t, xy in terminals.items()
        }
        return cls(tuple(verts), tuple(edges), root, terms, name)

    def with_terminals(self, terminals: Mapping[str, Terminal]) -> "Instance":
        return replace(self, terminals=dict(terminals))

    def with_limits(self, limits: Mapping[str, int | float]) -> "Instance":
        """Copy with limits (half-units) replaced for the given terminals."""
        terms = dict(self.terminals)
        for t, lim in limits.items():
            terms[t] = terms[t]._replace(limit=lim)
        return self.with_terminals(terms)

    # -- topology --------------------------------------------------------

    def is_terminal(self, v: str) -> bool:
        return v in self.terminals

    @cached_property
    def steiner_points(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if v not in self.terminals)

    @cached_property
    def adjacency(self) -> dict[str, tuple[str, ...]]:
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return {v: tuple(sorted(ns)) for v, ns in adj.items()}

    @cached_property
    def tree_problem(self) -> str | None:
        """Reason why the edges do not form a spanning tree, or None."""
        n = len(self.vertices)
        if any(a == b for a, b in self.edges):
            return "self-loop"
        if len(set(self.edges)) != len(self.edges):
            return "parallel edges"
        if len(self.edges) != n - 1:
            return f"{len(self.edges)} edges for {n} vertices (a tree needs {n - 1})"
        seen = {self.root}
        queue = deque([self.root])
        while queue:
            v = queue.popleft()
            for w in self.adjacency[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        if len(seen) != n:
            return "edges do not connect all vertices (cycle or disconnected part)"
        return None

    def require_tree(self) -> None:
        if self.tree_problem is not None:
            raise InstanceError(f"not a tree: {self.tree_problem}")

    @cached_property
    def _arborescence(self):
        self.require_tree()
        parent: dict[str, str | None] = {self.root: None}
        order = [self.root]
        queue = deque([self.root])
        while queue:
            v = queue.popleft()
            for w in self.adjacency[v]:
                if w not in parent:
                    parent[w] = v
                    order.append(w)
                    queue.append(w)
        children = {v: [] for v in self.vertices}
        for v in order[1:]:
            children[parent[v]].append(v)
        return parent, {v: tuple(cs) for v, cs in children.items()}, tuple(order)

    @property
    def parent(self) -> dict[str, str | None]:
        """Parent of each vertex in the tree oriented away from the root."""
        return self._arborescence[0]

    @property
    def children(self) -> dict[str, tuple[str, ...]]:
        return self._arborescence[1]

    @property
    def order(self) -> tuple[str, ...]:
        """Vertices in breadth-first order from the root (parents first)."""
        return self._arborescence[2]

    def root_path(self, v: str) -> list[str]:
        """Vertices of the unique root-``v`` path, root first."""
        path = [v]
        parent = self.parent
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        path.reverse()
        return path

    @cached_property
    def subtree_terminals(self) -> dict[str, frozenset[str]]:
        out: dict[str, frozenset[str]] = {}
        for v in reversed(self.order):
            acc = {v} if v in self.terminals else set()
            for w in self.children[v]:
                acc |= out[w]
            out[v] = frozenset(acc)
        return out

    @property
    def root_position(self) -> HalfPoint:
        return self.terminals[self.root].position

    def relative(self, p: HalfPoint) -> HalfPoint:
        r = self.root_position
        return HalfPoint(p.x2 - r.x2, p.y2 - r.y2)


@dataclass(frozen=True)
class Embedding:
    """Vertex id -> :class:`HalfPoint`.  Terminals must sit on their pins."""

    positions: Mapping[str, HalfPoint] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "positions", {v: HalfPoint(*self.positions[v]) for v in sorted(self.positions)}
        )

    def __getitem__(self, v: str) -> HalfPoint:
        return self.positions[v]

    def __len__(self) -> int:
        return len(self.positions)

    def updated(self, changes: Mapping[str, HalfPoint]) -> "Embedding":
        pos = dict(self.positions)
        pos.update(changes)
        return Embedding(pos)


def embedding_problems(inst: Instance, emb: Embedding) -> list[str]:
    problems = []
    if set(emb.positions) != set(inst.vertices):
        missing = sorted(set(inst.vertices) - set(emb.positions))
        extra = sorted(set(emb.positions) - set(inst.vertices))
        problems.append(f"domain mismatch (missing {missing}, extra {extra})")
    for t, term in inst.terminals.items():
        if t in emb.positions and emb[t] != term.position:
            problems.append(f"terminal {t} at {tuple(emb[t])}, pinned to {tuple(term.position)}")
    for v, p in emb.positions.items():
        if abs(p.x2) >= COORD_LIMIT or abs(p.y2) >= COORD_LIMIT:
            problems.append(f"vertex {v} coordinate out of range")
    return problems


def check_embedding(inst: Instance, emb: Embedding) -> None:
    problems = embedding_problems(inst, emb)
    if problems:
        raise ValueError("invalid embedding: " + "; ".join(problems))


def cost(inst: Instance, emb: Embedding) -> int:
    """Total L1 length of the tree, in half-units."""
    pos = emb.positions
    return sum(pos[a].l1(pos[b]) for a, b in inst.edges)


def vertex_depths(inst: Instance, emb: Embedding) -> dict[str, int]:
    """Length of the root-v path for every vertex v."""
    pos = emb.positions
    depth = {inst.root: 0}
    for v in inst.order[1:]:
        u = inst.parent[v]
        depth[v] = depth[u] + pos[u].l1(pos[v])
    return depth


def path_lengths(inst: Instance, emb: Embedding) -> dict[str, int]:
    """Root-terminal path length for every terminal, in half-units."""
    depth = vertex_depths(inst, emb)
    return {t: depth[t] for t in inst.terminals}


def violations(inst: Instance, emb: Embedding, lengths: Mapping[str, int] | None = None) -> dict[str, int]:
    """Terminals whose path exceeds the limit, mapped to the excess."""
    lengths = path_lengths(inst, emb) if lengths is None else lengths
    out = {}
    for t, term in inst.terminals.items():
        if lengths[t] > term.limit:
            out[t] = lengths[t] - term.limit
    return out


def is_feasible(inst: Instance, emb: Embedding, lengths: Mapping[str, int] | None = None) -> bool:
    return not violations(inst, emb, lengths)


def extended_restrictions(inst: Instance, emb: Embedding) -> dict[str, int | float]:
    """Push limits up the tree: a vertex inherits the tightest child slack.

    ``l(v) = min over children w of l(w) - |pi(v) - pi(w)|``; a terminal also
    keeps its own limit.  Vertices without restricted descendants get INF.
    """
    pos = emb.positions
    ext: dict[str, int | float] = {}
    for v in reversed(inst.order):
        lim = inst.terminals[v].limit if v in inst.terminals else INF
        for w in inst.children[v]:
            lim = min(lim, ext[w] - pos[v].l1(pos[w]))
        ext[v] = lim
    return ext


def bounding_box(inst: Instance) -> tuple[int, int, int, int]:
    """(xmin2, ymin2, xmax2, ymax2) over all terminal positions."""
    xs = [t.position.x2 for t in inst.terminals.values()]
    ys = [t.position.y2 for t in inst.terminals.values()]
    return min(xs), min(ys), max(xs), max(ys)


def clamp_to_bbox(inst: Instance, emb: Embedding) -> Embedding:
    """Clamp every Steiner point into the terminal bounding box.

    Clamping each coordinate separately never increases any edge length, so
    neither the cost nor any root path grows.
    """
    x0, y0, x1, y1 = bounding_box(inst)
    pos = dict(emb.positions)
    for v in inst.steiner_points:
        p = pos[v]
        pos[v] = HalfPoint(min(max(p.x2, x0), x1), min(max(p.y2, y0), y1))
    return Embedding(pos)


def trivial_embedding(inst: Instance) -> Embedding:
    """Every Steiner point on its nearest terminal ancestor.

    When all terminals are leaves this puts every Steiner point on the root,
    and each root path is then as short as the terminal positions allow.
    """
    pos = {}
    for v in inst.order:
        if v in inst.terminals:
            pos[v] = inst.terminals[v].position
        else:
            pos[v] = pos[inst.parent[v]]
    return Embedding(pos)


def validate_instance(inst: Instance) -> ValidationReport:
    found: list[Violation] = []
    problem = inst.tree_problem
    if problem is not None:
        found.append(Violation("tree", "edges", problem))
    if inst.root not in inst.terminals:
        found.append(Violation("root", inst.root, "root must be a terminal"))
    for t, term in inst.terminals.items():
        p = term.position
        if p.x2 % 2 or p.y2 % 2:
            found.append(Violation("parity", t, f"position {p.real()} is not integral"))
        if abs(p.x2) >= COORD_LIMIT or abs(p.y2) >= COORD_LIMIT:
            found.append(Violation("range", t, "coordinate magnitude too large"))
        lim = term.limit
        if lim != INF:
            if not isinstance(lim, int) or lim < 0:
                found.append(Violation("limit", t, f"limit {lim!r} must be a nonnegative integer"))
            elif lim % 2:
                found.append(Violation("parity", t, f"limit {lim / 2} is not integral"))
    ok = not found
    feasible = False
    if ok:
        triv = trivial_embedding(inst)
        lengths = path_lengths(inst, triv)
        for t, excess in violations(inst, triv, lengths).items():
            found.append(
                Violation(
                    "infeasible",
                    t,
                    f"shortest possible root path {lengths[t] / 2} exceeds limit {inst.terminals[t].limit / 2}",
                )
            )
        feasible = not found
    return ValidationReport(ok=ok, feasible=feasible, violations=tuple(found))


# -- topology normalization ------------------------------------------------


@dataclass(frozen=True)
class Normalized:
    """Result of :func:`normalize_topology`.

    ``origin`` maps each added vertex to the original vertex it stands in for;
    ``removed`` maps each dropped Steiner point (degree 1 or 2) to the original
    vertex whose position it takes when collapsing back.
    """

    instance: Instance
    original: Instance
    origin: Mapping[str, str]
    removed: Mapping[str, str]


def _fresh(base: str, taken: set[str]) -> str:
    i = 0
    while True:
        cand = f"{base}#{i}"
        if cand not in taken:
            taken.add(cand)
            return cand
        i += 1


def normalize_topology(inst: Instance) -> Normalized:
    """Make every terminal a leaf and every Steiner point degree 3.

    Steiner points of degree 1 or 2 are dropped (their neighbours are joined),
    a terminal of degree >= 2 hands its edges to a new hub Steiner point and
    hangs off it, and Steiner points of degree > 3 are split into a chain of
    degree-3 copies.  The added edges have length zero in matched embeddings.
    """
    report = validate_instance(inst)
    structural = [v for v in report.violations if v.kind != "infeasible"]
    if structural:
        raise InstanceError("cannot normalize invalid instance: " + structural[0].message)

    adj = {v: set(ns) for v, ns in inst.adjacency.items()}
    parent = inst.parent
    terminals = inst.terminals
    removed: dict[str, str] = {}
    origin: dict[str, str] = {}
    taken = set(inst.vertices)

    def drop(v):
        for w in adj.pop(v):
            adj[w].discard(v)

    changed = True
    while changed:
        changed = False
        for v in sorted(adj):
            if v in terminals or v not in adj:
                continue
            deg = len(adj[v])
            if deg <= 1:
                removed[v] = parent[v]
                drop(v)
                changed = True
            elif deg == 2:
                a, b = sorted(adj[v])
                removed[v] = parent[v]
                drop(v)
                adj[a].add(b)
                adj[b].add(a)
                changed = True

    for t in sorted(terminals):
        if len(adj[t]) >= 2:
            hub = _fresh(t, taken)
            origin[hub] = t
            nbrs = adj[t]
            adj[hub] = set(nbrs) | {t}
            for w in nbrs:
                adj[w].discard(t)
                adj[w].add(hub)
            adj[t] = {hub}

    def link(a, b):
        adj[a].add(b)
        adj[b].add(a)

    for v in sorted(adj):
        if v in terminals or len(adj[v]) <= 3:
            continue
        up = parent.get(v)
        nbrs = sorted(adj[v], key=lambda w: (w != up, w))
        for w in nbrs:
            adj[w].discard(v)
        adj[v] = set()
        link(v, nbrs[0])
        link(v, nbrs[1])
        cur, rest = v, nbrs[2:]
        while rest:
            nxt = _fresh(v, taken)
            origin[nxt] = origin.get(v, v)
            adj[nxt] = set()
            link(cur, nxt)
            link(nxt, rest.pop(0))
            if len(rest) == 1:
                link(nxt, rest.pop())
            cur = nxt

    edges = sorted({(a, b) if a < b else (b, a) for a, ns in adj.items() for b in ns})
    new = Instance(tuple(adj), tuple(edges), inst.root, dict(terminals), inst.name)
    if not origin and not removed:
        new = inst
    return Normalized(instance=new, original=inst, origin=origin, removed=removed)


def expand_embedding(norm: Normalized, emb: Embedding) -> Embedding:
    """Matched embedding of the normalized instance for an original embedding."""
    pos = {v: emb[v] for v in norm.instance.vertices if v not in norm.origin}
    for v, o in norm.origin.items():
        pos[v] = emb[o]
    return Embedding(pos)


def collapse_embedding(norm: Normalized, emb: Embedding) -> Embedding:
    """Project an embedding of the normalized instance back to the original.

    Every added vertex must coincide with the vertex it stands in for (so the
    added edges have length zero); dropped Steiner points are placed on the
    vertex recorded for them, which leaves all lengths unchanged.
    """
    for v, o in norm.origin.items():
        if emb[v] != emb[o]:
            raise ValueError(f"added vertex {v} does not coincide with {o}")
    pos = {v: emb[v] for v in norm.original.vertices if v in emb.positions}

    def place(v):
        if v not in pos:
            pos[v] = place(norm.removed[v])
        return pos[v]

    for v in norm.original.vertices:
        place(v)
    return Embedding(pos)
