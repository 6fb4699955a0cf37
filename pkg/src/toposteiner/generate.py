"""Seeded random instances."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .model import INF, HalfPoint, Instance, Terminal


@dataclass(frozen=True)
class GenSpec:
    n_terminals: int
    coord_range: int
    restricted_fraction: Fraction | float = 0
    slack: int = 0
    seed: int = 0
    name: str | None = None

    def __post_init__(self):
        if self.n_terminals < 2:
            raise ValueError("need at least two terminals (root included)")
        if self.coord_range < 0 or self.slack < 0:
            raise ValueError("coord_range and slack must be nonnegative")
        if not 0 <= self.restricted_fraction <= 1:
            raise ValueError("restricted_fraction must lie in [0, 1]")


def gen_random(spec: GenSpec) -> Instance:
    """Random instance with a binary topology and always-satisfiable limits.

    Terminals are uniform on the integer square ``[-R, R]^2``.  The non-root
    terminals are merged pairwise in random order under fresh Steiner points;
    the root hangs off the last one, so every Steiner point has degree 3 and
    every terminal is a leaf.  A restricted terminal gets
    ``|p(t) - p(r)|_1 + uniform{0..slack}``, which the all-at-root embedding
    meets.
    """
    rng = random.Random(spec.seed)
    R = spec.coord_range
    n = spec.n_terminals
    ids = ["r"] + [f"t{i}" for i in range(1, n)]
    pos = {t: HalfPoint.from_real(rng.randint(-R, R), rng.randint(-R, R)) for t in ids}

    edges = []
    nodes = ids[1:]
    count = 0
    while len(nodes) > 1:
        i, j = sorted(rng.sample(range(len(nodes)), 2))
        count += 1
        s = f"s{count}"
        edges += [(s, nodes[i]), (s, nodes[j])]
        nodes = [v for k, v in enumerate(nodes) if k not in (i, j)] + [s]
    edges.append(("r", nodes[0]))

    frac = Fraction(spec.restricted_fraction).limit_denominator(10**6)
    terms = {"r": Terminal(pos["r"], INF)}
    for t in ids[1:]:
        if rng.random() < frac:
            terms[t] = Terminal(pos[t], pos[t].l1(pos["r"]) + 2 * rng.randint(0, spec.slack))
        else:
            terms[t] = Terminal(pos[t], INF)
    verts = tuple(ids + [f"s{k}" for k in range(1, count + 1)])
    name = spec.name if spec.name is not None else f"rand-n{n}-R{R}-seed{spec.seed}"
    return Instance(verts, tuple(edges), "r", terms, name)
