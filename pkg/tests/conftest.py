from __future__ import annotations

import random
from fractions import Fraction

import pytest

from toposteiner import GenSpec, gen_random
from toposteiner.model import Embedding, HalfPoint, Instance

F1_EDGES = [
    ("r", "b1"), ("b1", "a2"), ("b1", "b4"), ("b4", "b3"), ("b3", "b2"), ("b2", "a3"),
    ("b2", "t1"), ("b3", "a4"), ("b4", "b5"), ("b5", "t2"), ("b5", "a5"),
]
F1_TERMINALS = {"r": (0, 3), "a2": (0, 0), "a3": (2, 0), "a4": (2, 1), "a5": (3, 0), "t1": (1, 0), "t2": (3, 3)}
# Steiner positions in half-units for the restricted optimum drawn with the instance
F1_OPT = {"b1": (0, 3), "b2": (3, 0), "b3": (3, 2), "b4": (3, 3), "b5": (6, 3)}

F2_EDGES = [
    ("r", "s22"), ("t1", "s22"), ("s22", "s24"), ("t2", "s24"), ("s24", "s14"), ("t3", "s14"),
    ("s14", "s21"), ("s21", "s15"), ("s15", "t4"), ("s15", "a"), ("s21", "s23"), ("s23", "s16"),
    ("s23", "t12"), ("b", "s16"), ("s16", "s17"), ("s17", "t7"), ("s17", "s18"), ("s18", "t8"),
    ("s18", "s19"), ("s19", "t9"), ("s19", "s25"), ("s20", "s25"), ("s25", "t13"), ("s20", "t10"),
    ("s20", "c"),
]
F2_TERMINALS = {
    "r": (0, 0), "t1": (0, 4), "t2": (1, 5), "t3": (2, 6), "t4": (6, 7), "a": (3, 7), "b": (3, 1),
    "t7": (4, -1), "t8": (7, -1), "t9": (9, -1), "t10": (9, 2), "c": (7, 2), "t12": (6, 2), "t13": (10, 1),
}
F2_LIMITS = {"a": 10, "b": 11, "c": 20}
# restricted optimum, real coordinates
F2_OPT = {
    "s14": (2, 4.5), "s15": (3, 7), "s16": (3, 1), "s17": (4, -1), "s18": (7, -1), "s19": (7, -1),
    "s20": (7, 2), "s21": (3, 4.5), "s22": (0, 4), "s23": (3, 2), "s24": (1, 4.5), "s25": (7, 1),
}

F3_EDGES = [
    ("r", "s2"), ("s2", "t3"), ("s2", "s3"), ("s3", "s1"), ("s1", "t1"), ("s1", "t2"),
    ("s3", "s4"), ("s4", "t6"), ("s4", "s5"), ("s5", "t4"), ("s5", "t5"),
]
F3_TERMINALS = {"r": (2, 1), "t1": (0, 2), "t2": (1, 5), "t3": (4, 0), "t4": (5, 4), "t5": (7, 5), "t6": (8, 1)}
F3_STEINER = {"s1": (1, 3), "s2": (4, 1), "s3": (4, 3), "s4": (6, 3), "s5": (6, 4)}


def f1(restricted: bool = True) -> Instance:
    limits = {"t1": 5, "t2": 6} if restricted else {}
    return Instance.from_real(F1_EDGES, "r", F1_TERMINALS, limits, name="f1" if restricted else "f1-unrestricted")


def f1_opt(inst: Instance) -> Embedding:
    pos = {t: term.position for t, term in inst.terminals.items()}
    pos.update({v: HalfPoint(*p) for v, p in F1_OPT.items()})
    return Embedding(pos)


def f2(restricted: bool = True) -> Instance:
    limits = F2_LIMITS if restricted else {}
    return Instance.from_real(F2_EDGES, "r", F2_TERMINALS, limits, name="f2" if restricted else "f2-unrestricted")


def f2_opt(inst: Instance) -> Embedding:
    pos = {t: term.position for t, term in inst.terminals.items()}
    pos.update({v: HalfPoint(round(2 * x), round(2 * y)) for v, (x, y) in F2_OPT.items()})
    return Embedding(pos)


def f3() -> tuple[Instance, Embedding]:
    inst = Instance.from_real(F3_EDGES, "r", F3_TERMINALS, {}, name="f3")
    pos = {t: term.position for t, term in inst.terminals.items()}
    pos.update({v: HalfPoint.from_real(*p) for v, p in F3_STEINER.items()})
    return inst, Embedding(pos)


def random_instance(seed: int, max_terminals: int = 6, coord_range: int = 3) -> Instance:
    """Small mixed-limit instance from the seeded generator (at most 4 Steiner points)."""
    rng = random.Random(seed)
    spec = GenSpec(
        n_terminals=rng.randint(2, max_terminals),
        coord_range=coord_range,
        restricted_fraction=Fraction(rng.choice([0, 1, 2, 3, 4]), 4),
        slack=rng.choice([0, 1, 2]),
        seed=seed,
    )
    return gen_random(spec)


def random_embedding(inst: Instance, rng: random.Random, spread: int = 8, lattice: int = 1) -> Embedding:
    """Steiner points at random half-unit positions; ``lattice`` snaps to a coarser grid
    so that coincident coordinates (hence nontrivial components) are common."""
    pos = {t: term.position for t, term in inst.terminals.items()}
    for v in inst.steiner_points:
        pos[v] = HalfPoint(
            lattice * rng.randint(-spread // lattice, spread // lattice),
            lattice * rng.randint(-spread // lattice, spread // lattice),
        )
    return Embedding(pos)


@pytest.fixture
def f1_inst():
    return f1()


@pytest.fixture
def f2_inst():
    return f2()


@pytest.fixture
def f3_pair():
    return f3()


