from __future__ import annotations

import random

import pytest

from conftest import f3, random_embedding, random_instance
from toposteiner.components import (
    Axis,
    affected_family,
    affected_terminals,
    apply_moves,
    check_laminar,
    component_frontier,
    maximal_components,
    move_component,
    predict_deltas,
    preserves_local_order,
)
from toposteiner.errors import LocalOrderError
from toposteiner.model import HalfPoint, Instance, cost, path_lengths, trivial_embedding


def find(comps, member):
    return next(C for C in comps if member in C.members)


def r_by_subtree(inst, C):
    """Terminals below a non-root frontier neighbour on the predecessor's side."""
    side = C.gamma_lt if C.sign == 1 else C.gamma_gt
    out = set()
    for w in side:
        if w != C.predecessor:
            out |= inst.subtree_terminals[w]
    return frozenset(out)


def test_f3_component_and_frontier(f3_pair):
    inst, emb = f3_pair
    C = find(maximal_components(inst, emb, Axis.Y), "s1")
    assert C.members == {"s1", "s3", "s4"}
    lt, gt, pred, sign = component_frontier(C)
    assert gt == {"t2", "s5"}
    assert lt == {"t1", "s2", "t6"}
    assert pred == "s2" and sign == 1
    assert affected_terminals(inst, C) == {"t1", "t6"}


def test_f3_move_changes_two_paths(f3_pair):
    inst, emb = f3_pair
    C = find(maximal_components(inst, emb, Axis.Y), "s1")
    moved = move_component(emb, C, -2)
    assert {moved[v].y2 for v in C.members} == {4}
    before, after = path_lengths(inst, emb), path_lengths(inst, moved)
    assert before["t1"] - after["t1"] == 4
    assert before["t6"] - after["t6"] == 4
    assert all(before[t] == after[t] for t in before if t not in ("t1", "t6"))


def test_f3_predicted_deltas(f3_pair):
    inst, emb = f3_pair
    C = find(maximal_components(inst, emb, Axis.Y), "s1")
    # one real unit down is two half-units
    dc, dp = predict_deltas(inst, emb, [(C, -2)])
    assert dc == -2
    assert dp["t1"] == dp["t6"] == -4
    assert sum(abs(v) for v in dp.values()) == 8
    dc0, dp0 = predict_deltas(inst, emb, [(C, 0)])
    assert dc0 == 0 and set(dp0.values()) == {0}
    assert move_component(emb, C, 0) == emb


def test_singleton_and_chain_components():
    inst = Instance.from_real([("r", "s"), ("s", "t")], "r", {"r": (0, 0), "t": (2, 1)})
    emb = trivial_embedding(inst).updated({"s": HalfPoint(1, 5)})
    comps = maximal_components(inst, emb, Axis.X)
    C = find(comps, "s")
    assert C.members == {"s"}
    assert len(C.gamma_lt) == 1 and len(C.gamma_gt) == 1
    path = Instance.from_real([("r", "a"), ("a", "b")], "r", {"r": (0, 0), "a": (0, 1), "b": (0, 2)})
    comps = maximal_components(path, trivial_embedding(path), Axis.X)
    assert len(comps) == 1 and len(comps[0].members) == 3


def test_root_component_has_no_predecessor(f3_pair):
    inst, emb = f3_pair
    C = find(maximal_components(inst, emb, Axis.X), "r")
    assert C.predecessor is None and C.sign is None


def test_components_partition_vertices():
    rng = random.Random(1)
    for seed in range(60):
        inst = random_instance(seed)
        emb = random_embedding(inst, rng, lattice=2)
        for axis in Axis:
            comps = maximal_components(inst, emb, axis)
            members = [v for C in comps for v in C.members]
            assert sorted(members) == sorted(inst.vertices)


def test_affected_terminals_match_subtree_formula():
    rng = random.Random(7)
    checked = 0
    for seed in range(120):
        inst = random_instance(seed)
        emb = random_embedding(inst, rng, lattice=2)
        for axis in Axis:
            for C in maximal_components(inst, emb, axis):
                if C.terminal_free:
                    assert affected_terminals(inst, C) == r_by_subtree(inst, C)
                    checked += 1
    assert checked > 200


def test_affected_terminals_excludes_crossing_path():
    inst = Instance.from_real([("r", "s"), ("s", "t"), ("s", "u")], "r", {"r": (0, 0), "t": (0, 4), "u": (3, 4)})
    emb = trivial_embedding(inst).updated({"s": HalfPoint(0, 5)})
    C = find(maximal_components(inst, emb, Axis.Y), "s")
    # r below, t and u above: every path crosses s
    assert affected_terminals(inst, C) == frozenset()


def test_affected_terminals_rejects_terminal_component(f3_pair):
    inst, emb = f3_pair
    with pytest.raises(ValueError):
        affected_terminals(inst, find(maximal_components(inst, emb, Axis.X), "r"))


def test_predict_rejects_order_flip(f3_pair):
    inst, emb = f3_pair
    C = find(maximal_components(inst, emb, Axis.Y), "s1")
    with pytest.raises(LocalOrderError):
        predict_deltas(inst, emb, [(C, -6)])
    T = find(maximal_components(inst, emb, Axis.X), "r")
    with pytest.raises(LocalOrderError):
        predict_deltas(inst, emb, [(T, 1)])
    with pytest.raises(LocalOrderError):
        predict_deltas(inst, emb, [(C, 0), (C, 0)])


def sample_moves(inst, emb, rng):
    moves = []
    for axis in Axis:
        free = [C for C in maximal_components(inst, emb, axis) if C.terminal_free]
        rng.shuffle(free)
        for C in free[: rng.randint(0, len(free))]:
            moves.append((C, rng.choice([-3, -2, -1, 1, 2, 3])))
    return moves


def test_movement_prediction_matches_recomputation():
    rng = random.Random(42)
    samples = 0
    seed = 0
    while samples < 500:
        seed += 1
        inst = random_instance(seed)
        if not inst.steiner_points:
            continue
        emb = random_embedding(inst, rng, lattice=2)
        moves = sample_moves(inst, emb, rng)
        if not moves:
            continue
        after = apply_moves(emb, moves)
        if not preserves_local_order(inst, emb, after):
            with pytest.raises(LocalOrderError):
                predict_deltas(inst, emb, moves)
            continue
        dc, dp = predict_deltas(inst, emb, moves)
        assert cost(inst, after) - cost(inst, emb) == dc
        before_d, after_d = path_lengths(inst, emb), path_lengths(inst, after)
        assert {t: after_d[t] - before_d[t] for t in before_d} == dp
        samples += 1
    assert samples >= 500


def test_laminar_examples():
    assert check_laminar([{"t1", "t6"}, {"t1"}, {"t4"}])
    assert not check_laminar([{"t1", "t2"}, {"t2", "t3"}])
    assert check_laminar([])


def test_affected_family_laminar_on_random_embeddings():
    rng = random.Random(99)
    for seed in range(200):
        inst = random_instance(seed, max_terminals=8)
        emb = random_embedding(inst, rng, lattice=rng.choice([1, 2, 4]))
        for axis in Axis:
            assert check_laminar(affected_family(inst, emb, axis)), (seed, axis)
