from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import f1, f1_opt, f2, f2_opt, random_embedding, random_instance
from toposteiner.errors import InstanceError
from toposteiner.model import (
    INF,
    Embedding,
    HalfPoint,
    Instance,
    Terminal,
    check_embedding,
    clamp_to_bbox,
    collapse_embedding,
    cost,
    expand_embedding,
    extended_restrictions,
    is_feasible,
    normalize_topology,
    path_lengths,
    trivial_embedding,
    validate_instance,
)


def brute_cost(inst, emb):
    return sum(emb[a].l1(emb[b]) for a, b in inst.edges)


def test_f1_feasible():
    report = validate_instance(f1())
    assert report.ok and report.feasible


def test_f1_drawn_optimum_cost_and_paths():
    inst = f1()
    emb = f1_opt(inst)
    assert cost(inst, emb) == 24
    d = path_lengths(inst, emb)
    assert d["t1"] == 10 and d["t2"] == 12
    assert is_feasible(inst, emb)


def test_f1_all_at_root_cost():
    inst = f1()
    assert cost(inst, trivial_embedding(inst)) == 50


def test_two_vertex_cost():
    inst = Instance.from_real([("r", "t")], "r", {"r": (0, 0), "t": (3, 0)})
    assert cost(inst, trivial_embedding(inst)) == 6


def test_f2_drawn_optimum_is_tight():
    inst = f2()
    d = path_lengths(inst, f2_opt(inst))
    assert (d["a"], d["b"], d["c"]) == (20, 22, 40)
    assert cost(inst, f2_opt(inst)) == 75


def test_path_length_single_edge():
    rng = random.Random(5)
    inst = Instance.from_real([("r", "s"), ("s", "t"), ("s", "u")], "r", {"r": (0, 0), "t": (2, 1), "u": (-1, 3)})
    inst2 = Instance.from_real([("r", "t")], "r", {"r": (1, 1), "t": (-2, 4)})
    assert path_lengths(inst2, trivial_embedding(inst2))["t"] == 12
    emb = random_embedding(inst, rng)
    assert path_lengths(inst, emb)["t"] == emb["s"].l1(HalfPoint(0, 0)) + emb["s"].l1(HalfPoint(4, 2))


def test_extended_restrictions_f1():
    inst = f1()
    ext = extended_restrictions(inst, f1_opt(inst))
    assert ext["b2"] == 9
    assert ext["t1"] == 10 and ext["t2"] == 12
    assert ext["a3"] == INF


def test_extended_restrictions_unrestricted():
    inst = f1(restricted=False)
    assert set(extended_restrictions(inst, f1_opt(inst)).values()) == {INF}


def test_extended_restrictions_match_definition():
    # l_v = min over restricted terminals below v of l_t - (d(t) - d(v))
    rng = random.Random(11)
    for seed in range(40):
        inst = random_instance(seed)
        emb = random_embedding(inst, rng)
        ext = extended_restrictions(inst, emb)
        depth = {}
        for v in inst.order:
            u = inst.parent[v]
            depth[v] = 0 if u is None else depth[u] + emb[u].l1(emb[v])
        for v in inst.vertices:
            expect = INF
            for t in inst.subtree_terminals[v]:
                lim = inst.terminals[t].limit
                if lim != INF:
                    expect = min(expect, lim - (depth[t] - depth[v]))
            assert ext[v] == expect


def test_clamp_examples():
    inst = Instance.from_real([("r", "s"), ("s", "t"), ("s", "u")], "r", {"r": (0, 0), "t": (3, 0), "u": (0, 3)})
    base = trivial_embedding(inst)
    out = base.updated({"s": HalfPoint.from_real(-5, 0)})
    clamped = clamp_to_bbox(inst, out)
    assert clamped["s"] == HalfPoint(0, 0)
    assert cost(inst, clamped) <= cost(inst, out)
    assert clamp_to_bbox(inst, base) == base


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 10_000), spread=st.integers(1, 20))
def test_clamp_idempotent_and_contracting(seed, spread):
    inst = random_instance(seed)
    emb = random_embedding(inst, random.Random(seed), spread=spread)
    once = clamp_to_bbox(inst, emb)
    assert clamp_to_bbox(inst, once) == once
    assert cost(inst, once) <= cost(inst, emb)
    lengths, clamped_lengths = path_lengths(inst, emb), path_lengths(inst, once)
    assert all(clamped_lengths[t] <= lengths[t] for t in lengths)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_cost_is_edge_sum(seed):
    inst = random_instance(seed)
    emb = random_embedding(inst, random.Random(seed))
    assert cost(inst, emb) == brute_cost(inst, emb)


def test_validate_matches_trivial_feasibility():
    rng = random.Random(3)
    for seed in range(150):
        inst = random_instance(seed)
        # tighten random limits so some instances become infeasible
        lims = {}
        for t in inst.terminals:
            if t != inst.root and rng.random() < 0.3:
                lims[t] = 2 * rng.randint(0, 6)
        inst = inst.with_limits(lims)
        report = validate_instance(inst)
        triv = trivial_embedding(inst)
        assert report.ok
        assert report.feasible == is_feasible(inst, triv)
        direct = all(
            inst.terminals[t].limit == INF or term.position.l1(inst.root_position) <= inst.terminals[t].limit
            for t, term in inst.terminals.items()
        )
        assert report.feasible == direct


def test_validate_structural_problems():
    bad_parity = Instance(("r", "t"), (("r", "t"),), "r", {"r": Terminal(HalfPoint(0, 0)), "t": Terminal(HalfPoint(1, 0))})
    assert {v.kind for v in validate_instance(bad_parity).violations} == {"parity"}
    cycle = Instance(
        ("r", "a", "b"), (("r", "a"), ("a", "b"), ("b", "r")), "r", {"r": Terminal(HalfPoint(0, 0))}
    )
    assert "tree" in {v.kind for v in validate_instance(cycle).violations}
    rootless = Instance(("r", "t"), (("r", "t"),), "r", {"t": Terminal(HalfPoint(0, 0))})
    assert "root" in {v.kind for v in validate_instance(rootless).violations}
    infeasible = Instance.from_real([("r", "t")], "r", {"r": (0, 0), "t": (3, 0)}, {"t": 2})
    report = validate_instance(infeasible)
    assert report.ok and not report.feasible


def test_instance_rejects_unknown_ids():
    with pytest.raises(InstanceError):
        Instance(("r",), (("r", "x"),), "r", {"r": Terminal(HalfPoint(0, 0))})
    with pytest.raises(InstanceError):
        Instance(("r", "r"), (), "r", {"r": Terminal(HalfPoint(0, 0))})


def test_check_embedding_requires_pinned_terminals():
    inst = f1()
    emb = f1_opt(inst)
    check_embedding(inst, emb)
    moved = emb.updated({"t1": HalfPoint(0, 0)})
    with pytest.raises(ValueError):
        check_embedding(inst, moved)


def test_parity_property():
    # integral instance, any half-unit embedding: path lengths even, costs integral
    rng = random.Random(2024)
    checked = 0
    for seed in range(500):
        inst = random_instance(seed % 250 + 7)
        emb = random_embedding(inst, rng, spread=9)
        c = cost(inst, emb)
        assert isinstance(c, int)
        for t, d in path_lengths(inst, emb).items():
            assert d % 2 == 0 or t == inst.root, (seed, t, d)
        checked += 1
    assert checked >= 500


# -- normalization ---------------------------------------------------------


def _star(k):
    edges = [("r", "s")] + [("s", f"t{i}") for i in range(1, k)]
    terms = {"r": (0, 0)} | {f"t{i}": (i, i % 3) for i in range(1, k)}
    return Instance.from_real(edges, "r", terms)


def test_degree_four_steiner_split():
    inst = _star(4)
    norm = normalize_topology(inst)
    new = norm.instance
    assert len(new.steiner_points) == 2
    assert all(len(new.adjacency[v]) == 3 for v in new.steiner_points)
    assert all(len(new.adjacency[t]) == 1 for t in new.terminals)


def test_internal_terminal_becomes_leaf():
    inst = Instance.from_real([("r", "t"), ("t", "u")], "r", {"r": (0, 0), "t": (1, 0), "u": (2, 2)})
    norm = normalize_topology(inst)
    new = norm.instance
    assert len(new.adjacency["t"]) == 1
    (hub,) = new.steiner_points
    assert len(new.adjacency[hub]) == 3 and norm.origin[hub] == "t"


def test_f2_normalization_is_identity():
    inst = f2()
    assert normalize_topology(inst).instance is inst


def test_degree_two_steiner_dropped():
    inst = Instance.from_real([("r", "s"), ("s", "t")], "r", {"r": (0, 0), "t": (2, 1)})
    norm = normalize_topology(inst)
    assert norm.instance.steiner_points == ()
    emb = collapse_embedding(norm, trivial_embedding(norm.instance))
    assert cost(inst, emb) == cost(norm.instance, trivial_embedding(norm.instance))


def test_expand_collapse_roundtrip_preserves_cost():
    rng = random.Random(9)
    for k in range(4, 8):
        inst = _star(k)
        norm = normalize_topology(inst)
        emb = random_embedding(inst, rng)
        wide = expand_embedding(norm, emb)
        assert cost(norm.instance, wide) == cost(inst, emb)
        back = collapse_embedding(norm, wide)
        assert back == emb


def test_collapse_rejects_split_copies():
    inst = _star(5)
    norm = normalize_topology(inst)
    emb = expand_embedding(norm, trivial_embedding(inst))
    added = next(iter(norm.origin))
    with pytest.raises(ValueError):
        collapse_embedding(norm, emb.updated({added: HalfPoint(99, 99)}))


def test_halfpoint_helpers():
    p = HalfPoint.from_real(1, -2)
    assert p == (2, -4) and p.real() == (1.0, -2.0)
    assert p.shifted(1, 1) == HalfPoint(3, -3)
    assert p.l1(HalfPoint(0, 0)) == 6


def test_embedding_updated_is_copy():
    emb = Embedding({"a": HalfPoint(0, 0)})
    new = emb.updated({"a": HalfPoint(1, 1)})
    assert emb["a"] == HalfPoint(0, 0) and new["a"] == HalfPoint(1, 1)
