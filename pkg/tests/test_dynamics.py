from collections import Counter

import numpy as np
import pytest

from treecolor import oracle
from treecolor.colorings import greedy_coloring, is_proper, uniform_lists
from treecolor.dynamics import (BLOCK, HEATBATH_GLAUBER, NEIGHBOR_PAIR,
                                UNIFORM_GLAUBER, BlockSpec, RngSpec,
                                block_assignments, check_ergodicity,
                                pair_blocks, run_chain, step, trace_to_csv)
from treecolor.errors import ParameterError
from treecolor.trees import build_complete_regular, tree_from_parents


def path_tree(n):
    return tree_from_parents([None] + list(range(n)), 0)


def count_adjacent_pairs_bruteforce(tree):
    pairs = set()
    for e in range(tree.n_edges):
        for f in range(e + 1, tree.n_edges):
            endpoints_e = {tree.edge_parent_vertex[e], tree.edge_child_vertex[e]}
            endpoints_f = {tree.edge_parent_vertex[f], tree.edge_child_vertex[f]}
            if endpoints_e & endpoints_f:
                pairs.add((e, f))
    return len(pairs)


def test_pair_blocks_counts():
    p2 = path_tree(2)
    assert len(pair_blocks(p2)) == 2 + 1

    star = build_complete_regular(3, 1)
    assert len(pair_blocks(star)) == 3 + 3

    t2 = build_complete_regular(3, 2)
    blocks = pair_blocks(t2)
    n_pairs = sum(1 for b in blocks if len(b) == 2)
    # one C(3,2) at the root vertex plus one per internal vertex
    assert n_pairs == 3 + 3 * 3
    assert n_pairs == count_adjacent_pairs_bruteforce(t2)
    assert len(blocks) == t2.n_edges + n_pairs
    assert len(pair_blocks(t2, include_singletons=False)) == n_pairs


def test_block_assignments_consistency_filter():
    p3 = path_tree(3)
    l3 = uniform_lists(p3, 3)
    opts = block_assignments(p3, l3, (1, 2, 1), (0, 1))
    assert set(opts) == {(1, 2), (1, 3), (2, 3), (3, 2)}


def test_step_single_edge_heatbath_uniform():
    t1 = path_tree(1)
    l3 = uniform_lists(t1, 3)
    rng = RngSpec(1).generator()
    seen = Counter()
    state = (1,)
    for _ in range(3000):
        state, _, _, _ = step(t1, l3, HEATBATH_GLAUBER, state, rng)
        seen[state[0]] += 1
    freq = np.array([seen[c] for c in (1, 2, 3)]) / 3000
    assert np.max(np.abs(freq - 1 / 3)) < 0.05


def test_step_uniform_glauber_rejects():
    p2 = path_tree(2)
    l3 = uniform_lists(p2, 3)
    rng = RngSpec(5).generator()
    state = (1, 2)
    for _ in range(200):
        new, block, old, newc = step(p2, l3, UNIFORM_GLAUBER, state, rng)
        assert is_proper(p2, l3, new)
        if old == newc:
            assert new == state
        state = new


def test_run_chain_contracts():
    p3 = path_tree(3)
    l4 = uniform_lists(p3, 4)
    start = greedy_coloring(p3, l4)
    assert run_chain(p3, l4, HEATBATH_GLAUBER, 0, RngSpec(2), start) == start
    a = run_chain(p3, l4, NEIGHBOR_PAIR, 250, RngSpec(9), start)
    b = run_chain(p3, l4, NEIGHBOR_PAIR, 250, RngSpec(9), start)
    assert a == b
    c = run_chain(p3, l4, NEIGHBOR_PAIR, 250, RngSpec(10), start)
    assert is_proper(p3, l4, c)


def test_trace_output():
    p2 = path_tree(2)
    l3 = uniform_lists(p2, 3)
    start = greedy_coloring(p2, l3)
    _, rows = run_chain(p2, l3, HEATBATH_GLAUBER, 5, RngSpec(0), start, trace=True)
    text = trace_to_csv(rows)
    lines = text.strip().splitlines()
    assert lines[0] == "step,edge_or_block,old_colors,new_colors"
    assert len(lines) == 6


def test_long_run_marginals_match_oracle():
    p3 = path_tree(3)
    l4 = uniform_lists(p3, 4)
    dist = oracle.enumerate_colorings(p3, l4)
    marg = [dist.marginal([e]) for e in range(3)]
    start = greedy_coloring(p3, l4)
    finals = [run_chain(p3, l4, HEATBATH_GLAUBER, 60, RngSpec(1234, stream=k), start)
              for k in range(400)]
    for e in range(3):
        counts = Counter(s[e] for s in finals)
        for c in (1, 2, 3, 4):
            expect = marg[e].get((c,), 0.0)
            assert abs(counts[c] / 400 - expect) < 0.1


def test_properness_preserved_all_kinds():
    t = build_complete_regular(3, 2)
    l5 = uniform_lists(t, 5)
    start = greedy_coloring(t, l5)
    spec = BlockSpec(tuple(pair_blocks(t)), tuple([1.0] * len(pair_blocks(t))))
    for kind, kw in ((UNIFORM_GLAUBER, {}), (HEATBATH_GLAUBER, {}),
                     (NEIGHBOR_PAIR, {}), (BLOCK, {"block_spec": spec})):
        rng = RngSpec(77).generator()
        state = start
        for _ in range(300):
            state, _, _, _ = step(t, l5, kind, state, rng, **kw)
            assert is_proper(t, l5, state)


def test_neighbor_pair_without_singletons():
    p3 = path_tree(3)
    l3 = uniform_lists(p3, 3)
    assert all(len(b) == 2 for b in pair_blocks(p3, include_singletons=False))
    rng = RngSpec(4).generator()
    state = greedy_coloring(p3, l3)
    for _ in range(100):
        state, block, _, _ = step(p3, l3, NEIGHBOR_PAIR, state, rng,
                                  include_singletons=False)
        assert len(block) == 2
        assert is_proper(p3, l3, state)


def test_check_ergodicity():
    p4 = path_tree(4)
    ok, ncomp = check_ergodicity(p4, uniform_lists(p4, 3), UNIFORM_GLAUBER)
    assert ok and ncomp == 1

    star = build_complete_regular(3, 1)
    ok, ncomp = check_ergodicity(star, uniform_lists(star, 4), HEATBATH_GLAUBER)
    assert ok and ncomp == 1

    # q = delta freezes every state: one component per coloring
    ok, ncomp = check_ergodicity(star, uniform_lists(star, 3), UNIFORM_GLAUBER)
    assert not ok
    assert ncomp == oracle.count_colorings(star, uniform_lists(star, 3)) == 6

    # the pair dynamics reconnects the frozen single-edge state space
    ok, ncomp = check_ergodicity(star, uniform_lists(star, 3), NEIGHBOR_PAIR)
    assert ok and ncomp == 1


def test_block_spec_validation():
    with pytest.raises(ParameterError):
        BlockSpec(((0,),), (-1.0,))
    with pytest.raises(ParameterError):
        BlockSpec(((0,), (1,)), (0.0, 0.0))
