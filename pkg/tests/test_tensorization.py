import numpy as np
import pytest

from treecolor import canonical, dynamics, oracle, spectral
from treecolor import tensorization as tz
from treecolor.colorings import star_root_lists, uniform_lists
from treecolor.errors import NonErgodicError, ParameterError
from treecolor.trees import (build_complete_regular, build_hanging_root,
                             tree_from_parents)


def path_tree(n):
    return tree_from_parents([None] + list(range(n)), 0)


def path_dist(n, q):
    t = path_tree(n)
    return t, oracle.enumerate_colorings(t, uniform_lists(t, q))


def test_law_of_total_variance_matrix_identity():
    t, d = path_dist(4, 3)
    for S in ({0}, {1, 2}, {0, 3}):
        lhs = tz.var_form(d)
        rhs = tz.cond_var_form(d, S) + tz.projected_var_form(d, S)
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_cond_var_full_set_equals_var():
    t, d = path_dist(3, 3)
    assert np.max(np.abs(tz.cond_var_form(d, {0, 1, 2}) - tz.var_form(d))) < 1e-12


def test_forms_annihilate_constants():
    t, d = path_dist(3, 4)
    ones = np.ones(d.size)
    for M in (tz.var_form(d), tz.cond_var_form(d, {1}),
              tz.projected_var_form(d, {0, 1})):
        assert np.max(np.abs(M @ ones)) < 1e-12
        assert np.max(np.abs(M - M.T)) < 1e-12


def test_cond_var_form_matches_generic_assembly():
    # the shortcut weight*(I - projector) equals diag(w) - P^T diag(w) P
    t, d = path_dist(3, 3)
    w = np.full(d.size, d.weight)
    for S in ({0}, {1}, {0, 2}):
        P = tz.projector(d, S)
        generic = np.diag(w) - P.T @ (w[:, None] * P)
        assert np.max(np.abs(generic - tz.cond_var_form(d, S))) < 1e-14
        assert np.max(np.abs(P @ P - P)) < 1e-14  # idempotent
        assert np.max(np.abs(P - P.T)) < 1e-14    # symmetric


def test_product_distribution_tensorizes_with_constant_one():
    # pinning the middle edge of a 3-edge path makes the outer two edges
    # independent, so their conditional variances control the variance
    t = path_tree(3)
    d = oracle.enumerate_colorings(t, uniform_lists(t, 3)).conditional({1: 1})
    lhs = tz.var_form(d)
    rhs = tz.cond_var_form(d, {0}) + tz.cond_var_form(d, {2})
    cert = tz.certify_inequality(lhs, rhs)
    assert cert.ok
    rng = np.random.default_rng(0)
    for _ in range(100):
        f = rng.standard_normal(d.size)
        assert f @ lhs @ f <= f @ rhs @ f + 1e-9


def test_certify_inequality_edges():
    t, d = path_dist(3, 3)
    A = tz.var_form(d)
    assert tz.certify_inequality(A, A).ok
    assert not tz.certify_inequality(A, 0.99 * A).ok
    with pytest.raises(ParameterError):
        tz.certify_inequality(A, np.eye(3))


def test_certification_monotone_in_weights():
    tree = build_hanging_root(2, 1)
    lists = star_root_lists(tree, 4)
    rep = canonical.compute_congestion(tree, lists, canonical.GLAUBER_PATHS)
    alpha = rep.alpha_vector()
    assert tz.check_root_tensorization(tree, lists, alpha).ok
    bigger = tuple(a * 1.5 for a in alpha)
    assert tz.check_root_tensorization(tree, lists, bigger).ok
    assert not tz.check_root_tensorization(tree, lists, (0.0, 0.0)).ok


def test_optimal_at_constant_basics():
    t1 = path_tree(1)
    d1 = oracle.enumerate_colorings(t1, uniform_lists(t1, 3))
    assert abs(tz.optimal_at_constant(d1, [(0,)]) - 1.0) < 1e-9

    star = build_complete_regular(3, 1)
    d = oracle.enumerate_colorings(star, uniform_lists(star, 3))
    with pytest.raises(NonErgodicError):
        tz.optimal_at_constant(d, tz.singleton_blocks(star))
    with pytest.raises(ParameterError):
        tz.optimal_at_constant(d, [(0,), (1,)])


def test_at_constant_times_n_equals_relaxation_time():
    cases = [(path_tree(4), 3), (path_tree(3), 4),
             (build_complete_regular(3, 1), 4),
             (build_complete_regular(2, 2), 4),
             (build_hanging_root(3, 1), 5)]
    for tree, q in cases:
        lists = uniform_lists(tree, q)
        d = oracle.enumerate_colorings(tree, lists)
        C = tz.optimal_at_constant(d, tz.singleton_blocks(tree))
        tm = spectral.transition_matrix(tree, lists, dynamics.HEATBATH_GLAUBER)
        t_rel = spectral.spectral_report(tm).t_rel
        assert abs(C * tree.n_edges - t_rel) <= 1e-6 * t_rel


def test_forms_route_matches_chain_route():
    t, d = path_dist(4, 3)
    blocks = dynamics.pair_blocks(t)
    via_forms = tz.optimal_at_constant(d, blocks)
    via_chain = tz.optimal_at_constant(d, blocks, forms_cap=1)
    assert abs(via_forms - via_chain) < 1e-8 * via_forms


def test_star_at_constant_bound():
    import math
    for delta in (2, 3):
        star = build_complete_regular(delta, 1)
        d = oracle.enumerate_colorings(star, uniform_lists(star, delta + 1))
        C = tz.optimal_at_constant(d, tz.singleton_blocks(star))
        assert C <= math.exp(math.pi ** 2 / 6)


def test_certificate_export_schema():
    t, d = path_dist(3, 3)
    cert = tz.certify_inequality(tz.var_form(d), 2.0 * tz.var_form(d))
    doc = cert.export(instance="abc", inequality="demo")
    assert doc == {"instance": "abc", "inequality": "demo",
                   "min_eigenvalue": doc["min_eigenvalue"],
                   "verdict": "pass", "marginal": False}
    assert doc["min_eigenvalue"] >= -1e-12


def test_gamma_constant_one_spare_color():
    # the depth-1 base constants at q = delta + 1 stay below 6
    for delta in (2, 3):
        assert tz.gamma_constant(delta, delta + 1, 1) <= 6.0


def test_root_tensorization_pipeline_and_routing_constants():
    # congestion-derived weights certify; so do the depth-one routing bounds
    tree = build_hanging_root(2, 1)
    lists = star_root_lists(tree, 4)
    rep = canonical.compute_congestion(tree, lists, canonical.GLAUBER_PATHS)
    assert tz.check_root_tensorization(tree, lists, rep.alpha_vector()).ok
    for delta in (2, 3):
        t = build_hanging_root(delta, 1)
        lists_star = star_root_lists(t, delta + 1)
        cert = tz.check_root_tensorization(t, lists_star, (4.0 * delta, 8.0))
        assert cert.ok


def test_block_factorization_checks():
    t, d = path_dist(4, 3)
    C = tz.optimal_at_constant(d, tz.singleton_blocks(t))
    singles = {(e,): C * (1 + 1e-9) for e in range(t.n_edges)}
    assert tz.check_block_factorization(d, singles).ok

    blocks = dynamics.pair_blocks(t)
    Cp = tz.optimal_at_constant(d, blocks)
    assert tz.check_block_factorization(d, {b: Cp * (1 + 1e-9) for b in blocks}).ok
    assert not tz.check_block_factorization(d, {b: 0.1 for b in blocks}).ok

    whole = {tuple(range(t.n_edges)): 1.0}
    assert tz.check_block_factorization(d, whole).ok


def test_f_recursion_cases():
    alpha = (2.0, 0.4)
    gamma = 5.0
    assert tz.f_recursion(1, 1, 1, alpha, gamma) == gamma
    assert tz.f_recursion(2, 1, 1, alpha, gamma) == alpha[0] * gamma
    # depth 2*ell at the bottom level
    assert tz.f_recursion(2, 2, 1, alpha, gamma) == alpha[1] * gamma + gamma
    with pytest.raises(ParameterError):
        tz.f_recursion(2, 3, 1, alpha, gamma)
    with pytest.raises(ParameterError):
        tz.f_recursion(2, 1, 1, (1.0,), gamma)


def test_f_recursion_below_hat():
    for ell, alpha in ((1, (2.0, 0.4)), (2, (3.0, 1.5, 0.25)),
                       (3, (2.0, 1.0, 0.7, 0.45))):
        gamma = 4.2
        for k in range(1, 6 * ell + 1):
            for t in range(1, k + 1):
                F = tz.f_recursion(k, t, ell, alpha, gamma)
                assert F <= tz.f_hat(k, t, ell, alpha, gamma) + 1e-9


def test_verify_induction_small_pipeline():
    delta, q, ell = 2, 4, 1
    star = build_hanging_root(delta, ell)
    lists = star_root_lists(star, q)
    alpha = canonical.compute_congestion(star, lists,
                                         canonical.GLAUBER_PATHS).alpha_vector()
    gamma = tz.gamma_constant(delta, q, ell)
    tree = build_complete_regular(delta, 2)
    res = tz.verify_induction(tree, uniform_lists(tree, q), ell, alpha, gamma)
    assert res["ok"]
    # base case k <= ell reduces to the uniform constant
    t1 = build_complete_regular(delta, 1)
    res1 = tz.verify_induction(t1, uniform_lists(t1, q), ell, alpha, gamma)
    assert res1["ok"]
    assert set(res1["constants"].values()) == {gamma}


def test_pair_block_seed_and_uniform_constant():
    delta, q, ell = 2, 3, 3
    star = build_hanging_root(delta, ell)
    lists = star_root_lists(star, q)
    rep = canonical.compute_congestion(star, lists, canonical.EDGE_PATHS)
    alpha = tuple(2 * (ell + 1) * rep.xi(t) for t in range(ell + 1))
    beta = 2 * rep.xi_pair_blocks()
    assert tz.check_root_factorization(star, lists, alpha, beta).ok

    # depth one needs no pair moves at all, so the pair weight vanishes
    star1 = build_hanging_root(3, 1)
    lists1 = star_root_lists(star1, 4)
    rep1 = canonical.compute_congestion(star1, lists1, canonical.EDGE_PATHS)
    assert rep1.xi_pair_blocks() == 0.0
    alpha1 = tuple(2 * 2 * rep1.xi(t) for t in range(2))
    assert tz.check_root_factorization(star1, lists1, alpha1, 0.0).ok

    gamma = tz.gamma_constant(delta, q, ell)
    k = 2
    tree = build_complete_regular(delta, k)
    d = oracle.enumerate_colorings(tree, uniform_lists(tree, q))
    Cp = tz.uniform_pair_block_constant(alpha, beta, gamma, k, ell)
    weights = {b: Cp for b in dynamics.pair_blocks(tree)}
    assert tz.check_block_factorization(d, weights).ok


def test_verify_induction_one_spare_color_published_constants():
    # the depth-one seed (4*delta, 8) with base 6 carries the induction at
    # q = delta + 1 as well
    for delta in (2, 3):
        t2 = build_complete_regular(delta, 2)
        res = tz.verify_induction(t2, uniform_lists(t2, delta + 1), 1,
                                  (4.0 * delta, 8.0), 6.0)
        assert res["ok"]


def test_restrict_tree_and_monotonicity():
    p5 = path_tree(5)
    sub = tz.restrict_tree(p5, {0, 1, 2})
    assert sub.n_edges == 3
    with pytest.raises(ParameterError):
        tz.restrict_tree(p5, {2, 3})  # does not touch the root

    rec_same = tz.check_monotonicity(path_tree(3), {0, 1, 2}, 3)
    assert rec_same["ok"]
    rec = tz.check_monotonicity(p5, {0, 1, 2}, 3)
    assert rec["ok_singleton"] and rec["ok_pairs"]


def test_variance_exchange_checks():
    t, d = path_dist(4, 3)
    # S2 inside S1: containment identity case
    assert tz.variance_exchange_checks(d, {0, 1}, {1})
    # far apart: commutation as matrices
    assert tz.commutation_holds(d, {0}, {3})
    assert tz.variance_exchange_checks(d, {0}, {2, 3})
    with pytest.raises(ParameterError):
        tz.variance_exchange_checks(d, {0}, {1})  # boundary meets S2
    with pytest.raises(ParameterError):
        tz.commutation_holds(d, {0}, {1})
