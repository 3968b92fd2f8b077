"""Exact transition matrices, spectra, mixing times and conductance.

Dense matrices are handled with LAPACK (``numpy.linalg.eigh`` on the
symmetrized kernel); above the dense cap a sparse matrix is assembled and the
second eigenvalue is located by power iteration after deflating the known
stationary eigenvector.
"""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from . import dynamics, oracle
from .colorings import available_colors, uniform_lists
from .errors import CapacityError, NonErgodicError, ParameterError, VerificationError

DENSE_CAP = 6000
SPARSE_CAP = 300000
MIXING_CAP = 4000


@dataclass
class TransitionMatrix:
    kind: str
    dist: oracle.DistributionTable
    matrix: object  # ndarray (dense) or scipy.sparse.csr_matrix
    dense: bool
    reversible: bool

    @property
    def n(self):
        return self.dist.size

    def stationary(self):
        return np.full(self.n, self.dist.weight)

    def row_sum_error(self):
        s = np.asarray(self.matrix.sum(axis=1)).ravel()
        return float(np.max(np.abs(s - 1.0)))

    def detailed_balance_error(self):
        """max |mu(x)P(x,y) - mu(y)P(y,x)|; mu is uniform so this is matrix
        asymmetry times the state weight."""
        if self.dense:
            gap = np.max(np.abs(self.matrix - self.matrix.T))
        else:
            diff = self.matrix - self.matrix.T
            gap = np.max(np.abs(diff.data)) if diff.nnz else 0.0
        return float(gap) * self.dist.weight


def _single_edge_triplets(tree, lists, kind, dist):
    n_edges = tree.n_edges
    q = lists.q
    rows, cols, vals = array("q"), array("q"), array("d")
    for i, state in enumerate(dist.states):
        diag = 0.0
        for e in range(n_edges):
            avail = available_colors(tree, lists, state, e)
            if kind == dynamics.HEATBATH_GLAUBER:
                p = 1.0 / (n_edges * len(avail))
                for c in avail:
                    if c == state[e]:
                        diag += p
                    else:
                        t = list(state)
                        t[e] = c
                        rows.append(i)
                        cols.append(dist.index[tuple(t)])
                        vals.append(p)
            else:  # uniform proposal: accept iff the color is available
                p = 1.0 / (n_edges * q)
                for c in avail:
                    if c != state[e]:
                        t = list(state)
                        t[e] = c
                        rows.append(i)
                        cols.append(dist.index[tuple(t)])
                        vals.append(p)
                diag += (q - len(avail) + 1) * p
        rows.append(i)
        cols.append(i)
        vals.append(diag)
    return rows, cols, vals


def _block_triplets(tree, lists, dist, blocks, weights):
    total_w = float(sum(weights))
    rows, cols, vals = array("q"), array("q"), array("d")
    m = tree.n_edges
    for block, w in zip(blocks, weights):
        if w <= 0:
            continue
        share = w / total_w
        rest = [e for e in range(m) if e not in block]
        classes = {}
        for i, state in enumerate(dist.states):
            classes.setdefault(tuple(state[e] for e in rest), []).append(i)
        for members in classes.values():
            p = share / len(members)
            for i in members:
                for j in members:
                    rows.append(i)
                    cols.append(j)
                    vals.append(p)
    return rows, cols, vals


def transition_matrix(tree, lists, kind, block_spec=None, include_singletons=True,
                      dense_cap=DENSE_CAP, sparse_cap=SPARSE_CAP, dist=None):
    """Exact one-step matrix of the chosen chain over the enumerated support."""
    n_states = oracle.count_colorings(tree, lists)
    if n_states > sparse_cap:
        raise CapacityError(
            f"state space has {n_states} states, above the sparse cap {sparse_cap}",
            estimated=n_states)
    if dist is None:
        dist = oracle.enumerate_colorings(tree, lists, cap=sparse_cap)

    if kind in dynamics.SINGLE_EDGE_KINDS:
        rows, cols, vals = _single_edge_triplets(tree, lists, kind, dist)
    elif kind == dynamics.NEIGHBOR_PAIR:
        blocks = dynamics.pair_blocks(tree, include_singletons=include_singletons)
        rows, cols, vals = _block_triplets(tree, lists, dist, blocks, [1.0] * len(blocks))
    elif kind == dynamics.BLOCK:
        if block_spec is None:
            raise ParameterError("BLOCK kind needs a BlockSpec")
        rows, cols, vals = _block_triplets(tree, lists, dist,
                                           block_spec.blocks, block_spec.weights)
    else:
        raise ParameterError(f"unknown chain kind {kind!r}")

    coo = sp.coo_matrix(
        (np.frombuffer(vals, dtype=float),
         (np.frombuffer(rows, dtype=np.int64), np.frombuffer(cols, dtype=np.int64))),
        shape=(dist.size, dist.size))
    csr = coo.tocsr()
    csr.sum_duplicates()
    if dist.size <= dense_cap:
        return TransitionMatrix(kind, dist, csr.toarray(), dense=True, reversible=True)
    return TransitionMatrix(kind, dist, csr, dense=False, reversible=True)


def _require_ergodic(tm):
    pattern = tm.matrix if not tm.dense else sp.csr_matrix(tm.matrix)
    ncomp, _ = connected_components(pattern, directed=False)
    if ncomp != 1:
        raise NonErgodicError(f"chain splits into {ncomp} components")


def _symmetrized(tm):
    """D^{1/2} P D^{-1/2} with D the stationary weights.

    The stationary law here is uniform, so this is numerically P itself; the
    conjugation is kept for clarity and symmetrized against roundoff.
    """
    mu = tm.stationary()
    if tm.dense:
        d = np.sqrt(mu)
        s = (tm.matrix * (1.0 / d)[None, :]) * d[:, None]
        return 0.5 * (s + s.T)
    d = sp.diags(np.sqrt(mu))
    dinv = sp.diags(1.0 / np.sqrt(mu))
    s = d @ tm.matrix @ dinv
    return 0.5 * (s + s.T)


@dataclass
class SpectralReport:
    n_states: int
    lambda2: float
    lambda_min: float
    gap: float
    t_rel: float
    method: str

    def export(self):
        return {"N": self.n_states, "lambda2": self.lambda2,
                "lambda_min": self.lambda_min, "gap": self.gap,
                "t_rel": self.t_rel, "method": self.method}


def _power_iteration(matvec, n, deflate, rng, tol=1e-10, max_iter=1_000_000):
    """Largest eigenvalue of a symmetric operator restricted to the
    complement of the ``deflate`` directions (orthonormal columns)."""
    x = rng.standard_normal(n)
    for v in deflate:
        x -= (v @ x) * v
    x /= np.linalg.norm(x)
    lam = 0.0
    for it in range(1, max_iter + 1):
        y = matvec(x)
        for v in deflate:
            y -= (v @ y) * v
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        x_new = y / norm
        lam_new = float(x_new @ matvec(x_new))
        if abs(lam_new - lam) <= tol * max(1.0, abs(lam_new)) and it > 5:
            return lam_new
        lam = lam_new
        x = x_new
    return lam


def spectral_report(tm, check_ergodic=True, compute_lambda_min=True, seed=7,
                    heatbath_floor=-1e-9):
    """Second eigenvalue, minimal eigenvalue and relaxation time.

    Heat-bath kinds are averages of projections, so their spectrum must be
    nonnegative; a violation below ``heatbath_floor`` raises.
    """
    if check_ergodic:
        _require_ergodic(tm)
    s = _symmetrized(tm)
    if tm.dense:
        eigs = np.linalg.eigvalsh(s)
        if abs(eigs[-1] - 1.0) > 1e-9:
            raise VerificationError(
                f"top eigenvalue {eigs[-1]} is not 1; matrix is not stochastic")
        lam2 = float(eigs[-2]) if tm.n > 1 else 1.0
        lam_min = float(eigs[0])
        method = "dense-eigh"
    else:
        rng = np.random.default_rng(seed)
        mu_vec = np.sqrt(tm.stationary())
        mu_vec /= np.linalg.norm(mu_vec)
        matvec = lambda x: s @ x
        lam2 = _power_iteration(matvec, tm.n, [mu_vec], rng)
        if compute_lambda_min:
            shifted = lambda x: x - s @ x  # eigenvalues 1 - lambda >= 0
            top = _power_iteration(shifted, tm.n, [], rng)
            lam_min = 1.0 - top
        else:
            lam_min = 0.0
        method = "power-iteration"
    if tm.kind != dynamics.UNIFORM_GLAUBER and compute_lambda_min:
        if lam_min < heatbath_floor:
            raise VerificationError(
                f"heat-bath spectrum should be nonnegative, found {lam_min}")
    lam_star = max(abs(lam2), abs(lam_min)) if compute_lambda_min else lam2
    gap = 1.0 - lam_star
    if gap <= 0:
        raise NonErgodicError("absolute spectral gap is zero")
    return SpectralReport(tm.n, lam2, lam_min, gap, 1.0 / gap, method)


def _tv_from_uniform(mat, weight):
    """max over rows of TV(row, uniform)."""
    return float(0.5 * np.max(np.abs(mat - weight).sum(axis=1)))


def mixing_time(tm, eps=0.25, cap=MIXING_CAP):
    """Smallest t with max_x TV(delta_x P^t, mu) <= eps, by exact distribution
    evolution with doubling plus binary search."""
    if eps >= 1.0:
        return 0
    if eps <= 0.0:
        raise ParameterError("eps must be positive")
    if tm.n > cap:
        raise CapacityError(f"{tm.n} states is above the mixing cap {cap}",
                            estimated=tm.n)
    w = tm.dist.weight
    P = tm.matrix if tm.dense else tm.matrix.toarray()
    if _tv_from_uniform(np.eye(tm.n), w) <= eps:
        return 0
    powers = [P]  # powers[j] = P^(2^j)
    t = 1
    cur = P
    while _tv_from_uniform(cur, w) > eps:
        nxt = powers[-1] @ powers[-1]
        powers.append(nxt)
        cur = nxt
        t *= 2
        if t > 10 ** 9:
            raise CapacityError("mixing time beyond doubling horizon")
    lo, hi = t // 2, t  # d(lo) > eps >= d(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        mat = None
        bits = mid
        j = 0
        while bits:
            if bits & 1:
                mat = powers[j] if mat is None else mat @ powers[j]
            bits >>= 1
            j += 1
        if _tv_from_uniform(mat, w) <= eps:
            hi = mid
        else:
            lo = mid
    return hi


def mixing_bound_constant(tm, q):
    """The product form T_rel * (1 + n ln q) with n the edge count."""
    n_edges = tm.dist.tree.n_edges
    return 1.0 + n_edges * math.log(q)


def conductance(tm, S):
    """Stationary flow out of S over mu(S)."""
    S = sorted(set(S))
    if not S:
        raise ParameterError("conductance needs a nonempty state set")
    mask = np.zeros(tm.n, dtype=bool)
    mask[S] = True
    mu = tm.stationary()
    if tm.dense:
        out_rows = tm.matrix[mask][:, ~mask].sum(axis=1)
    else:
        out_rows = np.asarray(tm.matrix[mask][:, ~mask].sum(axis=1)).ravel()
    flow = float(mu[mask] @ out_rows)
    return flow / float(mu[mask].sum())


def color_cut(dist, e, c):
    return [i for i, s in enumerate(dist.states) if s[e] == c]


def conductance_star(tm, extra_cuts=()):
    """Upper bound on the chain conductance from structured cuts.

    Minimizes Phi over all color-pinning cuts {sigma : sigma_e = c} with
    0 < mu(S) <= 1/2, plus any user-supplied cuts.  Exact global minimization
    is not attempted.
    """
    dist = tm.dist
    tree = dist.tree
    best = None
    best_cut = None
    cuts = []
    for e in range(tree.n_edges):
        for c in sorted(dist.lists[e]):
            cuts.append((f"edge{e}=color{c}", color_cut(dist, e, c)))
    for i, S in enumerate(extra_cuts):
        cuts.append((f"user{i}", list(S)))
    for name, S in cuts:
        if not S or len(S) * 2 > tm.n:
            continue
        phi = conductance(tm, S)
        if best is None or phi < best:
            best, best_cut = phi, name
    if best is None:
        raise ParameterError("no admissible cut with mu(S) <= 1/2")
    return best, best_cut


def frozen_probability_formula(delta, q):
    """Closed form asserted for Pr[at most one available color] at an edge
    with both endpoints of degree delta, given its color is pinned."""
    return (math.factorial(delta) * math.factorial(delta - 1)
            / (math.factorial(2 * delta - q) * math.factorial(q - 1)))


def frozen_probability_exact(tree, lists, e, cap=oracle.ENUMERATION_CAP):
    """Enumerated Pr[|available(e)| <= 1] under the root-color-1 pinning."""
    dist = oracle.enumerate_colorings(tree, lists, cap=cap)
    cond = dist.conditional({e: 1})
    hits = sum(
        1 for s in cond.states
        if len(available_colors(tree, lists, s, e)) <= 1)
    return hits / cond.size


def lower_bound_check(tree, e, q, kind=dynamics.HEATBATH_GLAUBER, strict=True,
                      tol=1e-12):
    """Frozen-edge probability and the conductance lower bound on T_rel.

    Returns a record with the enumerated probability, the closed-form value,
    the bound n*delta/(2(q-delta)^2) (n = edge count) and the exact
    relaxation time.  With ``strict`` the asserted agreements are enforced.
    """
    delta = tree.max_degree
    u = tree.edge_parent_vertex[e]
    v = tree.edge_child_vertex[e]
    if tree.degree[u] != delta or tree.degree[v] != delta:
        raise ParameterError("both endpoints of e must have degree delta")
    if not (delta + 1 <= q <= 2 * delta):
        raise ParameterError("q must lie in [delta+1, 2*delta]")
    lists = uniform_lists(tree, q)
    p_exact = frozen_probability_exact(tree, lists, e)
    p_formula = frozen_probability_formula(delta, q)
    n_edges = tree.n_edges
    trel_bound = n_edges * delta / (2.0 * (q - delta) ** 2)
    tm = transition_matrix(tree, lists, kind)
    rep = spectral_report(tm)
    record = {
        "delta": delta, "q": q, "n_edges": n_edges,
        "p_frozen_exact": p_exact,
        "p_frozen_formula": p_formula,
        "trel_bound": trel_bound,
        "t_rel": rep.t_rel,
    }
    if strict:
        if abs(p_exact - p_formula) > tol:
            raise VerificationError(
                f"frozen probability mismatch: enumerated {p_exact} vs "
                f"closed form {p_formula}")
        if rep.t_rel < trel_bound - 1e-9:
            raise VerificationError(
                f"T_rel {rep.t_rel} below the bound {trel_bound}")
    return record


# ---------------------------------------------------------------------------
# Star analysis (q = delta + 1)

def _star_distribution(delta):
    from .trees import build_complete_regular

    star = build_complete_regular(delta, 1)
    lists = uniform_lists(star, delta + 1)
    return star, lists, oracle.enumerate_colorings(star, lists)


def star_correlation_matrix(delta):
    """Pairwise influence matrix of the uniform coloring of the star with
    ``delta`` edges and ``delta + 1`` colors: entry ((u,a),(v,b)) is
    mu^{u<-a}_v(b) - mu_v(b)."""
    if delta < 1:
        raise ParameterError("delta must be >= 1")
    star, lists, dist = _star_distribution(delta)
    q = delta + 1
    n = delta * q
    psi = np.zeros((n, n))
    base = [dist.marginal([v]) for v in range(delta)]
    for u in range(delta):
        for a in range(1, q + 1):
            cond = dist.conditional({u: a})
            row = u * q + (a - 1)
            for v in range(delta):
                marg = cond.marginal([v])
                for b in range(1, q + 1):
                    psi[row, v * q + (b - 1)] = (
                        marg.get((b,), 0.0) - base[v].get((b,), 0.0))
    return psi


def star_local_walk(delta):
    """Non-lazy local walk on (edge, color) pairs of the same star: move to a
    uniformly random other edge and a color drawn from its conditional."""
    if delta < 2:
        raise ParameterError("local walk needs delta >= 2")
    star, lists, dist = _star_distribution(delta)
    q = delta + 1
    n = delta * q
    walk = np.zeros((n, n))
    for u in range(delta):
        for a in range(1, q + 1):
            cond = dist.conditional({u: a})
            row = u * q + (a - 1)
            for v in range(delta):
                if v == u:
                    continue
                marg = cond.marginal([v])
                for b in range(1, q + 1):
                    walk[row, v * q + (b - 1)] = marg.get((b,), 0.0) / (delta - 1)
    return walk


def star_correlation_closed_form(delta):
    """The explicit entries: -1/(delta+1) + [u!=v and a!=b]/delta
    + [u=v and a=b]."""
    q = delta + 1
    n = delta * q
    psi = np.zeros((n, n))
    for u in range(delta):
        for a in range(1, q + 1):
            for v in range(delta):
                for b in range(1, q + 1):
                    val = -1.0 / (delta + 1)
                    if u != v and a != b:
                        val += 1.0 / delta
                    if u == v and a == b:
                        val += 1.0
                    psi[u * q + (a - 1), v * q + (b - 1)] = val
    return psi


def lambda2(matrix):
    eigs = np.linalg.eigvalsh(0.5 * (matrix + matrix.T))
    return float(eigs[-2])


def local_to_global_constant(delta, strict=True):
    """prod_{j=2..delta} 1/(1 - lambda_2(local walk of the j-star)); the empty
    product for delta = 1."""
    if delta < 1:
        raise ParameterError("delta must be >= 1")
    value = 1.0
    for j in range(delta, 1, -1):
        lam = lambda2(star_local_walk(j))
        value /= (1.0 - lam)
    if strict and value > math.exp(math.pi ** 2 / 6) + 1e-9:
        raise VerificationError(
            f"local-to-global constant {value} exceeds exp(pi^2/6)")
    return value
