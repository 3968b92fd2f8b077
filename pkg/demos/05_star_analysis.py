"""The star with one extra color: correlation matrix, local walk, and the
local-to-global tensorization constant."""

import math

import numpy as np

from treecolor import oracle, spectral
from treecolor import tensorization as tz
from treecolor.colorings import uniform_lists
from treecolor.trees import build_complete_regular

for delta in (2, 3, 4, 5, 6):
    q = delta + 1
    psi = spectral.star_correlation_matrix(delta)
    walk = spectral.star_local_walk(delta)
    n = delta * q
    identity_gap = np.max(np.abs(
        psi - ((delta - 1) * walk - np.ones((n, n)) / q + np.eye(n))))
    lmax = np.linalg.eigvalsh(psi)[-1]
    const = spectral.local_to_global_constant(delta)
    star = build_complete_regular(delta, 1)
    dist = oracle.enumerate_colorings(star, uniform_lists(star, q))
    C = tz.optimal_at_constant(dist, tz.singleton_blocks(star))
    print(f"delta={delta}: identity gap {identity_gap:.1e}, "
          f"lambda_max(psi) = {lmax:.4f} (bound {1 + 1 / delta:.4f}), "
          f"walk product {const:.4f}, optimal constant {C:.4f}")

print(f"\nuniversal cap on the walk product: exp(pi^2/6) = {math.exp(math.pi ** 2 / 6):.4f}")
