"""Exact transition matrices, relaxation times and mixing times.

On 3-color paths the single-edge dynamics slows down superlinearly, while the
neighboring-pair dynamics stays near-linear; exact mixing times always sit
below the relaxation-time bound T_rel * (1 + n ln q).
"""

import math

from treecolor import dynamics, spectral
from treecolor.colorings import uniform_lists
from treecolor.trees import tree_from_parents


def path_tree(n):
    return tree_from_parents([None] + list(range(n)), 0)


print(f"{'n':>3} {'T_rel (single)':>15} {'T_rel/n':>9} {'T_rel (pair)':>13} {'pair/n':>8}")
for n in (4, 6, 8, 10):
    p = path_tree(n)
    lists = uniform_lists(p, 3)
    single = spectral.spectral_report(
        spectral.transition_matrix(p, lists, dynamics.HEATBATH_GLAUBER))
    pair = spectral.spectral_report(
        spectral.transition_matrix(p, lists, dynamics.NEIGHBOR_PAIR))
    print(f"{n:>3} {single.t_rel:>15.2f} {single.t_rel / n:>9.3f} "
          f"{pair.t_rel:>13.2f} {pair.t_rel / n:>8.3f}")

print()
p = path_tree(4)
lists = uniform_lists(p, 3)
tm = spectral.transition_matrix(p, lists, dynamics.HEATBATH_GLAUBER)
rep = spectral.spectral_report(tm)
t_mix = spectral.mixing_time(tm, 0.25)
bound = rep.t_rel * (1 + p.n_edges * math.log(3))
print(f"path(4), q=3: T_mix(1/4) = {t_mix}, bound {bound:.1f}")
print(f"eigenvalues: lambda_2 = {rep.lambda2:.6f}, "
      f"lambda_min = {rep.lambda_min:.2e} (heat-bath spectra are nonnegative)")
