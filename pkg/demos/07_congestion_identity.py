"""Exact path congestion per tree level, and the leaf-level identity linking
it to the expected squared start-multiplicity.

With two extra colors (q = d + 3 over branching factor d) the leaf congestion
is 27x the expected squared multiplicity on the full measure, and exactly 12x
after conditioning the ambient measure on the two coupled root colors.
"""

from treecolor.canonical import EDGE_PATHS, GLAUBER_PATHS, compute_congestion
from treecolor.colorings import star_root_lists
from treecolor.trees import build_hanging_root

for delta, ell in ((2, 1), (2, 3), (3, 1)):
    q = delta + 2
    tree = build_hanging_root(delta, ell)
    lists = star_root_lists(tree, q)
    rep = compute_congestion(tree, lists, GLAUBER_PATHS)
    xi = [rep.xi(t) for t in range(ell + 1)]
    print(f"delta={delta}, ell={ell}, q={q}: xi per level = "
          f"{[round(v, 4) for v in xi]}")
    a, b = 1, 2
    print(f"  leaf level: xi = {rep.xi_ab(a, b, ell):.6f} "
          f"= 27 * {rep.r_ab(a, b):.6f}; conditioned: "
          f"{rep.xi_ab(a, b, ell, root_restricted=True):.6f} "
          f"= 12 * {rep.r_ab(a, b, root_restricted=True):.6f}")

print()
tree = build_hanging_root(2, 3)
lists = star_root_lists(tree, 3)   # one extra color: pair moves needed
rep = compute_congestion(tree, lists, EDGE_PATHS)
print("pair-move paths, delta=2, ell=3, q=3:")
print("  xi per level:", [rep.xi(t) for t in range(4)],
      " xi on root-pair blocks:", rep.xi_pair_blocks())
