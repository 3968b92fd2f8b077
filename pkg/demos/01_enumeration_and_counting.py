"""Enumerate and count proper edge colorings of small trees.

The enumeration oracle materializes every proper list coloring in a canonical
order; the dynamic program reproduces the count on trees far too large to
enumerate.
"""

from treecolor import oracle
from treecolor.colorings import star_root_lists, uniform_lists
from treecolor.trees import build_complete_regular, build_hanging_root, tree_from_parents

star = build_complete_regular(4, 1)
lists = uniform_lists(star, 6)
dist = oracle.enumerate_colorings(star, lists)
print(f"star with 4 edges, 6 colors: {dist.size} colorings "
      f"(closed form 6*5*4*3 = {6 * 5 * 4 * 3})")

path = tree_from_parents([None] + list(range(10)), 0)
print("path with 10 edges, 3 colors:",
      oracle.count_colorings(path, uniform_lists(path, 3)), "= 3 * 2^9")

# deep regular tree: counting still exact, enumeration would be hopeless
big = build_complete_regular(4, 6)
n = oracle.count_colorings(big, uniform_lists(big, 6))
print(f"complete 4-regular tree of depth 6 ({big.n_edges} edges): "
      f"a {len(str(n))}-digit count, leading digits {str(n)[:12]}...")

# conditionals and marginals on a hanging-root instance
tstar = build_hanging_root(3, 2)
d = oracle.enumerate_colorings(tstar, star_root_lists(tstar, 5))
print("hanging-root tree, restricted root list:", d.size, "colorings")
print("root marginal (uniform by color symmetry):", d.marginal([0]))
print("pinning the root to 1 leaves", d.conditional({0: 1}).size, "colorings")
