"""
Running a role by hand
======================

The oracle is a small interpreter.  It enumerates parse trees up to a bound on
how often a production may repeat along a root-to-leaf chain, then executes
the role with explicit branch decisions.
"""

from agcheck.oracle import enumerate_trees, execute_role, exhaustive_choices, oracle_check
from agcheck.samples import load_sample

g = load_sample("ex2")
(tree,) = enumerate_trees(g, bound=2)
print("tree:", tree)

# 1 takes the then branch, 0 the else branch
print("then :", execute_role(tree, "eval", [1], g))
print("else :", [v.key for v in execute_role(tree, "eval", [0], g)])

for choices, found in exhaustive_choices(tree, "eval", g):
    print(choices, sorted(v.key for v in found))

# a bigger grammar: every tree, every choice, summarised as fault keys
g = load_sample("logLang")
trees = enumerate_trees(g, bound=2)
print(f"\nlogLang: {len(trees)} trees at bound 2; smallest {min(trees, key=lambda t: t.size())}")
print("faults:", sorted(oracle_check(g, "run")) or "none")
