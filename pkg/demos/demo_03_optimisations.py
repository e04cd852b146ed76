"""
Effect of the two optimisations
===============================

The stress bundle has three mutually recursive nonterminals, each with four
productions sharing one action shape.  Without optimisation the visit runs out
of budget.  Dropping structural duplicates shrinks the graph, but only the
per-nonterminal head cache makes the run cheap.
"""

from agcheck import BudgetExceeded, analyze_role, build_for_role
from agcheck.synth import stress_bundle

BUDGET = 1_000_000

g = stress_bundle()
print(len(g.productions), "productions")

for opt1, opt2 in [(False, False), (True, False), (False, True), (True, True)]:
    cfg, _ = build_for_role(g, "eval", opt1=opt1, opt2=opt2)
    name = f"opt1={'on ' if opt1 else 'off'} opt2={'on ' if opt2 else 'off'}"
    try:
        r = analyze_role(g, "eval", opt1=opt1, opt2=opt2, budget=BUDGET)
        outcome = f"{r.stats.statesExpanded:>9d} states, {r.stats.cacheHits} cache hits, {r.stats.elapsed:.2f}s"
    except BudgetExceeded as exc:
        outcome = f"over budget after {exc.stats.elapsed:.1f}s"
    print(f"{name}  {len(cfg.production_ids):2d} productions  {cfg.node_count():4d} nodes  {outcome}")
