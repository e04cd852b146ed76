"""
Where a signature check falls short
===================================

The postorder checker reduces every production to "provides" and "requires"
sets and never looks at control flow.  A write hidden in a branch is counted
as provided.  The CFG visit follows the branch and sees the path that skips it.
"""

from agcheck import analyze_role, check_postorder, load_sample

gap = load_sample("postorder_gap")
role = gap.roles[0].name
for p in gap.productions:
    print(f"{p.id:10s} {p.action(role)!r}")

print("\npostorder checker:", check_postorder(gap, role) or "no diagnostics")
for v in analyze_role(gap, role).errors:
    print("CFG visit:        ", v.describe())

# on straight-line code, with no branches, both tools agree
line = load_sample("straight_line")
print()
for d in check_postorder(line, "eval"):
    print("postorder:", d.message)
for v in analyze_role(line, "eval").errors:
    print("visit:    ", v.describe())
