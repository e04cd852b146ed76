"""
Checking a two-production grammar
=================================

A tiny evaluator: the program reads ``val`` from its expression child, and the
literal production is supposed to set it.  We run the CFG visit on it, break
it, and look at the report.
"""

from agcheck import analyze_role, bundle_from_dict

doc = {
    "types": [{"name": "Int"}, {"name": "Str"}],
    "nonterminals": ["Program", "Expr"],
    "start": "Program",
    "roles": [{"name": "eval", "mode": "manual"}],
    "modules": [{"name": "core", "productions": [
        {"id": "program", "lhs": "Program", "rhs": ["Expr"], "label": "Program ::= Expr",
         "actions": {"eval": "eval 1;\nread 1.val : Int;"}},
        {"id": "lit", "lhs": "Expr", "rhs": [], "label": "Expr ::= Lit",
         "actions": {"eval": "write 0.val : Int;"}},
    ]}],
}

g = bundle_from_dict(doc)
run = analyze_role(g, "eval")
print("clean grammar:", len(run.violations), "violations,", run.stats.statesExpanded, "states")

# now the literal only sets val under a condition
doc["modules"][0]["productions"][1]["actions"]["eval"] = "if {\n  write 0.val : Int;\n}"
run = analyze_role(bundle_from_dict(doc), "eval")
for v in run.violations:
    print(v.describe())
    # the witness is a role-CFG path from the entry to the failing read
    print("  witness:", " -> ".join(map(str, v.witness)))

# a typed mismatch is reported with both types
doc["modules"][0]["productions"][1]["actions"]["eval"] = "write 0.val : Str;"
(v,) = analyze_role(bundle_from_dict(doc), "eval").violations
print(v.describe())
