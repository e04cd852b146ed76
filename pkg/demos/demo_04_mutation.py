"""
Mutation campaign over the bundled languages
============================================

Every attribute name in every action is renamed, one at a time, to a name used
nowhere else.  A mutant counts as detected when the visit reports an error on
it.  The oracle runs every bounded parse tree to confirm whether the mutant
really fails at run time.
"""

from agcheck import load_sample, run_campaign
from agcheck.mutation import render_survivors, render_table
from agcheck.samples import LANGUAGES

reports = []
for name in LANGUAGES:
    g = load_sample(name)
    reports.append(run_campaign(g, g.roles[0].name, use_oracle=True, language=name))

# "w/o" is the postorder checker, "with" is the CFG visit
print(render_table(reports))

for r in reports:
    print(f"\n{r.language}: {r.oracleFaulty} oracle-confirmed faulty, {len(r.missed)} missed by the visit")
    if r.survivors or r.checkMutants:
        print(render_survivors(r))
