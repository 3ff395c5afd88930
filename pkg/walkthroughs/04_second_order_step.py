"""
One second-order step can raise the measure
===========================================

A predicate epsilon owner is eliminated with a lambda witness. The witness
carries a rank-2 predicate epsilon term into the scope of the other owner.
"""

from epsub.demos import SO_OWNER, SO_WITNESS, so_step_system
from epsub.second_order import CONSTRUCTED_NOTE, complexity_report, select_second_order, so_principal_step
from epsub.syntax import to_str

system = so_step_system()
print("owner:  ", SO_OWNER)
print("witness:", SO_WITNESS)

# %%
e = select_second_order(system)
branches = so_principal_step(system, e, "permissive")
for label, branch in branches:
    print(label)
    for f in branch.formulas:
        print("   ", to_str(f))

# %%
# The report compares every branch with the parent and flags what did not shrink.
report = complexity_report(system, branches, [CONSTRUCTED_NOTE])
print(report.render())
print("flagged branches:", [str(b.label) for b in report.flagged])
