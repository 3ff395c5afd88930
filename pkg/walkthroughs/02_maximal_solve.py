"""
Solving the same system by maximal complexity
=============================================

Choosing the owner of largest (rank, degree) makes the multiset measure fall
at every step; the leaves then assemble into a tautological disjunction.
"""

from epsub.complexity import complexity
from epsub.demos import ackermann_loop_system
from epsub.engine import solve
from epsub.syntax import to_str

system = ackermann_loop_system()

# %%
# Owners and their complexities before the first step.
for e in system.owners():
    print(complexity(e), to_str(e))

# %%
result = solve(system, "maximal", budget=100)
for step in result.trace:
    print(f"step {step.index}: {step.parent_measure} -> {step.child_measure}, decreased: {step.decreased}")
    for branch in step.branches:
        print(f"    {branch.label}: {branch.measure}")

# %%
# Each leaf is a substitution sequence; the instances form the disjunction.
for leaf in result.leaves:
    print([f"{to_str(s.epsilon_term)[:16]}... := {to_str(s.replacement)[:16]}..." for s in leaf])

# %%
print("verdict:", result.verdict)
print("every expansion decreased:", result.measure_decreasing)
print("all formulas stayed critical:", result.all_critical)
