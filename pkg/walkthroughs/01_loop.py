"""
The first-listed strategy loops
===============================

Eliminating epsilon terms in the order they appear reproduces the same two
formulas one index higher at every step.
"""

from epsub.demos import ackermann_loop_system, loop_step_system, loop_term
from epsub.engine import Diverged, solve
from epsub.syntax import to_str
from epsub.translate import build_system

# %%
# The family e0 = eps x. P(x,0), e(n+1) = eps x. P(x, e(n)).
for n in range(3):
    print(f"e{n} =", to_str(loop_term(n)))

# %%
# The starting system, two critical formulas.
system = ackermann_loop_system()
for f in system.formulas:
    print(" ", to_str(f))

# %%
# Run the naive strategy with a generous budget. The loop detector stops it.
result = solve(system, "first-listed", budget=20)
assert isinstance(result, Diverged)
print(f"diverged ({result.reason}) after {result.steps} steps, loop first seen at step {result.loop_step}")

# %%
# Every recorded system is the closed form at n = step - 1.
for step in result.trace:
    want = build_system(loop_step_system(step.index - 1))
    print(f"step {step.index}: eliminated {to_str(step.chosen)[:28]}..., matches n={step.index - 1}:",
          step.result.alpha_eq(want))

# %%
# The opaque signature is the same at every step, which is what the detector sees.
print(result.trace[0].signature)
print(result.trace[-1].signature)
