"""
Destroying a critical formula
=============================

Substituting for a lower owner first can break a subordinate owner's
critical formula. Maximal selection avoids this.
"""

from epsub.demos import corpus
from epsub.engine import DestroyedCriticalFormula, solve
from epsub.syntax import to_str

system = dict(corpus())["subordinate_destruction"]
for f in system.formulas:
    print(" ", to_str(f))

# %%
# Permissive mode keeps going and records what broke.
result = solve(system, "first-listed")
for step, label, formula in result.diagnostics:
    print(f"step {step}, branch {label}: no longer critical: {to_str(formula)}")
print("verdict:", result.verdict)

# %%
# Strict mode stops at the first destroyed formula.
try:
    solve(system, "first-listed", mode="strict")
except DestroyedCriticalFormula as exc:
    print(f"step {exc.step}: {exc}")

# %%
# The maximal strategy eliminates the subordinate owner first and stays sound.
good = solve(system, "maximal")
print("maximal:", good.verdict, "| all critical:", good.all_critical)
