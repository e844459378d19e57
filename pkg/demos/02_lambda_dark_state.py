"""Coherent population trapping in a three-level Lambda system.

Two ground states share one excited state.  When the two fields are in
two-photon resonance the atoms are pumped into the dark superposition
(|1> - |2>)/sqrt(2), which does not couple to the light, and the excited
population vanishes.  Off the two-photon resonance the dip closes again.
"""

import numpy as np

from liouville import steady_state
from liouville.models import ThreeLevelParams, three_level_lambda

grid = np.linspace(-20, 20, 401)
rho = [steady_state(three_level_lambda(ThreeLevelParams(difference=d))) for d in grid]
p3 = np.array([r[2, 2].real for r in rho])

print("two-photon detuning   rho33")
for d in (-20, -5, -2, -1, -0.5, -0.1, 0, 0.1, 0.5, 1, 2, 5, 20):
    k = np.argmin(np.abs(grid - d))
    print(f"{grid[k]:19.2f}   {p3[k]:.3e}")

dark = rho[200]
print("\nsteady state on two-photon resonance (real part):")
print(np.array2string(dark.real, precision=6, suppress_small=True))

# The dark state is pure: rho = |D><D| with |D> = (|1> - |2>)/sqrt(2).
D = np.array([1, -1, 0]) / np.sqrt(2)
print(f"distance from |D><D|: {np.max(np.abs(dark - np.outer(D, D))):.1e}")
print(f"purity Tr(rho^2) = {np.trace(dark @ dark).real:.12f}")
