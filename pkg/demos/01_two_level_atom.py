"""Driven two-level atom: steady-state excited population versus detuning.

A laser with Rabi frequency 5 (in units of the decay rate) drives a
two-level atom.  The steady state from the reduced linear system is compared
with the closed-form Lorentzian, then the same system is integrated in time
from the ground state to show it relaxing onto that steady state.
"""

import numpy as np

from liouville import evolve, max_rate, steady_state
from liouville.models import TwoLevelParams, two_level, two_level_excited_population

detunings = np.linspace(-100, 100, 401)
pops = np.array([steady_state(two_level(TwoLevelParams(rabi=5, detuning=d))).real[1, 1]
                 for d in detunings])
exact = two_level_excited_population(5, detunings, 1)

print("detuning   rho22 (solver)   rho22 (formula)")
for d in (-100, -20, -5, -2, 0, 2, 5, 20, 100):
    k = np.searchsorted(detunings, d)
    print(f"{d:8.1f}   {pops[k]:.12f}   {exact[k]:.12f}")
print(f"max deviation over the grid: {np.max(np.abs(pops - exact)):.2e}")
print(f"line centre at detuning {detunings[np.argmax(pops)]}, power-broadened FWHM "
      f"{np.sqrt(1 + 2 * 25):.3f} (bare width 1)")

# Relaxation from the ground state on resonance: Rabi oscillations damp out.
spec = two_level(TwoLevelParams(rabi=5))
rho0 = np.diag([1.0, 0.0]).astype(complex)
traj = evolve(spec, rho0, t_end=10.0, dt=0.1 / max_rate(spec))
print("\n   t     rho22(t)")
for t in (0, 0.2, 0.6, 1.0, 2.0, 5.0, 10.0):
    k = np.argmin(np.abs(traj.times - t))
    print(f"{traj.times[k]:5.2f}   {traj.states[k][1, 1].real:.6f}")
print(f"steady state  {pops[200]:.6f}")
