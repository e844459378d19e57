"""Transient dynamics and the approach to steady state.

For a time-independent system the evolution is linear with constant
coefficients, so a fixed-step fourth-order Runge-Kutta propagator is formed
once and applied repeatedly.  The slowest decaying mode of the evolution
matrix sets how long the transient lasts; here that is the Raman coherence of
a Lambda system slightly off two-photon resonance.
"""

import numpy as np

from liouville import build_M_fast, evolve, max_rate, spectral_gap, steady_state
from liouville.core import StepSizeError
from liouville.models import ThreeLevelParams, three_level_lambda

spec = three_level_lambda(ThreeLevelParams(difference=2.0))
gap = spectral_gap(build_M_fast(spec))
dt = 0.1 / max_rate(spec)
print(f"slowest relaxation rate {gap:.4f}, step {dt:.4f}")

rho0 = np.diag([1.0, 0.0, 0.0]).astype(complex)
target = steady_state(spec)
for t_end in (5, 20, 50 / gap):
    traj = evolve(spec, rho0, t_end, dt)
    final = traj.final
    print(f"t = {t_end:7.2f}: max|rho - rho_ss| = {np.max(np.abs(final - target)):.2e}, "
          f"trace - 1 = {np.trace(final).real - 1:+.1e}")

# Steps beyond the stability bound are refused instead of silently diverging.
try:
    evolve(spec, rho0, 1.0, 10 * dt)
except StepSizeError as exc:
    print(f"refused: {exc}")
