"""
Concrete level schemes: the driven two-level atom, the three-level Lambda
system, and the 15-level 87Rb ladder used as an optically controlled waveplate.

Level numbering for the 87Rb model (1-based, as in the element tables below)::

    1-3    5S1/2 F=1,  m = -1, 0, +1
    4-6    5P1/2 F'=1, m = -1, 0, +1
    7-11   5P1/2 F'=2, m = -2 .. +2
    12-14  6S1/2 F''=1, m = -1, 0, +1
    15     5S1/2 F=2 (all sublevels lumped)

The pump drives 1-3 -> 4-11 (sigma+), the probe couples 4-11 <-> 12-14.
All rates are in units of Gamma_a (the 5P1/2 decay rate).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .core import SpecError, SystemSpec, validate_spec

__all__ = [
    "TwoLevelParams",
    "ThreeLevelParams",
    "WaveplateParams",
    "PolarizationObservables",
    "two_level",
    "two_level_excited_population",
    "three_level_lambda",
    "rb87_waveplate",
    "polarization_observables",
    "jones_output",
    "excited_population",
    "SIGMA_PLUS_LEGS",
    "SIGMA_MINUS_LEGS",
    "B_MIN_SQUARED",
    "probe_leg_ratios",
    "mirror_relabeling",
]


@dataclass(frozen=True)
class TwoLevelParams:
    rabi: float = 5.0
    detuning: float = 0.0
    gamma: float = 1.0
    dephasing: float = 0.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.dephasing < 0:
            raise ValueError("dephasing must be non-negative")


@dataclass(frozen=True)
class ThreeLevelParams:
    rabi_a: float = 1.0
    rabi_b: float = 1.0
    detuning: float = 0.0  # common detuning
    difference: float = 0.0  # difference (Raman) detuning
    gamma: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")


@dataclass(frozen=True)
class WaveplateParams:
    """Parameters of the 15-level waveplate model, rates in units of Gamma_a.

    ``beta_gamma`` is the decay rate entering the ``beta`` prefactor of the
    probe phase and attenuation; ``None`` means ``gamma_b``.
    """

    omega_p: float = 5.0
    omega_s: float = 0.1
    delta_p: float = 141.4
    delta_s: float = 0.0
    hyperfine: float = 141.4
    gamma_a: float = 1.0
    gamma_b: float = 3.45 / 5.75
    gamma_g: float = 0.1 / 5.75
    branching: float = 0.5
    cell_length: float = 0.15
    atom_density: float = 1e16
    wavelength: float = 1.323e-6
    beta_gamma: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.branching <= 1.0:
            raise ValueError("branching must lie in [0, 1]")
        for name in ("gamma_a", "gamma_b", "gamma_g"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        for name in ("cell_length", "atom_density", "wavelength"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def gamma_bd(self):
        return self.branching * self.gamma_b

    @property
    def gamma_bi(self):
        return (1.0 - self.branching) * self.gamma_b

    def replace(self, **changes) -> "WaveplateParams":
        return WaveplateParams(**{**self.__dict__, **changes})


@dataclass(frozen=True)
class PolarizationObservables:
    phi_plus: float
    phi_minus: float
    trans_plus: float
    trans_minus: float
    beta: float

    @property
    def dphi(self):
        return self.phi_plus - self.phi_minus


# ---------------------------------------------------------------------------
# two- and three-level systems


def two_level(params: TwoLevelParams) -> SystemSpec:
    """Driven two-level atom; level 2 decays to level 1 at ``gamma``."""
    p = params
    H = np.array([[0.0, p.rabi / 2],
                  [p.rabi / 2, -p.detuning - 0.5j * p.gamma]])
    G = np.array([[0.0, p.gamma],
                  [0.0, 0.0]])
    D = np.array([[0.0, p.dephasing],
                  [p.dephasing, 0.0]])
    return SystemSpec(H, G, D)


def two_level_excited_population(rabi, detuning, gamma):
    """Closed-form steady-state excited population of the two-level atom."""
    return (rabi**2 / 4) / (detuning**2 + gamma**2 / 4 + rabi**2 / 2)


def three_level_lambda(params: ThreeLevelParams) -> SystemSpec:
    """Lambda system: ground states 1 and 2 coupled to the excited state 3.

    Level 3 decays at ``gamma``, split equally into levels 1 and 2.
    """
    p = params
    H = 0.5 * np.array([
        [p.difference, 0.0, p.rabi_a],
        [0.0, -p.difference, p.rabi_b],
        [p.rabi_a, p.rabi_b, -1j * p.gamma - 2 * p.detuning],
    ])
    G = np.zeros((3, 3))
    G[0, 2] = G[1, 2] = p.gamma / 2
    return SystemSpec(H, G)


# ---------------------------------------------------------------------------
# 15-level 87Rb waveplate

S3, S6 = sqrt(3.0), sqrt(6.0)

# upper-triangle couplings (i, j, coefficient) in units of Omega/2, 1-based;
# the lower triangle holds the conjugates.
_PUMP_COUPLINGS = [
    (1, 5, -1.0), (1, 9, -1.0),
    (2, 6, -1.0), (2, 10, -S3),
    (3, 11, -S6),
]
_PROBE_COUPLINGS = [
    (4, 13, -1.0),
    (5, 12, 1.0), (5, 14, -1.0),
    (6, 13, 1.0),
    (7, 12, S6),
    (8, 13, S3),
    (9, 12, 1.0), (9, 14, 1.0),
    (10, 13, S3),
    (11, 14, S6),
]

# (upper, lower) coherences summed for each circular probe component
SIGMA_PLUS_LEGS = ((13, 4), (14, 5), (12, 7), (13, 8), (14, 9))
SIGMA_MINUS_LEGS = ((12, 5), (13, 6), (12, 9), (13, 10), (14, 11))

# decay channels out of level 14 are in the ratio 1:1:1:3:6
B_MIN_SQUARED = 1.0 / (1 + 1 + 1 + 3 + 6)
# the weakest probe leg, |14> - |9>
_MIN_LEG = (14, 9)


def _rb87_sources(p: WaveplateParams) -> np.ndarray:
    """Population source matrix, ``G[i, j]`` = rate from level j into level i."""
    ga, gg, gbd, gbi = p.gamma_a, p.gamma_g, p.gamma_bd, p.gamma_bi
    G = np.zeros((15, 15))

    def add(i, j, rate):
        G[i - 1, j - 1] += rate

    # ground F=1 sublevels
    for j in (4, 5, 9):
        add(1, j, ga / 12)
    add(1, 7, ga / 2)
    add(1, 8, ga / 4)

    for j in (4, 6):
        add(2, j, ga / 12)
    add(2, 8, ga / 4)
    add(2, 9, ga / 3)
    add(2, 10, ga / 4)

    for j in (5, 6, 9):
        add(3, j, ga / 12)
    add(3, 10, ga / 4)
    add(3, 11, ga / 2)

    for i in (1, 2, 3):
        for j in (12, 13, 14):
            add(i, j, gbi / 18)
        add(i, 15, gg / 3)

    # 5P1/2 sublevels fed by 6S1/2
    add(4, 12, gbd / 12)
    add(4, 13, gbd / 12)
    add(5, 12, gbd / 12)
    add(5, 14, gbd / 12)
    add(6, 13, gbd / 12)
    add(6, 14, gbd / 12)
    add(7, 12, gbd / 2)
    add(8, 12, gbd / 4)
    add(8, 13, gbd / 4)
    add(9, 12, gbd / 12)
    add(9, 13, gbd / 3)
    add(9, 14, gbd / 12)
    add(10, 13, gbd / 4)
    add(10, 14, gbd / 4)
    add(11, 14, gbd / 2)

    # 5S1/2 F=2 reservoir
    for j in (1, 2, 3):
        add(15, j, gg)
    for j in (4, 5, 6):
        add(15, j, 5 * ga / 6)
    for j in (7, 8, 9, 10, 11):
        add(15, j, ga / 2)
    for j in (12, 13, 14):
        add(15, j, 5 * gbi / 6)
    return G


def _rb87_hamiltonian(p: WaveplateParams) -> np.ndarray:
    H = np.zeros((15, 15), dtype=complex)
    for k in (1, 2, 3, 15):
        H[k - 1, k - 1] = -0.5j * p.gamma_g
    for k in (4, 5, 6):
        H[k - 1, k - 1] = -p.delta_p - 0.5j * p.gamma_a
    for k in (7, 8, 9, 10, 11):
        H[k - 1, k - 1] = p.hyperfine - p.delta_p - 0.5j * p.gamma_a
    for k in (12, 13, 14):
        H[k - 1, k - 1] = -p.delta_s - p.delta_p - 0.5j * p.gamma_b
    for couplings, omega in ((_PUMP_COUPLINGS, p.omega_p), (_PROBE_COUPLINGS, p.omega_s)):
        for i, j, c in couplings:
            H[i - 1, j - 1] = c * omega / 2
            H[j - 1, i - 1] = np.conj(H[i - 1, j - 1])
    return H


def rb87_waveplate(params: WaveplateParams | None = None) -> SystemSpec:
    """15-level 87Rb ladder driven by a sigma+ pump and a weak probe.

    Raises
    ------
    SpecError
        If the assembled source terms do not close the population budget.
    """
    p = params if params is not None else WaveplateParams()
    spec = SystemSpec(_rb87_hamiltonian(p), _rb87_sources(p))
    report = validate_spec(spec)
    if not report.ok:
        raise SpecError(f"rb87 model fails validation:\n{report}", report)
    return spec


def probe_leg_ratios(omega_s: float = 1.0) -> dict:
    """Signed probe Rabi frequency of each (upper, lower) leg over the weakest leg.

    The sign follows the coupling table, so that ``ratio * rho[upper, lower]``
    has the same sign convention on every leg.
    """
    H = _rb87_hamiltonian(WaveplateParams(omega_s=omega_s, omega_p=0.0))
    ref = H[_MIN_LEG[0] - 1, _MIN_LEG[1] - 1].real
    return {
        (i, j): H[j - 1, i - 1].real / ref
        for i, j in SIGMA_PLUS_LEGS + SIGMA_MINUS_LEGS
    }


_RATIOS = probe_leg_ratios()


def _beta(p: WaveplateParams, omega_min: float) -> float:
    gamma = p.gamma_b if p.beta_gamma is None else p.beta_gamma
    return (B_MIN_SQUARED * 3 * p.atom_density * gamma * p.wavelength**3
            / (4 * np.pi**2 * omega_min))


def polarization_observables(rho, params: WaveplateParams | None = None,
                             omega_min: float | None = None) -> PolarizationObservables:
    """Probe phase shifts and transmission factors of the two circular components.

    ``omega_min`` defaults to ``params.omega_s`` (the weakest probe leg).
    """
    p = params if params is not None else WaveplateParams()
    rho = np.asarray(rho)
    if rho.shape != (15, 15):
        raise ValueError(f"expected a 15-level density matrix, got {rho.shape}")
    omega_min = p.omega_s if omega_min is None else omega_min
    beta = _beta(p, omega_min)
    kL = 2 * np.pi / p.wavelength * p.cell_length

    def leg_sum(legs):
        return sum(_RATIOS[i, j] * rho[i - 1, j - 1] for i, j in legs)

    plus, minus = leg_sum(SIGMA_PLUS_LEGS), leg_sum(SIGMA_MINUS_LEGS)
    return PolarizationObservables(
        phi_plus=float(kL * beta / 2 * plus.real),
        phi_minus=float(kL * beta / 2 * minus.real),
        trans_plus=float(np.exp(-kL * beta * plus.imag / 2)),
        trans_minus=float(np.exp(-kL * beta * minus.imag / 2)),
        beta=float(beta),
    )


def jones_output(obs: PolarizationObservables) -> np.ndarray:
    """Output Jones vector for an x-polarized input probe."""
    right = 0.5 * np.array([1.0, 1j])
    left = 0.5 * np.array([1.0, -1j])
    return (right * obs.trans_plus * np.exp(1j * obs.phi_plus)
            + left * obs.trans_minus * np.exp(1j * obs.phi_minus))


def excited_population(rho, level: int) -> float:
    """Population of ``level`` (1-based)."""
    rho = np.asarray(rho)
    if not 1 <= level <= rho.shape[0]:
        raise IndexError(f"level {level} outside [1, {rho.shape[0]}]")
    return float(rho[level - 1, level - 1].real)


def mirror_relabeling():
    """Permutation and sign gauge mapping m -> -m in the 15-level scheme.

    Returns ``(perm, signs)`` (0-based) such that
    ``rho_m = signs[:, None] * signs[None, :] * rho[np.ix_(perm, perm)]``
    exchanges the roles of the sigma+ and sigma- probe legs.  The sign flip on
    the F'=1 levels accounts for the opposite Clebsch-Gordan signs of mirrored
    legs through that manifold.
    """
    mirror = {1: 3, 2: 2, 3: 1, 4: 6, 5: 5, 6: 4, 7: 11, 8: 10, 9: 9, 10: 8,
              11: 7, 12: 14, 13: 13, 14: 12, 15: 15}
    perm = np.array([mirror[k] - 1 for k in range(1, 16)])
    signs = np.ones(15)
    signs[[3, 4, 5]] = -1.0
    return perm, signs
