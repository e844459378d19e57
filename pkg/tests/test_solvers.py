import numpy as np
import pytest

from liouville.core import (
    DivergenceError,
    SingularSystemError,
    SpecError,
    StepSizeError,
    SystemSpec,
    build_M_fast,
    density_diagnostics,
    evolve,
    max_rate,
    spectral_gap,
    reduce,
    residual,
    steady_state,
    validate_spec,
)
from liouville.models import (
    ThreeLevelParams,
    TwoLevelParams,
    WaveplateParams,
    rb87_waveplate,
    three_level_lambda,
    two_level,
    two_level_excited_population,
)

from .conftest import random_density


# --- reduce -----------------------------------------------------------------

def test_reduce_three_level_columns(rng):
    M = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
    w, s = reduce(M)
    assert w.shape == (8, 8) and s.shape == (8,)
    np.testing.assert_array_equal(s, M[:8, 8])
    Mp = M[:8, :8]
    for col in range(8):
        expected = Mp[:, col] - s if col in (0, 4) else Mp[:, col]
        np.testing.assert_array_equal(w[:, col], expected)


def test_reduce_two_level_layout(rng):
    M = rng.normal(size=(4, 4))
    w, s = reduce(M)
    np.testing.assert_array_equal(w[:, 0], M[:3, 0] - M[:3, 3])
    np.testing.assert_array_equal(w[:, 1:], M[:3, 1:3])


def test_reduce_zero():
    w, s = reduce(np.zeros((16, 16)))
    assert not w.any() and not s.any()


def test_reduce_rejects_non_square_size():
    with pytest.raises(ValueError):
        reduce(np.zeros((5, 5)))


# --- steady state -------------------------------------------------------------

@pytest.mark.parametrize("delta", [-30.0, 0.0, 2.5])
def test_two_level_no_drive(delta):
    rho = steady_state(two_level(TwoLevelParams(rabi=0, detuning=delta, gamma=1)))
    np.testing.assert_allclose(rho, np.diag([1, 0]), atol=1e-14)


def test_two_level_saturation():
    rho = steady_state(two_level(TwoLevelParams(rabi=1, detuning=0, gamma=1)))
    assert rho[1, 1].real == pytest.approx(1 / 3, abs=1e-12)


@pytest.mark.parametrize("omega, delta, gamma", [(5, 0, 1), (5, 3.3, 1), (0.4, -1, 2), (7, 40, 0.5)])
def test_two_level_matches_formula(omega, delta, gamma):
    rho = steady_state(two_level(TwoLevelParams(rabi=omega, detuning=delta, gamma=gamma)))
    assert rho[1, 1].real == pytest.approx(
        two_level_excited_population(omega, delta, gamma), abs=1e-12)


def test_lambda_dark_state():
    rho = steady_state(three_level_lambda(ThreeLevelParams()))
    assert abs(rho[2, 2]) <= 1e-12
    assert rho[0, 1] == pytest.approx(-0.5, abs=1e-12)
    # dark state (|1> - |2>)/sqrt(2)
    dark = np.array([1, -1, 0]) / np.sqrt(2)
    np.testing.assert_allclose(rho, np.outer(dark, dark), atol=1e-12)


def test_recovery_identity(make_spec):
    spec = make_spec(4)
    rho = steady_state(spec)
    b = rho.reshape(-1)[:-1]
    assert rho[3, 3] == 1 - sum(b[k * 4 + k] for k in range(3))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_random_steady_states(make_spec, n):
    spec = make_spec(n)
    rho = steady_state(spec)
    M = build_M_fast(spec)
    assert residual(M, rho) <= 1e-10 * np.abs(M).max()
    d = density_diagnostics(rho)
    assert d["trace"] == pytest.approx(1, abs=1e-10)
    assert d["hermiticity_error"] <= 1e-12
    assert d["min_eigenvalue"] >= -1e-8


def test_zero_dynamics_is_singular():
    with pytest.raises(SingularSystemError, match="not unique"):
        steady_state(SystemSpec(np.zeros((3, 3))))


def test_decoupled_levels_are_singular():
    # two undriven, undecaying levels: any mixture is stationary
    H = np.diag([0.0, 1.0])
    with pytest.raises(SingularSystemError):
        steady_state(SystemSpec(H))


def test_open_system_rejected():
    spec = two_level(TwoLevelParams()).replace(closed_system=False)
    with pytest.raises(SpecError, match="closed"):
        steady_state(spec)


def test_invalid_spec_rejected():
    spec = two_level(TwoLevelParams())
    G = spec.source.copy()
    G[0, 1] = 0.5
    with pytest.raises(SpecError, match="level 2"):
        steady_state(spec.replace(source=G))


def test_spec_is_immutable():
    spec = two_level(TwoLevelParams())
    with pytest.raises(ValueError):
        spec.hamiltonian[0, 0] = 1


# --- validation ---------------------------------------------------------------

def test_validate_two_level():
    assert validate_spec(two_level(TwoLevelParams(rabi=5, gamma=1))).ok


def test_validate_rb87_level_12():
    spec = rb87_waveplate()
    assert validate_spec(spec).ok
    p = WaveplateParams()
    influx = spec.source[:, 11].sum()
    assert influx == pytest.approx(p.gamma_b, abs=1e-12)
    assert influx == pytest.approx(-2 * spec.hamiltonian[11, 11].imag, abs=1e-12)


def test_validate_halved_source():
    spec = two_level(TwoLevelParams(gamma=1))
    G = spec.source.copy()
    G[0, 1] /= 2
    report = validate_spec(spec.replace(source=G))
    assert len(report.violations) == 1
    v = report.violations[0]
    assert v.kind == "closure" and v.indices == (2,)
    assert v.magnitude == pytest.approx(0.5)


def test_validate_reports_each_invariant():
    H = np.array([[0.1j, 1.0], [2.0, 0]])
    G = np.array([[0, -1.0], [0, 0]])
    D = np.array([[0.3, 0], [-0.1, 0]])
    kinds = {v.kind for v in validate_spec(SystemSpec(H, G, D)).violations}
    assert kinds >= {"hermiticity", "gain", "negative-source", "negative-dephasing",
                     "dephasing-diagonal", "closure"}


def test_validate_open_system_skips_closure():
    spec = SystemSpec(np.diag([0, -0.5j]), closed_system=False)
    assert validate_spec(spec).ok
    assert not validate_spec(spec.replace(closed_system=True)).ok


# --- residual -----------------------------------------------------------------

def test_residual_zero_matrix(rng):
    assert residual(np.zeros((9, 9)), random_density(3, rng)) == 0


def test_residual_not_fixed_point():
    spec = two_level(TwoLevelParams(rabi=0, gamma=1))
    r = residual(build_M_fast(spec), np.diag([0.5, 0.5]))
    assert r == pytest.approx(0.5)


def test_residual_dimension_mismatch():
    with pytest.raises(ValueError):
        residual(np.zeros((4, 4)), np.eye(3))


# --- evolve -------------------------------------------------------------------

def test_pure_decay():
    spec = two_level(TwoLevelParams(rabi=0, gamma=1))
    traj = evolve(spec, np.diag([0, 1]), t_end=2.0, dt=0.01)
    for t in (0.5, 1.0, 2.0):
        k = int(round(t / 0.01))
        assert traj.times[k] == pytest.approx(t)
        assert traj.states[k][1, 1].real == pytest.approx(np.exp(-t), abs=1e-8)


def test_fixed_point_stays_put():
    spec = three_level_lambda(ThreeLevelParams(difference=0.7, detuning=0.2))
    rho = steady_state(spec)
    traj = evolve(spec, rho, t_end=5.0, dt=0.01)
    assert np.max(np.abs(traj.states - rho)) <= 1e-9


def test_long_time_reaches_steady_state():
    spec = two_level(TwoLevelParams(rabi=5, detuning=0, gamma=1))
    traj = evolve(spec, np.diag([1, 0]), t_end=50.0, dt=0.02)
    assert np.max(np.abs(traj.final - steady_state(spec))) <= 1e-6


@pytest.mark.parametrize("spec", [
    two_level(TwoLevelParams(rabi=5, detuning=0)),
    two_level(TwoLevelParams(rabi=5, detuning=3)),
    three_level_lambda(ThreeLevelParams()),
    three_level_lambda(ThreeLevelParams(difference=2.0)),
], ids=["2lvl-res", "2lvl-det", "lambda-dark", "lambda-raman"])
def test_evolve_steady_agreement(spec):
    # 50 slowest relaxation times
    M = build_M_fast(spec)
    t_end = 50 / spectral_gap(M)
    rho0 = np.zeros_like(spec.hamiltonian)
    rho0[0, 0] = 1
    traj = evolve(spec, rho0, t_end=t_end, dt=0.1 / max_rate(spec))
    assert np.max(np.abs(traj.final - steady_state(spec))) <= 1e-6


def test_evolution_keeps_hermiticity_and_trace(make_spec, rng):
    spec = make_spec(4)
    traj = evolve(spec, random_density(4, rng), t_end=3.0, dt=0.1 / 4 / 4)
    herm = np.max(np.abs(traj.states - traj.states.conj().transpose(0, 2, 1)))
    assert herm <= 1e-12
    traces = np.trace(traj.states, axis1=1, axis2=2)
    assert np.max(np.abs(traces - 1)) <= 1e-6


def test_times_strictly_increasing_and_end_exact():
    spec = two_level(TwoLevelParams(rabi=1))
    traj = evolve(spec, np.diag([1, 0]), t_end=1.0, dt=0.03)
    assert np.all(np.diff(traj.times) > 0)
    assert traj.times[-1] == 1.0
    assert len(traj) == len(traj.states)


def test_step_guard():
    spec = two_level(TwoLevelParams(rabi=5, detuning=100))
    with pytest.raises(StepSizeError) as exc:
        evolve(spec, np.diag([1, 0]), t_end=1.0, dt=0.01)
    assert exc.value.bound == pytest.approx(0.1 / abs(-100 - 0.5j))


def test_divergence_detected():
    spec = two_level(TwoLevelParams(rabi=0))

    def unstable(spec):
        return 50.0 * np.eye(4)  # exponential growth, overflows within the run

    with pytest.raises(DivergenceError):
        evolve(spec, np.diag([1, 0]), t_end=20.0, dt=0.05, builder=unstable)
