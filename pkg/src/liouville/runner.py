"""Observable evaluation and parameter sweeps over model files."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .core import LiouvilleError, build_M_fast, steady_state
from .modelfile import ModelFile, SweepResult, instantiate
from .models import WaveplateParams, excited_population, polarization_observables

WAVEPLATE_COLUMNS = ["phi_plus", "phi_minus", "trans_plus", "trans_minus", "dphi"]


def observable_columns(observe) -> list:
    cols = []
    for obs in observe:
        if obs[0] == "pop":
            cols.append(f"pop{obs[1]}")
        elif obs[0] == "coh":
            cols.append(f"coh{obs[1]}_{obs[2]}")
        else:
            cols.extend(WAVEPLATE_COLUMNS)
    return cols


def waveplate_params_for(spec) -> WaveplateParams:
    """Probe parameters read back from a 15-level spec.

    The weakest probe Rabi frequency comes from the |9>-|14> coupling and the
    decay rate in the beta prefactor from the 6S1/2 diagonal; the cell
    geometry keeps its defaults.
    """
    H = spec.hamiltonian
    return WaveplateParams(omega_s=2 * abs(H[8, 13]), gamma_b=-2 * H[11, 11].imag)


def evaluate(observe, rho, spec) -> list:
    values = []
    for obs in observe:
        if obs[0] == "pop":
            values.append(excited_population(rho, obs[1]))
        elif obs[0] == "coh":
            values.append(complex(rho[obs[1] - 1, obs[2] - 1]))
        else:
            o = polarization_observables(rho, waveplate_params_for(spec))
            values.extend([o.phi_plus, o.phi_minus, o.trans_plus, o.trans_minus, o.dphi])
    return values


def nan_row(observe) -> list:
    row = []
    for obs in observe:
        if obs[0] == "coh":
            row.append(complex(np.nan, np.nan))
        elif obs[0] == "pop":
            row.append(np.nan)
        else:
            row.extend([np.nan] * len(WAVEPLATE_COLUMNS))
    return row


def sweep_threads() -> int:
    """Worker count for sweeps, capped by ``LIOUVILLE_THREADS`` (default 1)."""
    raw = os.environ.get("LIOUVILLE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_sweep(model: ModelFile, grid=None, builder=build_M_fast, threads=None):
    """Steady state at every grid point.

    Returns
    -------
    result : SweepResult
        Rows ordered by grid position.
    failures : list of (x, str)
        Points whose solve failed; their cells are NaN.
    """
    if grid is None:
        if model.sweep is None:
            raise ValueError("model has no sweep directive")
        grid = model.sweep.grid()
    grid = np.asarray(grid, dtype=float)
    name = model.sweep.name if model.sweep is not None else "x"

    def point(x):
        try:
            spec = instantiate(model, x)
            rho = steady_state(spec, builder=builder)
            return evaluate(model.observe, rho, spec), None
        except LiouvilleError as exc:
            return nan_row(model.observe), str(exc).splitlines()[0]

    threads = sweep_threads() if threads is None else threads
    if threads > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(point, grid))
    else:
        outcomes = [point(x) for x in grid]

    result = SweepResult(name, observable_columns(model.observe))
    failures = []
    for x, (values, err) in zip(grid, outcomes):
        result.add(float(x), values)
        if err is not None:
            failures.append((float(x), err))
    return result, failures
