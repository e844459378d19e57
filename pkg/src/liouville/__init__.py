"""
Automated vectorization of the Liouville equation for N-level atoms.

Modules
-------
core
    SystemSpec, the naive and fast evolution-matrix builders, the
    trace-reduced steady-state solver and a fixed-step integrator.
models
    Two-level, three-level Lambda and 15-level 87Rb waveplate models plus
    the probe polarization observables.
modelfile
    ``.lvm`` model description files and CSV output.
runner
    Observable evaluation and parameter sweeps.
cli
    The ``liouville`` command.
"""

from .core import (
    DivergenceError,
    LiouvilleError,
    ReducedSystem,
    SingularSystemError,
    SpecError,
    StepSizeError,
    SystemSpec,
    Trajectory,
    apply_liouvillian,
    build_M_fast,
    build_M_naive,
    devectorize,
    evolve,
    index_to_pair,
    max_rate,
    nzrem,
    reduce,
    residual,
    spectral_gap,
    steady_state,
    validate_spec,
    vectorize,
)
from .models import (
    PolarizationObservables,
    ThreeLevelParams,
    TwoLevelParams,
    WaveplateParams,
    excited_population,
    jones_output,
    polarization_observables,
    rb87_waveplate,
    three_level_lambda,
    two_level,
)
from .modelfile import (
    ModelFile,
    ModelFileError,
    SweepResult,
    emit_csv,
    instantiate,
    parse_model,
    serialize_model,
)

__version__ = "0.1.0"
