"""
Vectorized Liouville equation for an N-level system.

The density matrix ``rho`` (N x N) is flattened row-major into a vector ``A``
of length N**2, so that element ``rho[a, b]`` (0-based) sits at position
``a*N + b``.  In the 1-based notation used by :func:`index_to_pair` and
:func:`nzrem` this is ``n = (alpha-1)*N + beta``.  The equation of motion

    dA/dt = M A

is assembled from a complex effective Hamiltonian ``H`` (decay on the
diagonal as negative imaginary parts), a population source matrix ``G`` and
a transverse dephasing matrix ``D``:

    Q = -i (H rho - rho H^dagger) + diag(G @ diag(rho)) - D * rho

All rates are dimensionless multiples of a reference rate chosen per model.

Two builders are provided.  :func:`build_M_naive` fills M element by element,
evaluating the full Liouvillian once per entry (O(N**4) evaluations).
:func:`build_M_fast` fills M column by column from columns of ``H``, ``G`` and
``D`` (O(N**2) slice assignments).  They must agree to round-off.

For closed systems the last population ``rho[N-1, N-1]`` is eliminated with
the trace constraint, giving the reduced system ``W B = -S`` solved by
:func:`steady_state`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

__all__ = [
    "LiouvilleError",
    "SpecError",
    "SingularSystemError",
    "StepSizeError",
    "DivergenceError",
    "SystemSpec",
    "ReducedSystem",
    "Trajectory",
    "Violation",
    "ValidationReport",
    "nzrem",
    "index_to_pair",
    "pair_to_index",
    "vectorize",
    "devectorize",
    "apply_liouvillian",
    "build_M_naive",
    "build_M_fast",
    "reduce",
    "steady_state",
    "evolve",
    "validate_spec",
    "residual",
    "max_rate",
    "spectral_gap",
    "density_diagnostics",
    "random_spec",
]

CLOSURE_TOL = 1e-9
HERMITIAN_TOL = 1e-12
DEFAULT_COND_LIMIT = 1e12
STEP_GUARD = 0.1


class LiouvilleError(Exception):
    """Base class for errors raised by this package."""


class SpecError(LiouvilleError, ValueError):
    """A SystemSpec violates one of its invariants."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class SingularSystemError(LiouvilleError):
    """The reduced system has no unique solution."""

    def __init__(self, message, rcond=None):
        super().__init__(message)
        self.rcond = rcond


class StepSizeError(LiouvilleError, ValueError):
    """The integration step exceeds the stability guard."""

    def __init__(self, message, bound):
        super().__init__(message)
        self.bound = bound


class DivergenceError(LiouvilleError):
    """Non-finite values appeared during integration."""


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """Full input to the vectorization.

    Parameters
    ----------
    hamiltonian : (N, N) complex array
        Effective Hamiltonian in the rotating frame.  Level decay enters as
        ``-1j * Gamma_level / 2`` on the diagonal.
    source : (N, N) real array, optional
        ``source[i, j]`` is the rate at which population of level ``j`` feeds
        level ``i``.  Defaults to zero.
    dephasing : (N, N) real array, optional
        ``dephasing[i, j]`` multiplies ``-rho[i, j]``; zero diagonal.
        Defaults to zero.
    closed_system : bool
        Assert that total population is conserved.
    """

    hamiltonian: np.ndarray
    source: np.ndarray = None
    dephasing: np.ndarray = None
    closed_system: bool = True
    n_levels: int = field(init=False)

    def __post_init__(self):
        h = np.asarray(self.hamiltonian)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 1:
            raise SpecError(f"hamiltonian must be a square matrix, got shape {h.shape}")
        n = h.shape[0]
        object.__setattr__(self, "n_levels", n)
        object.__setattr__(self, "hamiltonian", _frozen(h, complex))
        for name in ("source", "dephasing"):
            value = getattr(self, name)
            if value is None:
                value = np.zeros((n, n))
            value = np.asarray(value)
            if np.iscomplexobj(value):
                if np.any(value.imag != 0):
                    raise SpecError(f"{name} must be real")
                value = value.real
            if value.shape != (n, n):
                raise SpecError(f"{name} has shape {value.shape}, expected {(n, n)}")
            object.__setattr__(self, name, _frozen(value, float))

    def replace(self, **changes) -> "SystemSpec":
        kwargs = dict(
            hamiltonian=self.hamiltonian,
            source=self.source,
            dephasing=self.dephasing,
            closed_system=self.closed_system,
        )
        kwargs.update(changes)
        return SystemSpec(**kwargs)

    def __eq__(self, other):
        if not isinstance(other, SystemSpec):
            return NotImplemented
        return (
            self.closed_system == other.closed_system
            and np.array_equal(self.hamiltonian, other.hamiltonian)
            and np.array_equal(self.source, other.source)
            and np.array_equal(self.dephasing, other.dephasing)
        )

    __hash__ = None


class ReducedSystem(NamedTuple):
    """Trace-reduced steady-state system ``w @ b = -s``."""

    w: np.ndarray
    s: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (len(times), N, N)

    def __len__(self):
        return len(self.times)

    @property
    def final(self):
        return self.states[-1]


# ---------------------------------------------------------------------------
# index bookkeeping


def nzrem(a: int, b: int) -> int:
    """Remainder of ``a / b``, or ``b`` when the remainder is zero."""
    r = a % b
    return r if r else b


def index_to_pair(n: int, N: int) -> tuple[int, int]:
    """Map a 1-based vector position to the 1-based (row, col) of rho."""
    if not 1 <= n <= N * N:
        raise IndexError(f"vector index {n} outside [1, {N * N}]")
    beta = nzrem(n, N)
    alpha = 1 + (n - beta) // N
    return alpha, beta


def pair_to_index(alpha: int, beta: int, N: int) -> int:
    """Inverse of :func:`index_to_pair`."""
    if not (1 <= alpha <= N and 1 <= beta <= N):
        raise IndexError(f"pair ({alpha}, {beta}) outside [1, {N}]")
    return (alpha - 1) * N + beta


def vectorize(rho) -> np.ndarray:
    """Row-major flattening, ``A[a*N + b] = rho[a, b]``."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    return rho.astype(complex).reshape(-1)


def devectorize(A, N: int | None = None) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 1:
        raise ValueError("expected a 1-d vector")
    n = int(round(np.sqrt(A.size)))
    if n * n != A.size:
        raise ValueError(f"vector length {A.size} is not a perfect square")
    if N is not None and N != n:
        raise ValueError(f"vector length {A.size} does not match N={N}")
    return A.astype(complex).reshape(n, n)


# ---------------------------------------------------------------------------
# Liouvillian and its matrix form


def apply_liouvillian(spec: SystemSpec, rho) -> np.ndarray:
    """Time derivative of ``rho`` under ``spec``."""
    rho = np.asarray(rho, dtype=complex)
    N = spec.n_levels
    if rho.shape != (N, N):
        raise ValueError(f"rho has shape {rho.shape}, spec has {N} levels")
    H = spec.hamiltonian
    Q = -1j * (H @ rho - rho @ H.conj().T)
    Q[np.diag_indices(N)] += spec.source @ np.diagonal(rho)
    Q -= spec.dephasing * rho
    return Q


def build_M_naive(spec: SystemSpec) -> np.ndarray:
    """Evolution matrix by the element-wise prescription.

    For every (n, p), ``rho`` is set to a single unit entry at the pair of
    ``p``, the Liouvillian is evaluated, and the entry at the pair of ``n`` is
    read off.  This deliberately recomputes the full Liouvillian for each of
    the N**4 entries; it is the reference that :func:`build_M_fast` is checked
    against.
    """
    N = spec.n_levels
    M = np.zeros((N * N, N * N), dtype=complex)
    for n in range(1, N * N + 1):
        alpha, beta = index_to_pair(n, N)
        for p in range(1, N * N + 1):
            eps, sigma = index_to_pair(p, N)
            rho = np.zeros((N, N), dtype=complex)
            rho[eps - 1, sigma - 1] = 1.0
            Q = apply_liouvillian(spec, rho)
            M[n - 1, p - 1] = Q[alpha - 1, beta - 1]
    return M


def build_M_fast(spec: SystemSpec) -> np.ndarray:
    """Evolution matrix assembled column by column.

    With ``rho = |e><s|`` the column ``e*N + s`` of M (0-based) receives

    * ``+1j * conj(H[:, s])`` in rows ``e*N .. e*N + N-1`` (from ``rho H^dagger``),
    * ``-1j * H[:, e]`` in rows ``s, s+N, ..., s + N*(N-1)`` (from ``H rho``),
    * ``G[:, e]`` on the population rows ``0, N+1, 2N+2, ...`` when ``e == s``,
    * ``-D[e, s]`` on its own diagonal entry when ``e != s``.
    """
    N = spec.n_levels
    H = spec.hamiltonian
    Hc = H.conj()
    G = spec.source
    D = spec.dephasing
    M = np.zeros((N * N, N * N), dtype=complex)
    pop_rows = np.arange(0, N * N, N + 1)
    for e in range(N):
        block = slice(e * N, (e + 1) * N)
        for s in range(N):
            col = e * N + s
            M[block, col] = 1j * Hc[:, s]
            M[s::N, col] -= 1j * H[:, e]
            if e == s:
                M[pop_rows, col] += G[:, e]
            else:
                M[col, col] -= D[e, s]
    return M


def reduce(M) -> ReducedSystem:
    """Eliminate ``rho[N-1, N-1]`` through the trace constraint."""
    M = np.asarray(M, dtype=complex)
    K = M.shape[0]
    N = int(round(np.sqrt(K)))
    if M.shape != (K, K) or N * N != K:
        raise ValueError(f"M must be N^2 x N^2, got shape {M.shape}")
    s = M[: K - 1, K - 1].copy()
    w = M[: K - 1, : K - 1].copy()
    for k in range(N - 1):
        w[:, k * N + k] -= s
    return ReducedSystem(w, s)


def residual(M, rho) -> float:
    """Max-norm of ``M @ vectorize(rho)``."""
    M = np.asarray(M)
    A = vectorize(rho)
    if M.shape != (A.size, A.size):
        raise ValueError(f"M has shape {M.shape}, rho has {A.size} entries")
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(M @ A)))


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    kind: str
    indices: tuple
    magnitude: float
    message: str

    def __str__(self):
        return self.message


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


def validate_spec(spec: SystemSpec, tol: float = CLOSURE_TOL) -> ValidationReport:
    """Check the SystemSpec invariants.

    Indices in the report are 1-based.  When ``spec.closed_system`` is set,
    each level's total outgoing source rate ``sum_i G[i, j]`` must equal its
    decay rate ``-2 Im H[j, j]`` to within ``tol``.
    """
    H, G, D = spec.hamiltonian, spec.source, spec.dephasing
    N = spec.n_levels
    out = []

    for name, a in (("hamiltonian", H), ("source", G), ("dephasing", D)):
        bad = ~np.isfinite(a)
        for i, j in zip(*np.nonzero(bad)):
            out.append(Violation("non-finite", (name, i + 1, j + 1), np.inf,
                                 f"{name}[{i + 1},{j + 1}] is not finite"))
    if out:
        return ValidationReport(tuple(out))

    for i in range(N):
        for j in range(i + 1, N):
            gap = abs(H[i, j] - np.conj(H[j, i]))
            if gap > HERMITIAN_TOL * max(1.0, abs(H[i, j])):
                out.append(Violation(
                    "hermiticity", (i + 1, j + 1), float(gap),
                    f"H[{i + 1},{j + 1}] != conj(H[{j + 1},{i + 1}]) (gap {gap:.3g})"))
    for j in range(N):
        if H[j, j].imag > 0:
            out.append(Violation(
                "gain", (j + 1, j + 1), float(H[j, j].imag),
                f"Im H[{j + 1},{j + 1}] = {H[j, j].imag:.6g} > 0 (gain)"))
    for i, j in zip(*np.nonzero(G < 0)):
        out.append(Violation("negative-source", (i + 1, j + 1), float(-G[i, j]),
                             f"source[{i + 1},{j + 1}] = {G[i, j]:.6g} < 0"))
    for i, j in zip(*np.nonzero(D < 0)):
        out.append(Violation("negative-dephasing", (i + 1, j + 1), float(-D[i, j]),
                             f"dephasing[{i + 1},{j + 1}] = {D[i, j]:.6g} < 0"))
    for j in np.nonzero(np.diagonal(D))[0]:
        out.append(Violation("dephasing-diagonal", (j + 1, j + 1), float(abs(D[j, j])),
                             f"dephasing[{j + 1},{j + 1}] must be zero"))

    if spec.closed_system:
        influx = G.sum(axis=0)
        decay = -2.0 * np.diagonal(H).imag
        for j in range(N):
            gap = influx[j] - decay[j]
            if abs(gap) > tol:
                out.append(Violation(
                    "closure", (j + 1,), float(abs(gap)),
                    f"level {j + 1}: total source rate {influx[j]:.12g} != "
                    f"decay rate {decay[j]:.12g} (mismatch {abs(gap):.3g})"))
    return ValidationReport(tuple(out))


def _require_valid(spec):
    report = validate_spec(spec)
    if not report.ok:
        raise SpecError(f"invalid SystemSpec:\n{report}", report)


# ---------------------------------------------------------------------------
# solvers


def steady_state(spec: SystemSpec, builder=build_M_fast,
                 cond_limit: float = DEFAULT_COND_LIMIT) -> np.ndarray:
    """Steady-state density matrix of a closed system.

    Solves the reduced system ``W B = -S`` by LU factorisation with partial
    pivoting and restores ``rho[N-1, N-1]`` from the unit trace.

    Raises
    ------
    SpecError
        If ``spec`` is not closed or fails :func:`validate_spec`.
    SingularSystemError
        If the estimated condition number of ``W`` exceeds ``cond_limit``;
        the steady state is then not unique.
    """
    if not spec.closed_system:
        raise SpecError("steady_state requires a closed system")
    _require_valid(spec)
    N = spec.n_levels
    if N == 1:
        return np.ones((1, 1), dtype=complex)
    M = builder(spec)
    w, s = reduce(M)
    b = _solve(w, -s, cond_limit)
    A = np.empty(N * N, dtype=complex)
    A[:-1] = b
    A[-1] = 1.0 - sum(b[k * N + k] for k in range(N - 1))
    return A.reshape(N, N)


def _solve(w, rhs, cond_limit):
    anorm = np.linalg.norm(w, 1)
    if anorm == 0 or not np.isfinite(anorm):
        raise SingularSystemError("steady state not unique: W is zero", 0.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(w, check_finite=False)
    rcond, info = lapack.zgecon(lu, anorm, norm="1")
    if info != 0 or not rcond > 1.0 / cond_limit:
        raise SingularSystemError(
            f"steady state not unique: W is singular or ill-conditioned "
            f"(rcond {rcond:.3g})", float(rcond))
    return scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)


def max_rate(spec: SystemSpec) -> float:
    """Largest rate magnitude in ``spec``, used by the step guard."""
    return float(max(np.abs(spec.hamiltonian).max(),
                     np.abs(spec.source).max(),
                     np.abs(spec.dephasing).max()))


def evolve(spec: SystemSpec, rho0, t_end: float, dt: float,
           builder=build_M_fast) -> Trajectory:
    """Integrate ``dA/dt = M A`` from ``rho0`` up to ``t_end``.

    Uses the classical fourth-order Runge-Kutta step, which for this linear
    constant system is the fourth-order Taylor polynomial of ``exp(M h)``;
    the one-step propagator is therefore formed once and applied repeatedly.
    The step is shrunk so that an integer number of steps lands on ``t_end``.

    Raises
    ------
    StepSizeError
        If ``dt * max_rate(spec) > 0.1``.
    DivergenceError
        If the state becomes non-finite.
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if not dt > 0:
        raise ValueError("dt must be positive")
    rate = max_rate(spec)
    bound = STEP_GUARD / rate if rate > 0 else np.inf
    if dt > bound:
        raise StepSizeError(
            f"dt = {dt:.6g} exceeds the stability bound {bound:.6g} "
            f"(0.1 / max rate {rate:.6g})", bound)
    _require_valid(spec)
    rho0 = np.asarray(rho0, dtype=complex)
    N = spec.n_levels
    if rho0.shape != (N, N):
        raise ValueError(f"rho0 has shape {rho0.shape}, spec has {N} levels")

    steps = max(1, int(np.ceil(t_end / dt - 1e-9)))
    h = t_end / steps
    Mh = builder(spec) * h
    term = np.eye(N * N, dtype=complex)
    P = term.copy()
    for k in range(1, 5):
        term = term @ Mh / k
        P += term

    states = np.empty((steps + 1, N * N), dtype=complex)
    states[0] = vectorize(rho0)
    A = states[0]
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, steps + 1):
            A = P @ A
            states[k] = A
            if k % 256 == 0 and not np.all(np.isfinite(A)):
                raise DivergenceError(f"non-finite state at t = {k * h:.6g}")
    if not np.all(np.isfinite(A)):
        raise DivergenceError("non-finite state at end of integration")
    times = np.arange(steps + 1) * h
    times[-1] = t_end
    return Trajectory(times, states.reshape(steps + 1, N, N))


# ---------------------------------------------------------------------------
# diagnostics and test fixtures


def spectral_gap(M, tol: float = 1e-9) -> float:
    """Slowest non-zero relaxation rate, ``min -Re(lambda)`` over eigenvalues of M
    whose real part is below ``-tol``."""
    rates = -np.linalg.eigvals(np.asarray(M)).real
    rates = rates[rates > tol]
    return float(rates.min()) if rates.size else 0.0


def density_diagnostics(rho) -> dict:
    """Hermiticity error, trace and smallest eigenvalue of ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    herm = 0.5 * (rho + rho.conj().T)
    return {
        "trace": complex(np.trace(rho)),
        "hermiticity_error": float(np.max(np.abs(rho - rho.conj().T))),
        "min_eigenvalue": float(np.linalg.eigvalsh(herm).min()),
    }


def random_spec(n: int, rng: np.random.Generator, closed: bool = True,
                dephasing: bool = True) -> SystemSpec:
    """Random spec satisfying every invariant (closure included if ``closed``)."""
    off = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    H = np.triu(off, 1)
    H = H + H.conj().T
    G = rng.uniform(0.0, 1.0, size=(n, n)) * (rng.uniform(size=(n, n)) < 0.6)
    np.fill_diagonal(G, 0.0)
    if closed:
        decay = G.sum(axis=0)
    else:
        decay = rng.uniform(0.0, 1.0, size=n)
    H[np.diag_indices(n)] = rng.normal(size=n) - 0.5j * decay
    D = np.zeros((n, n))
    if dephasing:
        D = rng.uniform(0.0, 0.5, size=(n, n))
        D = 0.5 * (D + D.T)
        np.fill_diagonal(D, 0.0)
    return SystemSpec(H, G, D, closed_system=closed)
