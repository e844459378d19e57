"""
Line-oriented model description files (``.lvm``).

Grammar, one declaration per line, ``#`` starts a comment::

    levels N
    ham   I J C0 [C1]          complex: RE or RE:IM
    src   I J R0 [R1]
    deph  I J R0 [R1]
    sweep NAME FROM TO POINTS
    observe pop K | observe coh I J | observe waveplate

Every coefficient pair means ``c0 + c1 * x`` where ``x`` is the single sweep
variable.  Indices are 1-based.  When only one of a Hamiltonian pair
``ham I J`` / ``ham J I`` is given, the other is its complex conjugate.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .core import SpecError, SystemSpec, validate_spec

__all__ = [
    "Diagnostic",
    "ModelFileError",
    "Sweep",
    "ModelFile",
    "SweepResult",
    "parse_model",
    "serialize_model",
    "instantiate",
    "spec_at",
    "model_from_spec",
    "emit_csv",
    "load_model",
    "bundled_model",
    "BUNDLED_MODELS",
]

BUNDLED_MODELS = {
    "two-level": "two_level.lvm",
    "lambda3": "lambda3.lvm",
    "rb87-waveplate": "rb87_waveplate.lvm",
}

_REAL = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?\Z", re.ASCII)
_INT = re.compile(r"\d{1,18}\Z", re.ASCII)
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z", re.ASCII)


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    kind: str  # "lexical", "syntax" or "semantic"
    message: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.kind} error: {self.message}"


class ModelFileError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True)
class Sweep:
    name: str
    start: float
    stop: float
    points: int

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class ModelFile:
    n_levels: int
    ham: dict = field(default_factory=dict)  # (i, j) -> (complex c0, complex c1)
    src: dict = field(default_factory=dict)  # (i, j) -> (float c0, float c1)
    deph: dict = field(default_factory=dict)
    sweep: Sweep | None = None
    observe: tuple = ()  # ("pop", k) | ("coh", i, j) | ("waveplate",)


@dataclass
class SweepResult:
    variable: str
    columns: list
    rows: list = field(default_factory=list)  # [(x, [values...]), ...]

    def add(self, x, values):
        self.rows.append((x, list(values)))


# ---------------------------------------------------------------------------
# parsing


class _Token:
    __slots__ = ("text", "col")

    def __init__(self, text, col):
        self.text = text
        self.col = col


def _tokens(line):
    return [_Token(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]


class _Parser:
    def __init__(self):
        self.diags = []
        self.levels = None
        self.levels_pos = None
        self.entries = {"ham": {}, "src": {}, "deph": {}}
        self.positions = {}
        self.sweep = None
        self.observe = []
        self.observe_pos = []

    def error(self, lineno, col, kind, msg):
        self.diags.append(Diagnostic(lineno, col, kind, msg))

    def real(self, lineno, tok):
        if len(tok.text) > 400 or not _REAL.match(tok.text):
            self.error(lineno, tok.col, "lexical", f"invalid real literal {tok.text!r}")
            return None
        value = float(tok.text)
        if not np.isfinite(value):
            self.error(lineno, tok.col, "semantic", f"literal {tok.text!r} overflows")
            return None
        return value

    def complex(self, lineno, tok):
        parts = tok.text.split(":")
        if len(parts) > 2:
            self.error(lineno, tok.col, "lexical", f"invalid complex literal {tok.text!r}")
            return None
        values = []
        for k, part in enumerate(parts):
            sub = _Token(part, tok.col + (len(parts[0]) + 1 if k else 0))
            v = self.real(lineno, sub)
            if v is None:
                return None
            values.append(v)
        return complex(values[0], values[1] if len(values) == 2 else 0.0)

    def index(self, lineno, tok):
        if not _INT.match(tok.text):
            self.error(lineno, tok.col, "lexical", f"invalid integer {tok.text!r}")
            return None
        return int(tok.text)

    def arity(self, lineno, toks, lo, hi, usage):
        if not lo <= len(toks) <= hi:
            col = toks[min(len(toks), hi) - 1].col if len(toks) > hi else toks[0].col
            self.error(lineno, col, "syntax", f"expected '{usage}'")
            return False
        return True

    def line(self, lineno, text):
        text = text.split("#", 1)[0]
        toks = _tokens(text)
        if not toks:
            return
        kw = toks[0].text
        if kw == "levels":
            if not self.arity(lineno, toks, 2, 2, "levels INT"):
                return
            n = self.index(lineno, toks[1])
            if n is None:
                return
            if self.levels is not None:
                self.error(lineno, toks[0].col, "semantic",
                           f"duplicate levels declaration (first on line {self.levels_pos[0]})")
            elif n < 1:
                self.error(lineno, toks[1].col, "semantic", "levels must be at least 1")
            else:
                self.levels = n
                self.levels_pos = (lineno, toks[1].col)
        elif kw in ("ham", "src", "deph"):
            kind = "CPX" if kw == "ham" else "REAL"
            if not self.arity(lineno, toks, 4, 5, f"{kw} INT INT {kind} [{kind}]"):
                return
            i, j = self.index(lineno, toks[1]), self.index(lineno, toks[2])
            conv = self.complex if kw == "ham" else self.real
            coeffs = [conv(lineno, t) for t in toks[3:]]
            if i is None or j is None or any(c is None for c in coeffs):
                return
            if len(coeffs) == 1:
                coeffs.append(0 * coeffs[0])
            key = (i, j)
            table = self.entries[kw]
            if key in table:
                first = self.positions[kw, key][0]
                self.error(lineno, toks[0].col, "semantic",
                           f"duplicate {kw} entry ({i}, {j}) (first on line {first})")
                return
            table[key] = tuple(coeffs)
            self.positions[kw, key] = (lineno, toks[1].col, toks[2].col)
        elif kw == "sweep":
            if not self.arity(lineno, toks, 5, 5, "sweep IDENT REAL REAL INT"):
                return
            name = toks[1].text
            if not _IDENT.match(name):
                self.error(lineno, toks[1].col, "lexical", f"invalid sweep name {name!r}")
                return
            start, stop = self.real(lineno, toks[2]), self.real(lineno, toks[3])
            points = self.index(lineno, toks[4])
            if start is None or stop is None or points is None:
                return
            if points < 1:
                self.error(lineno, toks[4].col, "semantic", "sweep needs at least 1 point")
            elif self.sweep is not None:
                self.error(lineno, toks[0].col, "semantic", "only one sweep directive is allowed")
            else:
                self.sweep = Sweep(name, start, stop, points)
        elif kw == "observe":
            if len(toks) < 2:
                self.error(lineno, toks[0].col, "syntax",
                           "expected 'observe pop INT | observe coh INT INT | observe waveplate'")
                return
            what = toks[1].text
            if what == "pop":
                if not self.arity(lineno, toks, 3, 3, "observe pop INT"):
                    return
                k = self.index(lineno, toks[2])
                if k is not None:
                    self.add_observe(lineno, ("pop", k), [toks[2].col])
            elif what == "coh":
                if not self.arity(lineno, toks, 4, 4, "observe coh INT INT"):
                    return
                i, j = self.index(lineno, toks[2]), self.index(lineno, toks[3])
                if i is not None and j is not None:
                    self.add_observe(lineno, ("coh", i, j), [toks[2].col, toks[3].col])
            elif what == "waveplate":
                if self.arity(lineno, toks, 2, 2, "observe waveplate"):
                    self.add_observe(lineno, ("waveplate",), [])
            else:
                self.error(lineno, toks[1].col, "syntax", f"unknown observable {what!r}")
        else:
            self.error(lineno, toks[0].col, "syntax", f"unknown directive {kw!r}")

    def add_observe(self, lineno, obs, cols):
        if obs in self.observe:
            self.error(lineno, 1, "semantic", f"duplicate observable {' '.join(map(str, obs))}")
            return
        self.observe.append(obs)
        self.observe_pos.append((lineno, cols))

    def finish(self, last_line):
        if self.levels is None:
            self.error(max(last_line, 1), 1, "syntax", "missing levels declaration")
            return
        N = self.levels
        for kw, table in self.entries.items():
            for (i, j), coeffs in list(table.items()):
                lineno, ci, cj = self.positions[kw, (i, j)]
                for idx, col in ((i, ci), (j, cj)):
                    if not 1 <= idx <= N:
                        self.error(lineno, col, "semantic",
                                   f"{kw} index {idx} out of range [1, {N}]")
                if kw == "deph" and i == j:
                    self.error(lineno, ci, "semantic", "dephasing diagonal must be zero")
        ham = self.entries["ham"]
        for (i, j), (a0, a1) in ham.items():
            if i < j and (j, i) in ham:
                b0, b1 = ham[j, i]
                if not (np.isclose(a0, np.conj(b0), rtol=1e-12, atol=0)
                        and np.isclose(a1, np.conj(b1), rtol=1e-12, atol=0)):
                    lineno, ci, _ = self.positions["ham", (j, i)]
                    self.error(lineno, ci, "semantic",
                               f"ham ({j}, {i}) is not the conjugate of ham ({i}, {j})")
        for obs, (lineno, cols) in zip(self.observe, self.observe_pos):
            for idx, col in zip(obs[1:], cols):
                if not 1 <= idx <= N:
                    self.error(lineno, col, "semantic",
                               f"observable index {idx} out of range [1, {N}]")
            if obs[0] == "waveplate" and N != 15:
                self.error(lineno, 1, "semantic", "waveplate observable needs a 15-level model")


def parse_model(text: str) -> ModelFile:
    """Parse model-file text.

    Raises
    ------
    ModelFileError
        Carrying one :class:`Diagnostic` (line, column, message) per problem.
    """
    p = _Parser()
    lines = text.splitlines()
    for lineno, line in enumerate(lines, start=1):
        p.line(lineno, line)
    p.finish(len(lines))
    if p.diags:
        raise ModelFileError(sorted(p.diags, key=lambda d: (d.line, d.column)))
    return _canonical(ModelFile(p.levels, p.entries["ham"], p.entries["src"],
                                p.entries["deph"], p.sweep, tuple(p.observe)))


# ---------------------------------------------------------------------------
# serialization


def _fmt_real(v):
    v = float(v)
    if v == 0:
        return "0"
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _fmt_cpx(z):
    z = complex(z)
    if z.imag == 0:
        return _fmt_real(z.real)
    return f"{_fmt_real(z.real)}:{_fmt_real(z.imag)}"


def serialize_model(model: ModelFile) -> str:
    """Canonical text form: sorted entries, zero coefficients omitted."""
    out = [f"levels {model.n_levels}"]
    for kw, table, fmt in (("ham", model.ham, _fmt_cpx),
                           ("src", model.src, _fmt_real),
                           ("deph", model.deph, _fmt_real)):
        for (i, j), (c0, c1) in sorted(table.items()):
            if c0 == 0 and c1 == 0:
                continue
            line = f"{kw} {i} {j} {fmt(c0)}"
            if c1 != 0:
                line += f" {fmt(c1)}"
            out.append(line)
    if model.sweep is not None:
        s = model.sweep
        out.append(f"sweep {s.name} {_fmt_real(s.start)} {_fmt_real(s.stop)} {s.points}")
    for obs in model.observe:
        out.append("observe " + " ".join(str(t) for t in obs))
    return "\n".join(out) + "\n"


def _canonical(model):
    """Drop all-zero entries so equal models compare equal."""
    def clean(table):
        return {k: v for k, v in sorted(table.items()) if not (v[0] == 0 and v[1] == 0)}
    return ModelFile(model.n_levels, clean(model.ham), clean(model.src),
                     clean(model.deph), model.sweep, tuple(model.observe))


# ---------------------------------------------------------------------------
# instantiation


def spec_at(model: ModelFile, x: float = 0.0, closed_system: bool = True) -> SystemSpec:
    """Evaluate every entry at ``x`` without checking invariants."""
    N = model.n_levels
    H = np.zeros((N, N), dtype=complex)
    G = np.zeros((N, N))
    D = np.zeros((N, N))
    for (i, j), (c0, c1) in model.ham.items():
        H[i - 1, j - 1] = c0 + c1 * x
        if (j, i) not in model.ham:
            H[j - 1, i - 1] = np.conj(c0 + c1 * x)
    for (i, j), (c0, c1) in model.src.items():
        G[i - 1, j - 1] = c0 + c1 * x
    for (i, j), (c0, c1) in model.deph.items():
        D[i - 1, j - 1] = c0 + c1 * x
    return SystemSpec(H, G, D, closed_system=closed_system)


def instantiate(model: ModelFile, x: float = 0.0, closed_system: bool = True) -> SystemSpec:
    """Evaluate every entry at ``x`` and build a validated SystemSpec.

    Raises
    ------
    SpecError
        Naming the violated invariant and the offending entry.
    """
    spec = spec_at(model, x, closed_system)
    report = validate_spec(spec)
    if not report.ok:
        raise SpecError(f"model at x = {x!r} violates:\n{report}", report)
    return spec


def model_from_spec(spec: SystemSpec, sweep_hamiltonian=None, sweep: Sweep | None = None,
                    observe=()) -> ModelFile:
    """Build a ModelFile from a spec, optionally with a linear sweep dependence.

    ``sweep_hamiltonian`` is the N x N matrix of ``c1`` coefficients for the
    Hamiltonian; ``spec`` supplies the ``c0`` values.
    """
    N = spec.n_levels
    slope = np.zeros((N, N), dtype=complex) if sweep_hamiltonian is None else np.asarray(sweep_hamiltonian)
    ham = {}
    for i in range(N):
        for j in range(N):
            c0, c1 = complex(spec.hamiltonian[i, j]), complex(slope[i, j])
            if c0 != 0 or c1 != 0:
                ham[i + 1, j + 1] = (c0, c1)
    src = {(i + 1, j + 1): (float(spec.source[i, j]), 0.0)
           for i, j in zip(*np.nonzero(spec.source))}
    deph = {(i + 1, j + 1): (float(spec.dephasing[i, j]), 0.0)
            for i, j in zip(*np.nonzero(spec.dephasing))}
    return ModelFile(N, dict(sorted(ham.items())), dict(sorted(src.items())),
                     dict(sorted(deph.items())), sweep, tuple(observe))


# ---------------------------------------------------------------------------
# files and CSV


def load_model(path) -> ModelFile:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def bundled_model(name: str) -> ModelFile:
    try:
        fname = BUNDLED_MODELS[name]
    except KeyError:
        raise KeyError(f"unknown builtin model {name!r}; "
                       f"choose from {', '.join(BUNDLED_MODELS)}") from None
    text = resources.files("liouville").joinpath("data", fname).read_text(encoding="utf-8")
    return parse_model(text)


def _fmt_cell(v):
    return format(float(v), ".17g")


def emit_csv(result: SweepResult, key: str = "x") -> str:
    """CSV text: header ``x,<col>,...`` then one row per point.

    Complex columns (detected per column over all rows) are split into
    ``<name>.re`` and ``<name>.im``.
    """
    ncol = len(result.columns)
    is_complex = [any(isinstance(vals[k], complex) or np.iscomplexobj(vals[k])
                      for _, vals in result.rows) for k in range(ncol)]
    header = [key]
    for name, cplx in zip(result.columns, is_complex):
        header += [f"{name}.re", f"{name}.im"] if cplx else [name]
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for x, vals in result.rows:
        cells = [_fmt_cell(x)]
        for v, cplx in zip(vals, is_complex):
            if cplx:
                v = complex(v)
                cells += [_fmt_cell(v.real), _fmt_cell(v.imag)]
            else:
                cells.append(_fmt_cell(np.real(v)))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()
