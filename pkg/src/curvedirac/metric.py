"""Metric specifications and the sectioned metric file format.

Example file::

    [header]
    name = schwarzschild
    coords = t, r, theta, phi
    signature = +---

    [metric]
    g[t][t] = 1 - 2*M/r
    g[r][r] = -1/(1 - 2*M/r)
    g[theta][theta] = -r^2
    g[phi][phi] = -r^2*sin(theta)^2

    [constants]
    M = 1

    [domain]
    r = 3..10
    theta = 0.3..2.8

    [params]
    mass = 0
    coupling = 1

Only the upper triangle needs to be given; a lower-triangle entry that is
also present must be structurally identical to its mirror. Entries that are
not listed are zero. Coordinates without a ``[domain]`` line are sampled
from ``DEFAULT_INTERVAL``.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AsymmetricInput,
    DimensionMismatch,
    DomainError,
    ExpressionSyntaxError,
    FormatError,
    InputError,
    MissingSection,
    SamplingExhausted,
    SignatureMismatch,
    SingularMetric,
)
from .matrices import inverse, matmul
from .symexpr import ONE, ZERO, eval_many, max_deviation, parse_expr, sample_values, to_text
from .symexpr.core import RESERVED
from .tensor import DOWN, UP, Tensor

DEFAULT_INTERVAL = (-1.0, 1.0)
DEFAULT_SIGNATURE_4 = (1, -1, -1, -1)
VALIDATION_SAMPLES = 8

_SECTIONS = ("header", "metric", "stress-energy", "constants", "domain", "params")
_HEADER_KEYS = ("name", "coords", "signature")
_PARAM_KEYS = ("mass", "coupling")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")
_ENTRY = re.compile(r"^\s*([gT])\s*\[\s*([A-Za-z_0-9]+)\s*\]\s*\[\s*([A-Za-z_0-9]+)\s*\]\s*$")


@dataclass(frozen=True, eq=False)
class MetricSpec:
    name: str
    coords: tuple
    signature: tuple
    g: tuple
    T: tuple | None = None
    constants: dict = field(default_factory=dict)
    sample_domain: dict = field(default_factory=dict)
    coupling: float = 1.0
    mass: float = 0.0
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def domain(self) -> dict:
        """Sampling interval for every coordinate."""
        return {c: tuple(self.sample_domain.get(c, DEFAULT_INTERVAL)) for c in self.coords}

    def fixed(self) -> dict:
        return dict(self.constants)

    def interior_domain(self, margin=0.05) -> dict:
        out = {}
        for c, (lo, hi) in self.domain().items():
            w = hi - lo
            out[c] = (lo + margin * w, hi - margin * w)
        return out

    def widths(self) -> tuple:
        return tuple(hi - lo for lo, hi in (self.domain()[c] for c in self.coords))

    def metric_tensor(self) -> Tensor:
        return Tensor(self.dim, (DOWN, DOWN), tuple(x for row in self.g for x in row), ((0, 1, 1),), "g")

    def stress_energy(self) -> Tensor | None:
        if self.T is None:
            return None
        return Tensor(self.dim, (DOWN, DOWN), tuple(x for row in self.T for x in row), ((0, 1, 1),), "T")

    def is_diagonal(self) -> bool:
        return all(self.g[a][b] == ZERO for a in range(self.dim) for b in range(self.dim) if a != b)

    def with_stress_energy(self, T) -> MetricSpec:
        return dataclasses.replace(self, T=tuple(tuple(row) for row in T))

    def replace(self, **changes) -> MetricSpec:
        return dataclasses.replace(self, **changes)

    def structurally_equal(self, other: MetricSpec) -> bool:
        return (
            self.name == other.name
            and self.coords == other.coords
            and self.signature == other.signature
            and self.g == other.g
            and self.T == other.T
            and self.constants == other.constants
            and self.domain() == other.domain()
            and self.coupling == other.coupling
            and self.mass == other.mass
        )

    def metric_at(self, point: dict) -> np.ndarray:
        """Numeric ``g_{ab}`` at a coordinate point (constants filled in)."""
        bind = {**self.constants, **point}
        flat = eval_many([x for row in self.g for x in row], bind)
        return flat.real.reshape(self.dim, self.dim)


def _parse_signature(text, line):
    text = text.strip()
    if not text or any(ch not in "+-" for ch in text):
        raise FormatError(f"signature must be a string of '+'/'-', got {text!r}", line)
    return tuple(1 if ch == "+" else -1 for ch in text)


def _parse_float(text, line, what):
    try:
        return float(text)
    except ValueError:
        raise FormatError(f"{what}: not a number: {text!r}", line) from None


def parse_metric_file(text: str) -> MetricSpec:
    """Parse and validate a metric file (see module docstring)."""
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise FormatError(f"malformed section header {line!r}", lineno)
            current = line[1:-1].strip().lower()
            if current not in _SECTIONS:
                raise FormatError(f"unknown section [{current}]", lineno)
            if current in sections:
                raise FormatError(f"duplicate section [{current}]", lineno)
            sections[current] = []
            continue
        if current is None:
            raise FormatError("entry outside of any section", lineno)
        if "=" not in line:
            raise FormatError(f"expected 'key = value', got {line!r}", lineno)
        key, value = line.split("=", 1)
        sections[current].append((key.strip(), value.strip(), lineno))

    for required in ("header", "metric"):
        if required not in sections:
            raise MissingSection(f"missing [{required}] section")

    header = {}
    for key, value, lineno in sections["header"]:
        if key not in _HEADER_KEYS:
            raise FormatError(f"unknown header key {key!r}", lineno)
        if key in header:
            raise FormatError(f"duplicate header key {key!r}", lineno)
        header[key] = (value, lineno)
    if "coords" not in header:
        raise MissingSection("[header] has no coords= entry")

    coords_text, coords_line = header["coords"]
    coords = tuple(c.strip() for c in coords_text.split(",") if c.strip())
    for c in coords:
        if not _IDENT.match(c):
            raise FormatError(f"bad coordinate name {c!r}", coords_line)
        if c in RESERVED:
            raise FormatError(f"coordinate name {c!r} is reserved", coords_line)
    if len(set(coords)) != len(coords):
        raise FormatError("duplicate coordinate names", coords_line)
    dim = len(coords)
    if not 2 <= dim <= 4:
        raise DimensionMismatch(f"dimension must be 2..4, got {dim}", coords_line)

    if "signature" in header:
        sig_text, sig_line = header["signature"]
        signature = _parse_signature(sig_text, sig_line)
        if len(signature) != dim:
            raise DimensionMismatch(f"signature has {len(signature)} entries for {dim} coordinates", sig_line)
    else:
        signature = DEFAULT_SIGNATURE_4 if dim == 4 else (1,) + (-1,) * (dim - 1)
    name = header.get("name", ("unnamed", 0))[0]

    constants = {}
    for key, value, lineno in sections.get("constants", []):
        if not _IDENT.match(key) or key in RESERVED:
            raise FormatError(f"bad constant name {key!r}", lineno)
        if key in coords:
            raise FormatError(f"constant {key!r} shadows a coordinate", lineno)
        if key in constants:
            raise FormatError(f"duplicate constant {key!r}", lineno)
        constants[key] = _parse_float(value, lineno, key)

    sample_domain = {}
    for key, value, lineno in sections.get("domain", []):
        if key not in coords:
            raise FormatError(f"domain given for unknown coordinate {key!r}", lineno)
        if ".." not in value:
            raise FormatError(f"domain must be 'lo..hi', got {value!r}", lineno)
        lo_t, hi_t = value.split("..", 1)
        lo, hi = _parse_float(lo_t, lineno, key), _parse_float(hi_t, lineno, key)
        if not lo < hi:
            raise FormatError(f"empty domain interval for {key!r}", lineno)
        sample_domain[key] = (lo, hi)

    params = {}
    for key, value, lineno in sections.get("params", []):
        if key not in _PARAM_KEYS:
            raise FormatError(f"unknown parameter {key!r}", lineno)
        params[key] = _parse_float(value, lineno, key)
    mass = params.get("mass", 0.0)
    if mass < 0:
        raise FormatError("mass must be non-negative")

    allowed = set(coords) | set(constants)

    def read_matrix(section, letter):
        entries = {}
        for key, value, lineno in sections[section]:
            m = _ENTRY.match(key)
            if not m or m.group(1) != letter:
                raise FormatError(f"expected {letter}[a][b] in [{section}], got {key!r}", lineno)
            idx = []
            for tok in (m.group(2), m.group(3)):
                if tok in coords:
                    idx.append(coords.index(tok))
                elif tok.isdigit() and int(tok) < dim:
                    idx.append(int(tok))
                else:
                    raise DimensionMismatch(f"index {tok!r} is not one of {', '.join(coords)}", lineno)
            try:
                expr = parse_expr(value)
            except ExpressionSyntaxError as exc:
                # keep the specific error type, just say where it happened
                exc.line = lineno
                exc.args = (f"line {lineno}: {exc}",)
                raise
            except InputError as exc:
                raise FormatError(str(exc), lineno) from exc
            unknown = expr.free_symbols() - allowed
            if unknown:
                raise FormatError(f"unknown symbol(s) {sorted(unknown)} in {key}", lineno)
            a, b = idx
            if (a, b) in entries:
                raise FormatError(f"duplicate entry {key}", lineno)
            entries[(a, b)] = (expr, lineno)
        rows = [[ZERO] * dim for _ in range(dim)]
        for (a, b), (expr, lineno) in entries.items():
            mirror = entries.get((b, a))
            if mirror is not None and mirror[0] != expr:
                raise AsymmetricInput(
                    f"{letter}[{coords[a]}][{coords[b]}] differs from {letter}[{coords[b]}][{coords[a]}]",
                    max(lineno, mirror[1]),
                )
            rows[a][b] = expr
            rows[b][a] = expr
        return tuple(tuple(r) for r in rows)

    g = read_matrix("metric", "g")
    T = read_matrix("stress-energy", "T") if "stress-energy" in sections else None

    spec = MetricSpec(
        name=name,
        coords=coords,
        signature=signature,
        g=g,
        T=T,
        constants=constants,
        sample_domain=sample_domain,
        coupling=params.get("coupling", 1.0),
        mass=mass,
    )
    validate(spec)
    return spec


def validate(spec: MetricSpec, n_samples=VALIDATION_SAMPLES, seed=0) -> None:
    """Numeric checks: nonzero determinant and matching eigenvalue signs."""
    flat = [x for row in spec.g for x in row]
    try:
        points, values = sample_values(flat, spec.domain(), n_samples, seed, spec.constants)
    except SamplingExhausted as exc:
        raise SingularMetric(f"metric {spec.name!r} cannot be evaluated on its domain: {exc}") from exc
    want = sorted(spec.signature)
    for p, row in zip(points, values):
        gm = row.real.reshape(spec.dim, spec.dim)
        if np.max(np.abs(row.imag)) > 1e-12:
            raise InputError(f"metric {spec.name!r} is complex at {p}")
        eig = np.linalg.eigvalsh(gm)
        scale = max(1.0, float(np.max(np.abs(eig))))
        if np.min(np.abs(eig)) <= 1e-12 * scale:
            raise SingularMetric(f"metric {spec.name!r} is degenerate at {p}")
        got = sorted(int(np.sign(x)) for x in eig)
        if got != want:
            raise SignatureMismatch(f"metric {spec.name!r} has eigenvalue signs {got} at {p}, expected {want}")


def _fmt_float(x: float) -> str:
    return repr(float(x))


def format_metric(spec: MetricSpec) -> str:
    """Inverse of :func:`parse_metric_file`."""
    out = ["[header]", f"name = {spec.name}", f"coords = {', '.join(spec.coords)}"]
    out.append("signature = " + "".join("+" if s > 0 else "-" for s in spec.signature))
    out += ["", "[metric]"]
    for a in range(spec.dim):
        for b in range(a, spec.dim):
            if spec.g[a][b] != ZERO:
                out.append(f"g[{spec.coords[a]}][{spec.coords[b]}] = {to_text(spec.g[a][b])}")
    if spec.T is not None:
        out += ["", "[stress-energy]"]
        for a in range(spec.dim):
            for b in range(a, spec.dim):
                if spec.T[a][b] != ZERO:
                    out.append(f"T[{spec.coords[a]}][{spec.coords[b]}] = {to_text(spec.T[a][b])}")
    if spec.constants:
        out += ["", "[constants]"]
        out += [f"{k} = {_fmt_float(v)}" for k, v in sorted(spec.constants.items())]
    if spec.sample_domain:
        out += ["", "[domain]"]
        for c in spec.coords:
            if c in spec.sample_domain:
                lo, hi = spec.sample_domain[c]
                out.append(f"{c} = {_fmt_float(lo)}..{_fmt_float(hi)}")
    out += ["", "[params]", f"mass = {_fmt_float(spec.mass)}", f"coupling = {_fmt_float(spec.coupling)}", ""]
    return "\n".join(out)


def inverse_metric(spec: MetricSpec) -> Tensor:
    """``g^{ab}`` via adjugate/determinant, checked against ``g^{ac} g_{cb} = delta``."""
    cached = spec._cache.get("ginv")
    if cached is not None:
        return cached
    try:
        rows = inverse(spec.g)
    except DomainError as exc:
        raise SingularMetric(f"metric {spec.name!r} has identically zero determinant") from exc
    n = spec.dim
    lhs, rhs = [], []
    prod = matmul(rows, spec.g)
    for a in range(n):
        for b in range(n):
            lhs.append(prod[a][b])
            rhs.append(ONE if a == b else ZERO)
    try:
        dev = max_deviation(lhs, rhs, spec.domain(), 16, 0, spec.constants)
    except SamplingExhausted as exc:
        raise SingularMetric(f"inverse of {spec.name!r} is singular on its domain") from exc
    if dev > 1e-8:
        raise SingularMetric(f"inverse metric check failed for {spec.name!r} (deviation {dev:.3g})")
    t = Tensor(n, (UP, UP), tuple(x for row in rows for x in row), ((0, 1, 1),), "g_inv")
    spec._cache["ginv"] = t
    return t
