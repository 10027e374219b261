"""Second-order Dirac operators in curved spacetime.

The squared operator gamma^l gamma^m nabla_l nabla_m splits into the
d'Alembertian g^{lm} nabla_l nabla_m plus the commutator term
1/2 gamma^l gamma^m [nabla_l, nabla_m]. That term is evaluated two ways:

``direct``
    1/2 sum_{lm} gamma^l gamma^m R_{lm}, which the Clifford relation and Ricci
    symmetry reduce to 1/2 R.
``paper``
    1/4 R, obtained by substituting the vacuum field equation
    R_{lm} -> 1/2 g_{lm} R and contracting gamma^l gamma_l.

The two differ by a factor of two whenever R != 0; both are always computed
and compared so the difference is reported rather than hidden.

The four-component field carries an upper coordinate index: the connection
acts as nabla_m Psi^l = d_m Psi^l + Gamma^l_{mn} Psi^n on components
``0..dim-1``; any remaining components (dim < 4) are differentiated as
scalars.
"""

from __future__ import annotations

import re
from fractions import Fraction
from dataclasses import dataclass

import numpy as np

from .curvature import compute_curvature
from .errors import FormatError, InputError, MissingStressEnergy, NotFlat
from .matrices import identity, matadd, matmul, matvec, scale, zeros
from .metric import MetricSpec, inverse_metric
from .spinor import GammaSet, max_abs, spec_gammas
from .symexpr import (
    HALF,
    ZERO,
    Rational,
    eval_many,
    add,
    diff,
    max_deviation,
    mul,
    neg,
    number,
    parse_expr,
    simplify,
)
from .tensor import Tensor

PAPER = "paper"
DIRECT = "direct"
MODES = (PAPER, DIRECT)
QUARTER = Rational(Fraction(1, 4))
VACUUM = "vacuum"
MATTER = "matter"


@dataclass(frozen=True)
class SpinorField:
    components: tuple

    def __post_init__(self):
        if len(self.components) != 4:
            raise ValueError("a spinor field has exactly four components")

    def __getitem__(self, k):
        return self.components[k]

    def check_symbols(self, spec: MetricSpec):
        allowed = set(spec.coords) | set(spec.constants)
        for k, c in enumerate(self.components):
            extra = c.free_symbols() - allowed
            if extra:
                raise InputError(f"psi[{k}] uses unknown symbol(s) {sorted(extra)}")


@dataclass(frozen=True)
class DiracOperator:
    spec: MetricSpec
    inverse_metric: Tensor
    christoffel: Tensor
    potential: tuple
    mode: str
    curvature_term_mode: str

    @property
    def mass(self):
        return self.spec.mass

    @property
    def coupling(self):
        return self.spec.coupling


@dataclass(frozen=True)
class CurvatureTermReport:
    direct: tuple
    paper: tuple
    difference: float
    agree: bool


def _field(components) -> SpinorField:
    return components if isinstance(components, SpinorField) else SpinorField(tuple(components))


def covariant_derivative(spec: MetricSpec, field, lam: int, gamma: Tensor | None = None) -> tuple:
    """nabla_lam Psi^l for all four components."""
    field = _field(field)
    gamma = compute_curvature(spec).christoffel if gamma is None else gamma
    x = spec.coords[lam]
    n = spec.dim
    out = []
    for l in range(4):
        terms = [diff(field[l], x)]
        if l < n:
            terms += [mul(gamma[l, lam, v], field[v]) for v in range(n) if gamma[l, lam, v] != ZERO]
        out.append(simplify(add(*terms)))
    return tuple(out)


def second_covariant_derivative(spec, field, lam, mu, gamma=None, _first=None) -> tuple:
    """nabla_lam nabla_mu Psi^l.

    The intermediate nabla_mu Psi^l has one extra lower index, so it picks up
    +Gamma^l_{lam s} (nabla_mu Psi^s) - Gamma^s_{lam mu} (nabla_s Psi^l).
    """
    field = _field(field)
    gamma = compute_curvature(spec).christoffel if gamma is None else gamma
    n = spec.dim
    first = _first if _first is not None else {}

    def d1(m):
        if m not in first:
            first[m] = covariant_derivative(spec, field, m, gamma)
        return first[m]

    inner = d1(mu)
    x = spec.coords[lam]
    out = []
    for l in range(4):
        terms = [diff(inner[l], x)]
        if l < n:
            terms += [mul(gamma[l, lam, s], inner[s]) for s in range(n) if gamma[l, lam, s] != ZERO]
        terms += [neg(mul(gamma[s, lam, mu], d1(s)[l])) for s in range(n) if gamma[s, lam, mu] != ZERO]
        out.append(simplify(add(*terms)))
    return tuple(out)


def dalembertian(spec: MetricSpec, field, gamma=None) -> tuple:
    """g^{lm} nabla_l nabla_m Psi."""
    field = _field(field)
    gamma = compute_curvature(spec).christoffel if gamma is None else gamma
    ginv = inverse_metric(spec)
    first = {}
    acc = [[] for _ in range(4)]
    for lam in range(spec.dim):
        for mu in range(spec.dim):
            if ginv[lam, mu] == ZERO:
                continue
            dd = second_covariant_derivative(spec, field, lam, mu, gamma, first)
            for l in range(4):
                acc[l].append(mul(ginv[lam, mu], dd[l]))
    return tuple(simplify(add(*terms)) for terms in acc)


def gamma_contraction(gammas: GammaSet, rank2: Tensor) -> tuple:
    """sum_{lm} gamma^l gamma^m X_{lm} as a 4x4 matrix."""
    n = len(gammas)
    terms = []
    for lam in range(n):
        for mu in range(n):
            x = rank2[lam, mu]
            if x == ZERO:
                continue
            terms.append(scale(x, matmul(gammas[lam], gammas[mu])))
    if not terms:
        return zeros(4)
    return tuple(tuple(simplify(e) for e in row) for row in matadd(*terms))


def commutator_curvature_term(spec: MetricSpec, gammas: GammaSet | None = None, mode: str = PAPER) -> tuple:
    """The curvature part of the squared operator as a 4x4 matrix (see module docstring)."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    bundle = compute_curvature(spec)
    if mode == PAPER:
        return scale(mul(QUARTER, bundle.scalar), identity(4))
    gammas = spec_gammas(spec) if gammas is None else gammas
    return tuple(tuple(simplify(mul(HALF, e)) for e in row) for row in gamma_contraction(gammas, bundle.ricci))


def curvature_term_report(spec: MetricSpec, gammas=None, n_samples=32, seed=0, tol=1e-9) -> CurvatureTermReport:
    direct = commutator_curvature_term(spec, gammas, DIRECT)
    paper = commutator_curvature_term(spec, gammas, PAPER)
    diffs = [add(direct[i][j], neg(paper[i][j])) for i in range(4) for j in range(4)]
    err = max_abs(diffs, spec, n_samples, seed)
    return CurvatureTermReport(direct, paper, err, err <= tol)


def matter_term(spec: MetricSpec, gammas: GammaSet | None = None) -> tuple:
    """sum gamma^l gamma^m T_{lm}."""
    T = spec.stress_energy()
    if T is None:
        raise MissingStressEnergy(f"metric {spec.name!r} has no stress-energy tensor")
    gammas = spec_gammas(spec) if gammas is None else gammas
    return gamma_contraction(gammas, T)


def _mass_term(spec):
    m = number(spec.mass)
    return scale(mul(m, m), identity(4))


def assemble_vacuum_operator(spec: MetricSpec, curvature_term_mode: str = PAPER) -> DiracOperator:
    """nabla^l nabla_l + (curvature term) + m^2; any stress-energy is ignored."""
    bundle = compute_curvature(spec)
    term = commutator_curvature_term(spec, mode=curvature_term_mode)
    potential = tuple(tuple(simplify(e) for e in row) for row in matadd(term, _mass_term(spec)))
    return DiracOperator(spec, inverse_metric(spec), bundle.christoffel, potential, VACUUM, curvature_term_mode)


def assemble_matter_operator(spec: MetricSpec, curvature_term_mode: str = PAPER) -> DiracOperator:
    """nabla^l nabla_l + (curvature term) - 1/2 K gamma^l gamma^m T_{lm} + m^2."""
    if spec.T is None:
        raise MissingStressEnergy(f"metric {spec.name!r} has no stress-energy tensor")
    bundle = compute_curvature(spec)
    term = commutator_curvature_term(spec, mode=curvature_term_mode)
    coupling = neg(mul(HALF, number(spec.coupling)))
    matter = scale(coupling, matter_term(spec))
    potential = tuple(tuple(simplify(e) for e in row) for row in matadd(term, matter, _mass_term(spec)))
    return DiracOperator(spec, inverse_metric(spec), bundle.christoffel, potential, MATTER, curvature_term_mode)


def apply_operator(op: DiracOperator, field) -> tuple:
    """(nabla^l nabla_l + potential) Psi, componentwise."""
    field = _field(field)
    box = dalembertian(op.spec, field, op.christoffel)
    pot = matvec(op.potential, field.components)
    return tuple(simplify(add(a, b)) for a, b in zip(box, pot))


def flat_dirac_squared(spec: MetricSpec, field, gammas: GammaSet | None = None) -> tuple:
    """gamma^m gamma^n d_m d_n Psi + m^2 Psi with plain partial derivatives."""
    field = _field(field)
    gammas = spec_gammas(spec) if gammas is None else gammas
    n = spec.dim
    out = [[] for _ in range(4)]
    for mu in range(n):
        for nu in range(n):
            dd = [diff(diff(c, spec.coords[nu]), spec.coords[mu]) for c in field.components]
            gg = matmul(gammas[mu], gammas[nu])
            v = matvec(gg, dd)
            for l in range(4):
                out[l].append(v[l])
    m2 = mul(number(spec.mass), number(spec.mass))
    return tuple(simplify(add(*out[l], mul(m2, field[l]))) for l in range(4))


def default_field_corpus(spec: MetricSpec) -> list:
    """Six polynomial / exponential test fields in the metric's coordinates."""
    c = list(spec.coords) + ["0"] * (4 - spec.dim)
    a, b, p, q = c[0], c[1], c[2], c[3]
    texts = [
        (f"{a}^2*{b}", f"{b}*{p}", "3", f"{q}^3"),
        (f"exp({a} - {b})", "0", f"sin({p})", f"{a}*{q}"),
        (f"exp(-i*(2*{a} - {b}))", f"{a}*{b}*{p}*{q}", f"{b}^2 - {p}^2", "1"),
        (f"cos({b})*exp({p}/2)", f"{a}^3 - 2*{b}", f"i*{q}*{a}", f"{p}^2*{q}"),
        (f"1 + {a} + {b}^2 + {p}^3 + {q}^4", f"exp(2*{q})", "0", f"sin({a} + {b})"),
        (f"{a}*exp(-{a}^2)", f"cos({p} - {q})", f"{b}^2*{a}^2", f"exp(i*{b})"),
    ]
    return [SpinorField(tuple(parse_expr(t) for t in row)) for row in texts]


def flat_limit_check(spec: MetricSpec, fields=None, tol=1e-9, n_samples=32, seed=0) -> bool:
    """On a flat chart the assembled vacuum operator must equal the flat squared Dirac operator."""
    bundle = compute_curvature(spec)
    if not bundle.christoffel.is_zero():
        raise NotFlat(f"metric {spec.name!r} has non-vanishing Christoffel symbols")
    op = assemble_vacuum_operator(spec)
    fields = default_field_corpus(spec) if fields is None else fields
    for f in fields:
        lhs = apply_operator(op, f)
        rhs = flat_dirac_squared(spec, f)
        if max_deviation(lhs, rhs, spec.domain(), n_samples, seed, spec.constants) > tol:
            return False
    return True


_PSI = re.compile(r"^\s*psi\s*\[\s*([0-3])\s*\]\s*$")


def parse_field_file(text: str) -> SpinorField:
    """Four lines ``psi[k] = <expr>``, k = 0..3; ``#`` starts a comment."""
    comps = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"expected psi[k] = <expr>, got {line!r}", lineno)
        key, value = line.split("=", 1)
        m = _PSI.match(key)
        if not m:
            raise FormatError(f"expected psi[0..3] on the left, got {key.strip()!r}", lineno)
        k = int(m.group(1))
        if k in comps:
            raise FormatError(f"duplicate psi[{k}]", lineno)
        try:
            comps[k] = parse_expr(value)
        except InputError as exc:
            raise FormatError(str(exc), lineno) from exc
    missing = [k for k in range(4) if k not in comps]
    if missing:
        raise FormatError(f"missing components psi{missing}")
    return SpinorField(tuple(comps[k] for k in range(4)))


def potential_at(op: DiracOperator, bindings) -> np.ndarray:
    flat = [e for row in op.potential for e in row]
    return eval_many(flat, {**op.spec.constants, **bindings}).reshape(4, 4)
