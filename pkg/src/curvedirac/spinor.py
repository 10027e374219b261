"""Tetrads, flat and curved Dirac matrices, and Clifford-algebra checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NegativeRadicand, NonDiagonalSymbolic, SignatureMismatch
from .matrices import diagonal, identity, matadd, matmul, scale, zeros
from .metric import MetricSpec, inverse_metric
from .symexpr import (
    HALF,
    I,
    ONE,
    TWO,
    ZERO,
    Func,
    Mul,
    Pow,
    Rational,
    add,
    eval_many,
    func,
    mul,
    neg,
    power,
    sample_values,
    simplify,
)

FLAT = "flat"
CURVED = "curved"
UP = "up"
DOWN = "down"


@dataclass(frozen=True)
class Tetrad:
    """``v[a][m]`` is V^a_m (flat a, coordinate m); ``v_inv[m][a]`` is V^m_a."""

    v: tuple
    v_inv: tuple


@dataclass(frozen=True)
class GammaSet:
    frame: str
    variance: str
    matrices: tuple

    def __len__(self):
        return len(self.matrices)

    def __getitem__(self, k):
        return self.matrices[k]

    def evaluate(self, bindings) -> np.ndarray:
        n = len(self.matrices)
        flat = [x for m in self.matrices for row in m for x in row]
        return eval_many(flat, bindings).reshape(n, 4, 4)


@dataclass(frozen=True)
class TraceReport:
    per_lambda: tuple
    total: tuple
    total_error: float
    per_lambda_error: float | None

    @property
    def total_ok(self):
        return self.total_error <= 1e-9

    @property
    def per_lambda_ok(self):
        return None if self.per_lambda_error is None else self.per_lambda_error <= 1e-9


# ---------------------------------------------------------------------------
# tetrads
# ---------------------------------------------------------------------------


def _sign_on_domain(e, spec: MetricSpec, n_samples=16, seed=1) -> int:
    """+1 / -1 if ``e`` is real with a fixed sign at every sample point, else 0."""
    if isinstance(e, Rational):
        return (e.value > 0) - (e.value < 0)
    try:
        _, vals = sample_values([e], spec.domain(), n_samples, seed, spec.constants)
    except DomainError:
        return 0
    v = vals[:, 0]
    if np.max(np.abs(v.imag)) > 1e-12 * (1 + np.max(np.abs(v.real))):
        return 0
    if np.all(v.real > 0):
        return 1
    if np.all(v.real < 0):
        return -1
    return 0


def _sqrt_factor(f, spec):
    """sqrt of a single positive factor, pulled through powers where the base sign is known."""
    if isinstance(f, Rational):
        return func("sqrt", f)
    if isinstance(f, Func) and f.name == "exp" and _is_real_on_domain(f.arg, spec):
        return func("exp", mul(HALF, f.arg))
    if isinstance(f, Pow) and isinstance(f.exponent, Rational) and f.exponent.value.denominator == 1:
        s = _sign_on_domain(f.base, spec)
        if s > 0:
            return power(func("sqrt", f.base), f.exponent)
        if s < 0 and f.exponent.value.numerator % 2 == 0:
            return power(func("sqrt", neg(f.base)), f.exponent)
    return func("sqrt", f)


def _is_real_on_domain(e, spec, n_samples=8):
    try:
        _, vals = sample_values([e], spec.domain(), n_samples, 2, spec.constants)
    except DomainError:
        return False
    return bool(np.all(np.abs(vals.imag) <= 1e-12 * (1 + np.abs(vals.real))))


def positive_sqrt(e, spec: MetricSpec):
    """Square root of an expression known to be positive on the sample domain.

    Products are split factor by factor, so ``sqrt(r^2*sin(theta)^2)`` becomes
    ``r*sin(theta)`` when ``r`` and ``sin(theta)`` are positive on the domain.
    Sign information is sampled numerically, never proven.
    """
    e = simplify(e)
    if not isinstance(e, Mul):
        return _sqrt_factor(e, spec)
    factors = list(e.args)
    signs = [_sign_on_domain(f, spec) for f in factors]
    if 0 in signs:
        return func("sqrt", e)
    out = []
    for f, s in zip(factors, signs):
        out.append(_sqrt_factor(f if s > 0 else neg(f), spec))
    return mul(*out)


def compute_tetrad(spec: MetricSpec) -> Tetrad:
    """Diagonal tetrad V^a_m = delta^a_m sqrt(eta_aa g_mm)."""
    cached = spec._cache.get("tetrad")
    if cached is not None:
        return cached
    if not spec.is_diagonal():
        raise NonDiagonalSymbolic(
            f"metric {spec.name!r} is not diagonal; use numeric_tetrad(spec, point) instead"
        )
    diag = []
    for m in range(spec.dim):
        radicand = simplify(mul(Rational(spec.signature[m]), spec.g[m][m]))
        if _sign_on_domain(radicand, spec) <= 0:
            raise NegativeRadicand(
                f"eta_{m}{m} * g[{spec.coords[m]}][{spec.coords[m]}] = {radicand} is not positive on the domain"
            )
        diag.append(positive_sqrt(radicand, spec))
    tet = Tetrad(diagonal(diag), diagonal([simplify(power(x, Rational(-1))) for x in diag]))
    spec._cache["tetrad"] = tet
    return tet


def numeric_tetrad(spec: MetricSpec, point: dict):
    """Tetrad at a point by congruence diagonalization of g(p) against eta.

    Returns ``(V, V_inv)`` as arrays with ``V[a, m]`` = V^a_m.
    """
    g = spec.metric_at(point)
    lam, q = np.linalg.eigh(g)
    sig = np.array(spec.signature)
    pos = [k for k in range(len(lam)) if lam[k] > 0]
    negs = [k for k in range(len(lam)) if lam[k] < 0]
    want_pos = [a for a in range(len(sig)) if sig[a] > 0]
    want_neg = [a for a in range(len(sig)) if sig[a] < 0]
    if len(pos) != len(want_pos) or len(negs) != len(want_neg):
        raise SignatureMismatch(f"eigenvalues {lam} do not match signature {tuple(sig)}")
    v = np.zeros_like(g)
    for a, k in list(zip(want_pos, pos)) + list(zip(want_neg, negs)):
        v[a, :] = np.sqrt(abs(lam[k])) * q[:, k]
    return v, np.linalg.inv(v)


def reconstruct_metric(tetrad: Tetrad, signature) -> tuple:
    """sum_ab V^a_m V^b_n eta_ab, symbolically."""
    n = len(signature)
    return tuple(
        tuple(
            add(*[mul(Rational(signature[a]), tetrad.v[a][m], tetrad.v[a][k]) for a in range(n)])
            for k in range(n)
        )
        for m in range(n)
    )


def tetrad_reconstruction_error(spec: MetricSpec, tetrad: Tetrad | None = None, n_samples=32, seed=0) -> float:
    """Max absolute |V V eta - g| and |V^-1 V - 1| over sample points."""
    tetrad = compute_tetrad(spec) if tetrad is None else tetrad
    n = spec.dim
    rec = reconstruct_metric(tetrad, spec.signature)
    prod = matmul(tetrad.v_inv, tetrad.v)
    exprs = []
    for a in range(n):
        for b in range(n):
            exprs.append(add(rec[a][b], neg(spec.g[a][b])))
            exprs.append(add(prod[a][b], neg(ONE if a == b else ZERO)))
    return max_abs(exprs, spec, n_samples, seed)


def max_abs(exprs, spec: MetricSpec, n_samples=32, seed=0) -> float:
    exprs = [e for e in exprs if e != ZERO]
    if not exprs:
        return 0.0
    _, vals = sample_values(exprs, spec.domain(), n_samples, seed, spec.constants)
    return float(np.max(np.abs(vals)))


# ---------------------------------------------------------------------------
# gamma matrices
# ---------------------------------------------------------------------------


def _dirac_basis():
    o, z = ONE, ZERO
    m1 = Rational(-1)
    g0 = diagonal([o, o, m1, m1])
    g1 = ((z, z, z, o), (z, z, o, z), (z, m1, z, z), (m1, z, z, z))
    g2 = ((z, z, z, neg(I)), (z, z, I, z), (z, I, z, z), (neg(I), z, z, z))
    g3 = ((z, z, o, z), (z, z, z, m1), (m1, z, z, z), (z, o, z, z))
    return (g0, g1, g2, g3)


def flat_gammas(signature=(1, -1, -1, -1)) -> GammaSet:
    """Dirac-representation gamma^a with (gamma^a)^2 = signature[a] * 1.

    For the default signature this is the standard Dirac basis. For other
    signatures (e.g. the Riemannian 2-sphere) a slot whose natural square has
    the wrong sign is multiplied by i, which keeps the set anticommuting.
    """
    if not 1 <= len(signature) <= 4:
        raise ValueError("at most four flat gamma matrices are available")
    basis = _dirac_basis()
    natural = (1, -1, -1, -1)
    mats = []
    for a, s in enumerate(signature):
        m = basis[a]
        if s != natural[a]:
            m = scale(I, m)
        mats.append(m)
    return GammaSet(FLAT, UP, tuple(mats))


def curved_gammas(tetrad: Tetrad, flat: GammaSet) -> GammaSet:
    """gamma^m = V^m_a gamma^a."""
    n = len(tetrad.v_inv)
    mats = []
    for m in range(n):
        terms = [scale(tetrad.v_inv[m][a], flat[a]) for a in range(n) if tetrad.v_inv[m][a] != ZERO]
        mats.append(matadd(*terms) if terms else zeros(4))
    return GammaSet(CURVED, UP, tuple(mats))


def spec_gammas(spec: MetricSpec) -> GammaSet:
    cached = spec._cache.get("gammas")
    if cached is None:
        cached = curved_gammas(compute_tetrad(spec), flat_gammas(spec.signature))
        spec._cache["gammas"] = cached
    return cached


def numeric_curved_gammas(spec: MetricSpec, point: dict) -> np.ndarray:
    _, v_inv = numeric_tetrad(spec, point)
    flat = flat_gammas(spec.signature).evaluate({})
    return np.einsum("ma,aij->mij", v_inv, flat)


def _contract_gammas(gammas: GammaSet, rows) -> tuple:
    n = len(gammas)
    out = []
    for lam in range(n):
        terms = [scale(rows[lam][m], gammas[m]) for m in range(n) if rows[lam][m] != ZERO]
        out.append(tuple(tuple(simplify(x) for x in row) for row in matadd(*terms)) if terms else zeros(4))
    return tuple(out)


def gamma_lower(curved: GammaSet, spec: MetricSpec) -> GammaSet:
    """gamma_l = g_{lm} gamma^m."""
    if curved.variance != UP:
        raise ValueError("gamma_lower expects an upper-index set")
    return GammaSet(curved.frame, DOWN, _contract_gammas(curved, spec.g))


def gamma_raise(lowered: GammaSet, spec: MetricSpec) -> GammaSet:
    if lowered.variance != DOWN:
        raise ValueError("gamma_raise expects a lower-index set")
    ginv = inverse_metric(spec)
    rows = tuple(tuple(ginv[a, b] for b in range(spec.dim)) for a in range(spec.dim))
    return GammaSet(lowered.frame, UP, _contract_gammas(lowered, rows))


def anticommutator(a, b):
    return matadd(matmul(a, b), matmul(b, a))


def anticommutator_deviation(gammas: GammaSet, spec: MetricSpec, n_samples=32, seed=0) -> float:
    """Max entrywise |{gamma^m, gamma^n} - 2 g^{mn} 1| over sample points.

    For a flat set the target is 2 eta^{ab} with eta = diag(signature).
    """
    n = len(gammas)
    if gammas.frame == FLAT:
        target = lambda a, b: Rational(spec.signature[a]) if a == b else ZERO  # noqa: E731
    else:
        ginv = inverse_metric(spec)
        target = lambda a, b: ginv[a, b]  # noqa: E731
    exprs = []
    for a in range(n):
        for b in range(a, n):
            ac = anticommutator(gammas[a], gammas[b])
            t = mul(TWO, target(a, b))
            for i in range(4):
                for j in range(4):
                    exprs.append(add(ac[i][j], neg(t) if i == j else ZERO))
    return max_abs(exprs, spec, n_samples, seed)


def clifford_trace_check(up: GammaSet, down: GammaSet, spec: MetricSpec, n_samples=32, seed=0) -> TraceReport:
    """Sum_l gamma^l gamma_l against dim * 1; per-l products against 1 when g is diagonal."""
    if up.frame != down.frame or up.variance != UP or down.variance != DOWN:
        raise ValueError("need matching upper and lower sets of the same frame")
    n = len(up)
    per = tuple(tuple(tuple(simplify(x) for x in row) for row in matmul(up[k], down[k])) for k in range(n))
    total = tuple(tuple(simplify(x) for x in row) for row in matadd(*per))
    dim_i = scale(Rational(n), identity(4))
    total_err = max_abs([add(total[i][j], neg(dim_i[i][j])) for i in range(4) for j in range(4)], spec, n_samples, seed)
    per_err = None
    if spec.is_diagonal():
        eye = identity(4)
        per_err = max_abs(
            [add(p[i][j], neg(eye[i][j])) for p in per for i in range(4) for j in range(4)], spec, n_samples, seed
        )
    return TraceReport(per, total, total_err, per_err)


def numeric_anticommutator_error(spec: MetricSpec, point: dict) -> float:
    """Congruence-path gammas at a point against 2 g^{mn}(p)."""
    gam = numeric_curved_gammas(spec, point)
    ginv = np.linalg.inv(spec.metric_at(point))
    n = spec.dim
    worst = 0.0
    for a in range(n):
        for b in range(n):
            ac = gam[a] @ gam[b] + gam[b] @ gam[a]
            worst = max(worst, float(np.max(np.abs(ac - 2 * ginv[a, b] * np.eye(4)))))
    return worst
