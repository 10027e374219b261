"""Finite-difference oracle.

Everything here works on floating-point samples of the metric and of test
fields. No symbolic derivative is ever taken, so agreement with the symbolic
pipeline is evidence rather than a tautology.

Steps are per coordinate: ``h_k = cfg.step * width_k`` where ``width_k`` is the
sampling interval width, so ``r`` in [3, 10] and ``theta`` in [0.3, 2.8] each
get a proportionate step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .metric import MetricSpec
from .symexpr import Expr, Rational, Sampler, add, as_expr, compile_exprs, diff, mul, symbol

CENTRAL_2 = "central-2"
CENTRAL_4 = "central-4"


@dataclass(frozen=True)
class StencilConfig:
    step: float = 1e-4
    scheme: str = CENTRAL_2
    rel_tol: float = 1e-5

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.scheme not in (CENTRAL_2, CENTRAL_4):
            raise ValueError(f"unknown scheme {self.scheme!r}")


# nested differences amplify rounding by 1/h^2, so second-level checks use a
# larger step with the fourth-order stencil
NESTED = StencilConfig(step=1e-3, scheme=CENTRAL_4, rel_tol=1e-5)


def rel_error(a, b) -> float:
    """Worst ``|a-b| / (1 + max(|a|, |b|))`` elementwise."""
    a = np.asarray(a)
    b = np.asarray(b)
    return float(np.max(np.abs(a - b) / (1.0 + np.maximum(np.abs(a), np.abs(b))), initial=0.0))


def stencil(f, x: np.ndarray, k: int, h: float, scheme: str = CENTRAL_2):
    """Central difference of ``f`` along axis ``k`` at ``x``; ``f`` returns arrays."""

    def at(shift):
        y = np.array(x, dtype=float)
        y[k] += shift
        return np.asarray(f(y))

    if scheme == CENTRAL_2:
        return (at(h) - at(-h)) / (2 * h)
    if scheme == CENTRAL_4:
        return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h)
    raise ValueError(f"unknown scheme {scheme!r}")


def fd_partial(e, s, p: dict, cfg: StencilConfig = StencilConfig(), width: float = 1.0) -> complex:
    """Central-difference estimate of de/ds at the point ``p`` (symbol -> value)."""
    e = as_expr(e)
    name = s.name if isinstance(s, Expr) else str(s)
    names = tuple(sorted(set(e.free_symbols()) | {name} | set(p)))
    fn = compile_exprs((e,), names)
    k = names.index(name)
    x0 = np.array([float(p.get(n, 0.0)) for n in names])
    if name not in p:
        raise KeyError(name)
    return complex(stencil(lambda y: fn(*y)[0], x0, k, cfg.step * width, cfg.scheme))


class NumericField:
    """A tuple of expressions compiled as a function of the coordinate vector."""

    def __init__(self, spec: MetricSpec, exprs):
        self.spec = spec
        self.exprs = tuple(as_expr(e) for e in exprs)
        consts = tuple(sorted(spec.constants))
        self._fn = compile_exprs(self.exprs, tuple(spec.coords) + consts)
        self._consts = tuple(float(spec.constants[c]) for c in consts)

    def __call__(self, x) -> np.ndarray:
        return np.array(self._fn(*map(float, x), *self._consts), dtype=complex)


class FDGeometry:
    """Connection and curvature of ``spec`` by finite differences of g alone."""

    def __init__(self, spec: MetricSpec, cfg: StencilConfig = StencilConfig(), nested: StencilConfig = NESTED):
        self.spec = spec
        self.cfg = cfg
        self.nested = nested
        self.n = spec.dim
        self._g = NumericField(spec, [x for row in spec.g for x in row])
        self.widths = np.array(spec.widths(), dtype=float)

    def point(self, p) -> np.ndarray:
        if isinstance(p, dict):
            return np.array([float(p[c]) for c in self.spec.coords])
        return np.asarray(p, dtype=float)

    def g(self, x) -> np.ndarray:
        return self._g(x).real.reshape(self.n, self.n)

    def ginv(self, x) -> np.ndarray:
        return np.linalg.inv(self.g(x))

    def dg(self, x, cfg=None) -> np.ndarray:
        """``dg[a, b, c]`` = d_a g_{bc}."""
        cfg = cfg or self.cfg
        return np.array([stencil(self.g, x, a, cfg.step * self.widths[a], cfg.scheme) for a in range(self.n)])

    def christoffel(self, x, cfg=None) -> np.ndarray:
        """``gam[d, b, c]`` = Gamma^d_{bc}."""
        dg = self.dg(x, cfg)
        lower = 0.5 * (np.einsum("bac->abc", dg) + np.einsum("cab->abc", dg) - dg)
        return np.einsum("da,abc->dbc", self.ginv(x), lower)

    def dchristoffel(self, x) -> np.ndarray:
        """``out[a, d, b, c]`` = d_a Gamma^d_{bc} (nested differences)."""
        c = self.nested
        return np.array(
            [stencil(lambda y: self.christoffel(y, c), x, a, c.step * self.widths[a], c.scheme) for a in range(self.n)]
        )

    def riemann(self, x) -> np.ndarray:
        """``R[l, n, lam, mu]`` with the same convention as the symbolic pipeline."""
        gam = self.christoffel(x, self.nested)
        dgam = self.dchristoffel(x)
        # d_lam Gamma^l_{mu n} - d_mu Gamma^l_{lam n}
        t1 = np.einsum("almn->lnam", dgam)
        r = t1 - t1.transpose(0, 1, 3, 2)
        quad = np.einsum("las,smn->lnam", gam, gam)
        return r + quad - quad.transpose(0, 1, 3, 2)

    def ricci(self, x) -> np.ndarray:
        return np.einsum("lnlm->nm", self.riemann(x))

    def scalar(self, x) -> complex:
        return np.einsum("ab,ab->", self.ginv(x), self.ricci(x))

    def einstein(self, x) -> np.ndarray:
        ric = self.ricci(x)
        return ric - 0.5 * self.g(x) * np.einsum("ab,ab->", self.ginv(x), ric)

    def covariant_derivative(self, field: NumericField, x, lam, cfg=None, gam=None, nvec=None) -> np.ndarray:
        """nabla_lam Psi^l; components past ``nvec`` are scalars."""
        cfg = cfg or self.cfg
        gam = self.christoffel(x, cfg) if gam is None else gam
        val = field(x)
        nvec = self.n if nvec is None else nvec
        out = stencil(field, x, lam, cfg.step * self.widths[lam], cfg.scheme).astype(complex)
        out[:nvec] += gam[:nvec, lam, :nvec] @ val[:nvec]
        return out

    def second_covariant_derivative(self, field, x, lam, mu, nvec=None) -> np.ndarray:
        """nabla_lam nabla_mu Psi^l by differencing the first covariant derivative."""
        c = self.nested
        nvec = self.n if nvec is None else nvec
        gam = self.christoffel(x, c)
        inner = stencil(
            lambda y: self.covariant_derivative(field, y, mu, c, nvec=nvec), x, lam, c.step * self.widths[lam], c.scheme
        ).astype(complex)
        first = np.array([self.covariant_derivative(field, x, s, c, gam, nvec) for s in range(self.n)])
        inner[:nvec] += gam[:nvec, lam, :nvec] @ first[mu, :nvec]
        inner -= np.einsum("s,sl->l", gam[:, lam, mu], first)
        return inner


def _as_field(spec, V):
    return V if isinstance(V, NumericField) else NumericField(spec, V)


def fd_commutator_check(spec: MetricSpec, riemann, V, p, cfg: StencilConfig = StencilConfig()) -> float:
    """Worst relative error of [nabla_lam, nabla_mu] V^l = R^l_{n lam mu} V^n at ``p``.

    The left side is built entirely from finite differences of g and V; the
    right side evaluates the supplied (symbolic) Riemann tensor at ``p``.
    """
    geo = FDGeometry(spec, cfg)
    x = geo.point(p)
    field = _as_field(spec, V)
    n = spec.dim
    R = NumericField(spec, riemann.components)(x).reshape((n,) * 4)
    v = field(x)[:n]
    worst = 0.0
    for lam in range(n):
        for mu in range(lam + 1, n):
            lhs = geo.second_covariant_derivative(field, x, lam, mu)[:n] - geo.second_covariant_derivative(field, x, mu, lam)[:n]
            rhs = R[:, :, lam, mu] @ v
            worst = max(worst, rel_error(lhs, rhs))
    return worst


def random_polynomial_field(coords, rng: np.random.Generator, n_components=None, degree=2, terms=4) -> tuple:
    """Polynomial components with small integer coefficients."""
    syms = [symbol(c) for c in coords]
    out = []
    for _ in range(len(coords) if n_components is None else n_components):
        parts = [Rational(int(rng.integers(-3, 4)))]
        for _ in range(terms):
            coef = Rational(int(rng.integers(1, 4)) * int(rng.choice([-1, 1])))
            mono = [coef]
            for _ in range(int(rng.integers(1, degree + 1))):
                mono.append(syms[int(rng.integers(len(syms)))])
            parts.append(mul(*mono))
        out.append(add(*parts))
    return tuple(out)


def fd_apply_operator(op, field, p, cfg: StencilConfig = StencilConfig()) -> np.ndarray:
    """(g^{lm} nabla_l nabla_m + potential) Psi at ``p`` by finite differences."""
    spec = op.spec
    geo = FDGeometry(spec, cfg)
    x = geo.point(p)
    comps = field.components if hasattr(field, "components") else tuple(field)
    nf = NumericField(spec, comps)
    ginv = geo.ginv(x)
    box = np.zeros(len(comps), dtype=complex)
    for lam in range(spec.dim):
        for mu in range(spec.dim):
            if ginv[lam, mu] != 0.0:
                box += ginv[lam, mu] * geo.second_covariant_derivative(nf, x, lam, mu)
    pot = NumericField(spec, [e for row in op.potential for e in row])(x).reshape(4, 4)
    return box + pot @ nf(x)


def sample_points(spec: MetricSpec, n_points=10, seed=0, margin=0.05) -> list:
    """Seeded interior points where every metric component evaluates cleanly."""
    sampler = Sampler(spec.interior_domain(margin), seed)
    geo_g = NumericField(spec, [x for row in spec.g for x in row])
    pts = []
    tries = 0
    while len(pts) < n_points:
        tries += 1
        if tries > 50 * n_points:
            raise DomainError(f"could not find {n_points} regular points for {spec.name!r}")
        p = sampler.draw()
        x = np.array([p[c] for c in spec.coords])
        try:
            g = geo_g(x).real.reshape(spec.dim, spec.dim)
        except DomainError:
            continue
        if abs(np.linalg.det(g)) < 1e-8:
            continue
        pts.append(p)
    return pts


@dataclass(frozen=True)
class SweepResult:
    name: str
    worst_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.worst_error < self.tolerance


def metric_derivative_sweep(spec, n_points=10, seed=0, cfg=StencilConfig(), tol=1e-5) -> SweepResult:
    """FD vs symbolic d_a g_{bc} at seeded points."""
    n = spec.dim
    sym = NumericField(spec, [diff(spec.g[b][c], spec.coords[a]) for a in range(n) for b in range(n) for c in range(n)])
    geo = FDGeometry(spec, cfg)
    worst = 0.0
    for p in sample_points(spec, n_points, seed):
        x = geo.point(p)
        worst = max(worst, rel_error(geo.dg(x).reshape(-1), sym(x)))
    return SweepResult("metric-derivatives", worst, tol)


def curvature_sweep(spec, bundle, n_points=10, seed=0, cfg=StencilConfig(), tol=1e-4) -> list:
    """Symbolic CurvatureBundle against FD reconstruction from g."""
    geo = FDGeometry(spec, cfg)
    fields = {
        "christoffel": (NumericField(spec, bundle.christoffel.components), lambda x: geo.christoffel(x)),
        "riemann": (NumericField(spec, bundle.riemann.components), geo.riemann),
        "ricci": (NumericField(spec, bundle.ricci.components), geo.ricci),
        "scalar": (NumericField(spec, (bundle.scalar,)), lambda x: np.array([geo.scalar(x)])),
        "einstein": (NumericField(spec, bundle.einstein.components), geo.einstein),
    }
    worst = dict.fromkeys(fields, 0.0)
    for p in sample_points(spec, n_points, seed):
        x = geo.point(p)
        for name, (sym, fd) in fields.items():
            worst[name] = max(worst[name], rel_error(np.asarray(fd(x)).reshape(-1), sym(x)))
    return [SweepResult(name, err, tol) for name, err in worst.items()]


def commutator_sweep(spec, riemann, n_fields=3, seed=0, cfg=StencilConfig(), tol=1e-5, n_points=1) -> SweepResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    pts = sample_points(spec, n_fields * n_points, seed + 1)
    for k in range(n_fields):
        V = random_polynomial_field(spec.coords, rng)
        for p in pts[k * n_points:(k + 1) * n_points]:
            worst = max(worst, fd_commutator_check(spec, riemann, V, p, cfg))
    return SweepResult("commutator-identity", worst, tol)


def operator_sweep(op, fields, n_points=3, seed=0, cfg=StencilConfig(), tol=1e-4) -> SweepResult:
    """Symbolic apply_operator against :func:`fd_apply_operator`."""
    from .dirac import apply_operator

    spec = op.spec
    worst = 0.0
    pts = sample_points(spec, n_points, seed + 2)
    for f in fields:
        sym = NumericField(spec, apply_operator(op, f))
        for p in pts:
            x = np.array([p[c] for c in spec.coords])
            worst = max(worst, rel_error(fd_apply_operator(op, f, p, cfg), sym(x)))
    return SweepResult("operator-application", worst, tol)


def convergence_ratio(fn, exact: float, x: float, h: float, scheme: str = CENTRAL_2) -> float:
    """err(h) / err(h/2) for a scalar function; about 4 for central-2, 16 for central-4."""
    f = lambda y: np.array([fn(y[0])])  # noqa: E731
    e1 = abs(stencil(f, np.array([x]), 0, h, scheme)[0] - exact)
    e2 = abs(stencil(f, np.array([x]), 0, h / 2, scheme)[0] - exact)
    return e1 / e2


__all__ = [
    "CENTRAL_2",
    "CENTRAL_4",
    "NESTED",
    "FDGeometry",
    "NumericField",
    "StencilConfig",
    "SweepResult",
    "commutator_sweep",
    "convergence_ratio",
    "curvature_sweep",
    "fd_apply_operator",
    "fd_commutator_check",
    "fd_partial",
    "metric_derivative_sweep",
    "operator_sweep",
    "random_polynomial_field",
    "rel_error",
    "sample_points",
    "stencil",
]
