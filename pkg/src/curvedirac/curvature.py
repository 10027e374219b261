"""Levi-Civita connection, curvature tensors and Einstein field equations.

Index conventions (all indices 0..dim-1):

* ``christoffel[d, b, c]`` is Gamma^d_{bc}.
* ``riemann[l, n, lam, mu]`` is R^l_{n lam mu}, fixed so that
  ``[nabla_lam, nabla_mu] V^l = R^l_{n lam mu} V^n`` with
  ``nabla_mu V^l = d_mu V^l + Gamma^l_{mu n} V^n``.
* ``ricci[n, mu] = R^lam_{n lam mu}`` (upper index against the first slot of
  the commutator pair).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MissingStressEnergy, ZeroCoupling
from .metric import MetricSpec, inverse_metric
from .symexpr import HALF, ZERO, Expr, add, diff, max_deviation, mul, neg, number, simplify
from .tensor import DOWN, UP, Tensor, contract

VACUUM = "vacuum"
MATTER_CONSISTENT = "matter-consistent"
INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class CurvatureBundle:
    christoffel: Tensor
    riemann: Tensor
    ricci: Tensor
    scalar: Expr
    einstein: Tensor


@dataclass(frozen=True)
class FieldEquationResult:
    residual: Tensor
    classification: str
    worst_error: float


def christoffel(spec: MetricSpec) -> Tensor:
    """Gamma^d_{bc} = 1/2 g^{da} (d_b g_{ac} + d_c g_{ab} - d_a g_{bc}).

    Stored as a rank-3 array with variance (up, down, down) for convenience;
    it does not transform as a tensor.
    """
    cached = spec._cache.get("christoffel")
    if cached is not None:
        return cached
    n = spec.dim
    ginv = inverse_metric(spec)
    dg = [[[diff(spec.g[b][c], spec.coords[a]) for c in range(n)] for b in range(n)] for a in range(n)]
    comps = {}
    for d in range(n):
        for b in range(n):
            for c in range(b, n):
                terms = []
                for a in range(n):
                    if ginv[d, a] == ZERO:
                        continue
                    inner = add(dg[b][a][c], dg[c][a][b], neg(dg[a][b][c]))
                    terms.append(mul(ginv[d, a], inner))
                comps[(d, b, c)] = comps[(d, c, b)] = simplify(mul(HALF, add(*terms)))
    t = Tensor.from_function(n, (UP, DOWN, DOWN), lambda d, b, c: comps[(d, b, c)], ((1, 2, 1),), "christoffel")
    spec._cache["christoffel"] = t
    return t


def riemann(spec: MetricSpec, gamma: Tensor | None = None) -> Tensor:
    """R^l_{n lam mu} = d_lam G^l_{mu n} - d_mu G^l_{lam n} + G^l_{lam s} G^s_{mu n} - G^l_{mu s} G^s_{lam n}."""
    gamma = christoffel(spec) if gamma is None else gamma
    n = spec.dim
    x = spec.coords
    comps = {}
    for l in range(n):
        for m in range(n):
            for lam in range(n):
                comps[(l, m, lam, lam)] = ZERO
                for mu in range(lam + 1, n):
                    terms = [diff(gamma[l, mu, m], x[lam]), neg(diff(gamma[l, lam, m], x[mu]))]
                    for s in range(n):
                        terms.append(mul(gamma[l, lam, s], gamma[s, mu, m]))
                        terms.append(neg(mul(gamma[l, mu, s], gamma[s, lam, m])))
                    value = simplify(add(*terms))
                    comps[(l, m, lam, mu)] = value
                    comps[(l, m, mu, lam)] = neg(value)
    return Tensor.from_function(n, (UP, DOWN, DOWN, DOWN), lambda *idx: comps[idx], ((2, 3, -1),), "riemann")


def ricci(riem: Tensor) -> Tensor:
    """R_{n mu} = R^lam_{n lam mu}."""
    r = contract(riem, 0, 2).simplified()
    return Tensor(r.dim, r.variance, r.components, ((0, 1, 1),), "ricci")


def scalar_curvature(spec: MetricSpec, ric: Tensor) -> Expr:
    ginv = inverse_metric(spec)
    n = spec.dim
    return simplify(add(*[mul(ginv[a, b], ric[a, b]) for a in range(n) for b in range(n)]))


def einstein_tensor(spec: MetricSpec, ric: Tensor, scalar: Expr) -> Tensor:
    """G_{mn} = R_{mn} - 1/2 g_{mn} R."""
    half_r = mul(HALF, scalar)
    return Tensor.from_function(
        spec.dim,
        (DOWN, DOWN),
        lambda a, b: simplify(add(ric[a, b], neg(mul(spec.g[a][b], half_r)))),
        ((0, 1, 1),),
        "einstein",
    )


def compute_curvature(spec: MetricSpec) -> CurvatureBundle:
    cached = spec._cache.get("bundle")
    if cached is not None:
        return cached
    gamma = christoffel(spec)
    riem = riemann(spec, gamma)
    ric = ricci(riem)
    scal = scalar_curvature(spec, ric)
    bundle = CurvatureBundle(gamma, riem, ric, scal, einstein_tensor(spec, ric, scal))
    spec._cache["bundle"] = bundle
    return bundle


def _zero_deviation(t: Tensor, spec: MetricSpec, n_samples=32, seed=0) -> float:
    comps = [c for c in t.components if c != ZERO]
    if not comps:
        return 0.0
    return max_deviation(comps, [ZERO] * len(comps), spec.domain(), n_samples, seed, spec.constants)


def field_equation_residual(
    spec: MetricSpec, bundle: CurvatureBundle | None = None, require_matter=False, tol=1e-9, seed=0
) -> FieldEquationResult:
    """G_{mn} + K T_{mn}, classified as vacuum / matter-consistent / inconsistent.

    Without a stress-energy tensor the residual is G itself; asking for a
    matter classification in that case raises :class:`MissingStressEnergy`.
    """
    bundle = compute_curvature(spec) if bundle is None else bundle
    T = spec.stress_energy()
    if T is None and require_matter:
        raise MissingStressEnergy(f"metric {spec.name!r} has no [stress-energy] section")
    G = bundle.einstein
    if T is None:
        residual = G
    else:
        k = number(spec.coupling)
        residual = Tensor.from_function(
            spec.dim,
            (DOWN, DOWN),
            lambda a, b: simplify(add(G[a, b], mul(k, T[a, b]))),
            ((0, 1, 1),),
            "residual",
        )
    err = _zero_deviation(residual, spec, seed=seed)
    if err > tol:
        label = INCONSISTENT
    elif T is None or _zero_deviation(T, spec, seed=seed) <= tol:
        label = VACUUM
    else:
        label = MATTER_CONSISTENT
    return FieldEquationResult(residual, label, err)


def induced_stress_energy(spec: MetricSpec, bundle: CurvatureBundle | None = None) -> Tensor:
    """T_{mn} = -G_{mn}/K, which satisfies the matter field equation exactly."""
    if spec.coupling == 0:
        raise ZeroCoupling("coupling K is zero; T = -G/K is undefined")
    bundle = compute_curvature(spec) if bundle is None else bundle
    factor = neg(number(1) / number(spec.coupling))
    return bundle.einstein.map(lambda c: simplify(mul(factor, c)), "T")


def with_induced_matter(spec: MetricSpec) -> MetricSpec:
    T = induced_stress_energy(spec)
    rows = tuple(tuple(T[a, b] for b in range(spec.dim)) for a in range(spec.dim))
    out = spec.with_stress_energy(rows)
    out._cache.update({k: v for k, v in spec._cache.items() if k in ("ginv", "christoffel", "bundle")})
    return out
