"""Numeric evaluation and randomized equivalence testing.

Expressions are compiled once into straight-line Python code (one statement
per distinct sub-tree, so shared sub-trees are evaluated once) and cached.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..errors import DomainError, SamplingExhausted, UnboundSymbol
from .core import Add, Func, ImaginaryUnit, Mul, Pow, Rational, Symbol

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class EvalContext:
    bindings: dict = field(default_factory=dict)
    tolerance: float = DEFAULT_TOL


def _inv(x, tol):
    if abs(x) <= tol:
        raise DomainError("division by zero")
    return 1.0 / x


def _cpow(b, e, tol):
    if abs(b) <= tol:
        if e.real > 0:
            return 0j
        raise DomainError("0 raised to a non-positive power")
    return complex(b) ** e


def _ln(x, tol):
    if abs(x) <= tol:
        raise DomainError("ln(0)")
    return cmath.log(x)


def _tan(x, tol):
    c = cmath.cos(x)
    if abs(c) <= tol:
        raise DomainError("tan at a pole")
    return cmath.sin(x) / c


_ENV = {
    "_inv": _inv,
    "_cpow": _cpow,
    "_ln": _ln,
    "_tan": _tan,
    "_sin": cmath.sin,
    "_cos": cmath.cos,
    "_exp": cmath.exp,
    "_sqrt": cmath.sqrt,
}


def _codegen(exprs, names):
    slots = {}
    lines = []
    argmap = {n: f"a{k}" for k, n in enumerate(names)}

    def visit(e):
        hit = slots.get(e)
        if hit is not None:
            return hit
        if isinstance(e, Rational):
            ref = f"({float(e.value)!r})"
            slots[e] = ref
            return ref
        if isinstance(e, Symbol):
            ref = argmap[e.name]
            slots[e] = ref
            return ref
        if isinstance(e, ImaginaryUnit):
            slots[e] = "1j"
            return "1j"
        if isinstance(e, Add):
            code = " + ".join(visit(a) for a in e.args)
        elif isinstance(e, Mul):
            code = " * ".join(visit(a) for a in e.args)
        elif isinstance(e, Pow):
            b = visit(e.base)
            x = e.exponent
            if isinstance(x, Rational) and x.value.denominator == 1:
                n = x.value.numerator
                code = f"{b} ** {n}" if n > 0 else f"_inv({b}, tol) ** {-n}"
            else:
                code = f"_cpow({b}, {visit(x)}, tol)"
        elif isinstance(e, Func):
            a = visit(e.arg)
            if e.name in ("ln", "tan"):
                code = f"_{e.name}({a}, tol)"
            else:
                code = f"_{e.name}({a})"
        else:  # pragma: no cover
            raise TypeError(e)
        ref = f"v{len(lines)}"
        lines.append(f"    {ref} = {code}")
        slots[e] = ref
        return ref

    outs = [visit(e) for e in exprs]
    params = ", ".join([argmap[n] for n in names] + ["tol"])
    body = "\n".join(lines)
    src = f"def _f({params}):\n{body}\n    return ({', '.join(outs)},)\n"
    return src


@lru_cache(maxsize=512)
def compile_exprs(exprs: tuple, names: tuple):
    """Return ``f(*values, tol) -> tuple`` evaluating ``exprs`` at ``names=values``."""
    missing = set()
    for e in exprs:
        missing |= e.free_symbols()
    missing -= set(names)
    if missing:
        raise UnboundSymbol(sorted(missing)[0])
    src = _codegen(exprs, names)
    scope = dict(_ENV)
    exec(compile(src, "<curvedirac-expr>", "exec"), scope)
    fn = scope["_f"]

    def run(*values, tol=DEFAULT_TOL):
        try:
            return fn(*values, tol)
        except ZeroDivisionError as exc:
            raise DomainError(str(exc)) from None
        except (ValueError, OverflowError) as exc:
            raise DomainError(str(exc)) from None

    return run


def eval_at(e, ctx: EvalContext | dict) -> complex:
    """Evaluate ``e`` in double-precision complex arithmetic."""
    if isinstance(ctx, dict):
        ctx = EvalContext(ctx)
    names = tuple(sorted(e.free_symbols()))
    for n in names:
        if n not in ctx.bindings:
            raise UnboundSymbol(n)
    fn = compile_exprs((e,), names)
    return complex(fn(*[ctx.bindings[n] for n in names], tol=ctx.tolerance)[0])


def eval_many(exprs, bindings: dict, tol=DEFAULT_TOL) -> np.ndarray:
    """Evaluate a sequence of expressions at one point; returns a complex array."""
    exprs = tuple(exprs)
    names = set()
    for e in exprs:
        names |= e.free_symbols()
    names = tuple(sorted(names))
    for n in names:
        if n not in bindings:
            raise UnboundSymbol(n)
    fn = compile_exprs(exprs, names)
    return np.array(fn(*[bindings[n] for n in names], tol=tol), dtype=complex)


class Sampler:
    """Seeded uniform sampler over a box of per-symbol real intervals."""

    def __init__(self, domain: dict, seed: int = 0, fixed: dict | None = None):
        self.domain = dict(domain)
        self.fixed = dict(fixed or {})
        self.rng = np.random.default_rng(seed)
        self.names = sorted(self.domain)

    def draw(self) -> dict:
        point = dict(self.fixed)
        for n in self.names:
            lo, hi = self.domain[n]
            point[n] = float(self.rng.uniform(lo, hi))
        return point


def sample_values(exprs, domain, n_samples=32, seed=0, fixed=None, max_retries=None, tol=DEFAULT_TOL):
    """Evaluate ``exprs`` at ``n_samples`` accepted points.

    Points where any expression raises :class:`DomainError` are rejected and
    redrawn. Returns ``(points, values)`` with ``values`` of shape
    ``(n_samples, len(exprs))``.
    """
    exprs = tuple(exprs)
    sampler = Sampler(domain, seed, fixed)
    free = set()
    for e in exprs:
        free |= e.free_symbols()
    unbound = free - set(sampler.domain) - set(sampler.fixed)
    if unbound:
        raise UnboundSymbol(sorted(unbound)[0])
    names = tuple(sorted(free))
    fn = compile_exprs(exprs, names)
    cap = max_retries if max_retries is not None else 10 * n_samples + 10
    points, rows = [], []
    rejected = 0
    while len(rows) < n_samples:
        p = sampler.draw()
        try:
            rows.append(fn(*[p[n] for n in names], tol=tol))
        except DomainError:
            rejected += 1
            if rejected > cap:
                raise SamplingExhausted(
                    f"{rejected} singular sample points; domain {domain!r}"
                ) from None
            continue
        points.append(p)
    values = np.array(rows, dtype=complex).reshape(n_samples, len(exprs))
    return points, values


def max_deviation(a, b, domain, n_samples=32, seed=0, fixed=None) -> float:
    """Worst ``|a-b| / (1 + max(|a|, |b|))`` over sample points, elementwise over sequences."""
    a = tuple(a)
    b = tuple(b)
    if len(a) != len(b):
        raise ValueError("length mismatch")
    if not a:
        return 0.0
    _, vals = sample_values(a + b, domain, n_samples, seed, fixed)
    va, vb = vals[:, : len(a)], vals[:, len(a):]
    scale = 1.0 + np.maximum(np.abs(va), np.abs(vb))
    return float(np.max(np.abs(va - vb) / scale))


def expr_equiv(a, b, domain, n_samples=32, tol=1e-9, seed=0, fixed=None) -> bool:
    """Randomized equality test.

    True iff ``|a-b| <= tol*(1+max(|a|,|b|))`` at every one of ``n_samples``
    seeded points drawn uniformly from ``domain`` (symbol -> (lo, hi)).
    ``fixed`` binds symbols that are not sampled, e.g. physical constants.
    """
    return max_deviation((a,), (b,), domain, n_samples, seed, fixed) <= tol
