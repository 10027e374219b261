"""Best-effort canonicalization.

Beyond what the constructors already do, :func:`simplify` distributes
products over sums and expands small positive integer powers of sums, so that
cancellations hidden inside parenthesised factors surface as like terms.
Distribution is abandoned for any product whose expansion would exceed
``max_terms`` terms.
"""

from .core import Add, Func, Mul, Pow, Rational, add, func, mul, power, rebuild

MAX_TERMS = 256
MAX_POWER = 6


def _terms(e):
    return list(e.args) if isinstance(e, Add) else [e]


def _distribute(factors, max_terms):
    size = 1
    for f in factors:
        size *= len(_terms(f))
    if size > max_terms:
        return None
    acc = [mul()]
    for f in factors:
        acc = [mul(a, t) for a in acc for t in _terms(f)]
    return add(*acc)


def expand(e, max_terms=MAX_TERMS):
    if isinstance(e, Add):
        return add(*[expand(t, max_terms) for t in e.args])
    if isinstance(e, Mul):
        parts = [expand(f, max_terms) for f in e.args]
        if any(isinstance(p, Add) for p in parts):
            out = _distribute(parts, max_terms)
            if out is not None:
                return out
        return mul(*parts)
    if isinstance(e, Pow):
        b = expand(e.base, max_terms)
        x = expand(e.exponent, max_terms)
        if (
            isinstance(b, Add)
            and isinstance(x, Rational)
            and x.value.denominator == 1
            and 2 <= x.value <= MAX_POWER
        ):
            out = _distribute([b] * x.value.numerator, max_terms)
            if out is not None:
                return out
        return power(b, x)
    if isinstance(e, Func):
        return func(e.name, expand(e.arg, max_terms))
    return e


def simplify(e, max_terms=MAX_TERMS):
    """Fold constants, collect like terms/factors and expand where cheap.

    The result always evaluates to the same value as ``e`` wherever both are
    defined.
    """
    return expand(rebuild(e), max_terms)
