"""Exact symbolic differentiation."""

from functools import lru_cache

from .core import (
    HALF,
    MINUS_ONE,
    ONE,
    ZERO,
    Add,
    Func,
    Mul,
    Pow,
    Rational,
    Symbol,
    add,
    cos,
    func,
    mul,
    power,
    sin,
)


def diff(e, s):
    """Partial derivative of ``e`` with respect to symbol ``s`` (name or Symbol)."""
    name = s.name if isinstance(s, Symbol) else s
    return _diff(e, name)


@lru_cache(maxsize=1 << 16)
def _diff(e, s):
    if s not in e.free_symbols():
        return ZERO
    if isinstance(e, Symbol):
        return ONE
    if isinstance(e, Add):
        return add(*[_diff(t, s) for t in e.args])
    if isinstance(e, Mul):
        fs = e.args
        terms = []
        for k, f in enumerate(fs):
            df = _diff(f, s)
            if df == ZERO:
                continue
            terms.append(mul(*fs[:k], df, *fs[k + 1:]))
        return add(*terms)
    if isinstance(e, Pow):
        b, x = e.base, e.exponent
        db = _diff(b, s)
        if s not in x.free_symbols():
            return mul(x, power(b, add(x, MINUS_ONE)), db)
        dx = _diff(x, s)
        return mul(e, add(mul(dx, func("ln", b)), mul(x, db, power(b, MINUS_ONE))))
    if isinstance(e, Func):
        a = e.arg
        da = _diff(a, s)
        name = e.name
        if name == "sin":
            outer = cos(a)
        elif name == "cos":
            outer = mul(MINUS_ONE, sin(a))
        elif name == "tan":
            outer = power(cos(a), Rational(-2))
        elif name == "exp":
            outer = e
        elif name == "ln":
            outer = power(a, MINUS_ONE)
        elif name == "sqrt":
            outer = mul(HALF, power(e, MINUS_ONE))
        else:  # pragma: no cover - FUNCTIONS is closed
            raise ValueError(name)
        return mul(outer, da)
    raise TypeError(f"cannot differentiate {e!r}")
