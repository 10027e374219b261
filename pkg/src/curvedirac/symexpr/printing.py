"""Render expressions in the same infix grammar the parser accepts."""

from fractions import Fraction

from .core import Add, Func, ImaginaryUnit, Mul, Pow, Rational, Symbol, neg, _split_coeff

_ADD, _MUL, _POW, _ATOM = 1, 2, 4, 5


def _fraction_text(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _prec(e) -> int:
    if isinstance(e, Add):
        return _ADD
    if isinstance(e, Mul):
        return _MUL
    if isinstance(e, Pow):
        if isinstance(e.exponent, Rational) and e.exponent.value < 0:
            return _MUL
        return _POW
    if isinstance(e, Rational):
        v = e.value
        if v < 0:
            return _ADD
        if v.denominator != 1:
            return _MUL
    return _ATOM


def _wrap(e, min_prec):
    s = to_text(e)
    return f"({s})" if _prec(e) < min_prec else s


def _pow_text(base, exponent) -> str:
    b = _wrap(base, _ATOM)
    if isinstance(exponent, Rational) and exponent.value.denominator == 1 and exponent.value >= 0:
        x = str(exponent.value.numerator)
    elif isinstance(exponent, Symbol):
        x = exponent.name
    else:
        x = f"({to_text(exponent)})"
    return f"{b}^{x}"


def _mul_text(e: Mul) -> str:
    coeff, factors = _split_coeff(e)
    num, den = [], []
    for f in factors:
        if isinstance(f, Pow) and isinstance(f.exponent, Rational) and f.exponent.value < 0:
            k = -f.exponent.value
            den.append(_wrap(f.base, _ATOM) if k == 1 else _pow_text(f.base, Rational(k)))
        else:
            num.append(_wrap(f, _MUL + 1) if not isinstance(f, Pow) else to_text(f))
    sign = "-" if coeff < 0 else ""
    c = abs(coeff)
    parts = []
    if c != 1 or not num:
        parts.append(_fraction_text(c))
    parts.extend(num)
    s = sign + "*".join(parts)
    for d in den:
        s += "/" + d
    return s


def to_text(e) -> str:
    """Print ``e`` so that ``parse_expr(to_text(e)) == e`` for canonical trees."""
    if isinstance(e, Rational):
        return _fraction_text(e.value)
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, ImaginaryUnit):
        return "i"
    if isinstance(e, Func):
        return f"{e.name}({to_text(e.arg)})"
    if isinstance(e, Pow):
        if isinstance(e.exponent, Rational) and e.exponent.value < 0:
            return _mul_text(Mul((e,)))
        return _pow_text(e.base, e.exponent)
    if isinstance(e, Mul):
        return _mul_text(e)
    if isinstance(e, Add):
        out = []
        for k, t in enumerate(e.args):
            c, _ = _split_coeff(t)
            if k == 0:
                out.append(to_text(t))
            elif c < 0:
                out.append(" - " + _wrap(neg(t), _ADD + 1))
            else:
                out.append(" + " + _wrap(t, _ADD + 1))
        return "".join(out)
    raise TypeError(f"not an expression: {e!r}")
