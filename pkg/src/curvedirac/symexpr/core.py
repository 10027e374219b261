"""Immutable scalar expression trees.

Nodes are built through the smart constructors :func:`add`, :func:`mul`,
:func:`power` and :func:`func`, which keep every tree in a light canonical
form: nested sums/products are flattened, numeric parts are folded, like
terms and like factors are collected, and children are sorted by a total
order. Constructing a raw node class directly bypasses all of that and is
only done inside this module.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce

from ..errors import DomainError, ReservedNameError

FUNCTIONS = ("sin", "cos", "tan", "exp", "ln", "sqrt")
RESERVED = frozenset({"i"})


class Expr:
    __slots__ = ("_args", "_hash", "_key", "_free")

    def __init__(self, args):
        self._args = args
        self._hash = hash((type(self).__name__, args))
        self._key = None
        self._free = None

    @property
    def args(self):
        return self._args

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        return (
            type(self) is type(other)
            and self._hash == other._hash
            and self._args == other._args
        )

    def __ne__(self, other):
        return not self.__eq__(other)

    def sort_key(self):
        if self._key is None:
            self._key = self._make_key()
        return self._key

    def free_symbols(self):
        if self._free is None:
            acc = frozenset()
            for a in self._args:
                if isinstance(a, Expr):
                    acc |= a.free_symbols()
            self._free = acc
        return self._free

    def __str__(self):
        from .printing import to_text

        return to_text(self)

    def __repr__(self):
        return f"{type(self).__name__}({self})"

    # arithmetic sugar
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, power(as_expr(other), MINUS_ONE))

    def __rtruediv__(self, other):
        return mul(as_expr(other), power(self, MINUS_ONE))

    def __pow__(self, other):
        return power(self, as_expr(other))

    def __rpow__(self, other):
        return power(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pos__(self):
        return self


class Rational(Expr):
    """Exact rational constant, always in lowest terms."""

    __slots__ = ()

    def __init__(self, value):
        super().__init__((Fraction(value),))

    @property
    def value(self) -> Fraction:
        return self._args[0]

    @property
    def numerator(self):
        return self._args[0].numerator

    @property
    def denominator(self):
        return self._args[0].denominator

    def is_integer(self):
        return self._args[0].denominator == 1

    def _make_key(self):
        return (0, self._args[0])

    def free_symbols(self):
        return frozenset()


class Symbol(Expr):
    __slots__ = ()

    def __init__(self, name):
        if name in RESERVED:
            raise ReservedNameError(f"{name!r} is reserved for the imaginary unit")
        super().__init__((name,))

    @property
    def name(self):
        return self._args[0]

    def _make_key(self):
        return (1, self._args[0])

    def free_symbols(self):
        return frozenset((self._args[0],))


class ImaginaryUnit(Expr):
    __slots__ = ()

    def __init__(self):
        super().__init__(())

    def _make_key(self):
        return (2,)

    def free_symbols(self):
        return frozenset()


class Func(Expr):
    __slots__ = ()

    def __init__(self, name, arg):
        super().__init__((name, arg))

    @property
    def name(self):
        return self._args[0]

    @property
    def arg(self):
        return self._args[1]

    def _make_key(self):
        return (3, self._args[0], self._args[1].sort_key())

    def free_symbols(self):
        return self._args[1].free_symbols()


class Pow(Expr):
    __slots__ = ()

    def __init__(self, base, exponent):
        super().__init__((base, exponent))

    @property
    def base(self):
        return self._args[0]

    @property
    def exponent(self):
        return self._args[1]

    def _make_key(self):
        return (4, self._args[0].sort_key(), self._args[1].sort_key())


class Mul(Expr):
    __slots__ = ()

    def _make_key(self):
        return (5, len(self._args), tuple(a.sort_key() for a in self._args))


class Add(Expr):
    __slots__ = ()

    def _make_key(self):
        return (6, len(self._args), tuple(a.sort_key() for a in self._args))


ZERO = Rational(0)
ONE = Rational(1)
MINUS_ONE = Rational(-1)
TWO = Rational(2)
HALF = Rational(Fraction(1, 2))
I = ImaginaryUnit()


def number(value) -> Rational:
    if isinstance(value, Rational):
        return value
    if isinstance(value, float):
        # decimal literal semantics: 0.1 -> 1/10, not the binary double
        return Rational(Fraction(repr(value)))
    return Rational(Fraction(value))


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, complex):
        return add(number(value.real), mul(number(value.imag), I))
    if isinstance(value, (int, Fraction, float)):
        return number(value)
    if isinstance(value, str):
        return Symbol(value)
    raise TypeError(f"cannot convert {type(value).__name__} to Expr")


def symbol(name: str) -> Symbol:
    return Symbol(name)


def symbols(names: str):
    return tuple(Symbol(n) for n in names.replace(",", " ").split())


# ---------------------------------------------------------------------------
# smart constructors
# ---------------------------------------------------------------------------


def _split_coeff(term):
    """term -> (rational coefficient, remaining factors tuple)."""
    if isinstance(term, Rational):
        return term.value, ()
    if isinstance(term, Mul):
        first = term._args[0]
        if isinstance(first, Rational):
            return first.value, term._args[1:]
        return Fraction(1), term._args
    return Fraction(1), (term,)


def _from_factors(factors):
    if not factors:
        return ONE
    if len(factors) == 1:
        return factors[0]
    return Mul(factors)


def _scale(coeff: Fraction, factors):
    """Rebuild coeff*factors where factors are already canonical and sorted."""
    if coeff == 0:
        return ZERO
    if not factors:
        return Rational(coeff)
    if coeff == 1:
        return _from_factors(factors)
    if len(factors) == 1 and isinstance(factors[0], Add):
        return add(*[_scale_term(coeff, t) for t in factors[0]._args])
    return Mul((Rational(coeff),) + tuple(factors))


def _scale_term(coeff, term):
    c, rest = _split_coeff(term)
    return _scale(coeff * c, rest)


def add(*terms) -> Expr:
    const = Fraction(0)
    collected = {}
    order = []
    stack = list(terms)
    stack.reverse()
    while stack:
        t = stack.pop()
        if isinstance(t, Add):
            stack.extend(reversed(t._args))
            continue
        if isinstance(t, Rational):
            const += t.value
            continue
        c, rest = _split_coeff(t)
        if rest in collected:
            collected[rest] += c
        else:
            collected[rest] = c
            order.append(rest)
    out = []
    for rest in order:
        c = collected[rest]
        if c == 0:
            continue
        out.append(_scale(c, rest))
    if const != 0:
        out.append(Rational(const))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    out.sort(key=Expr.sort_key)
    return Add(tuple(out))


def neg(e: Expr) -> Expr:
    return mul(MINUS_ONE, e)


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, neg(b))


def div(a: Expr, b: Expr) -> Expr:
    return mul(a, power(b, MINUS_ONE))


def mul(*factors) -> Expr:
    coeff = Fraction(1)
    exps = {}
    order = []
    exp_args = []
    stack = list(factors)
    stack.reverse()
    while stack:
        f = stack.pop()
        if isinstance(f, Mul):
            stack.extend(reversed(f._args))
            continue
        if isinstance(f, Rational):
            if f.value == 0:
                return ZERO
            coeff *= f.value
            continue
        if isinstance(f, Func) and f.name == "exp":
            exp_args.append(f.arg)
            continue
        if isinstance(f, Pow):
            b, e = f._args
        else:
            b, e = f, ONE
        if b in exps:
            exps[b].append(e)
        else:
            exps[b] = [e]
            order.append(b)

    out = []

    def absorb(p):
        nonlocal coeff
        if isinstance(p, Rational):
            coeff *= p.value
        elif isinstance(p, Mul):
            for q in p._args:
                if isinstance(q, Rational):
                    coeff *= q.value
                else:
                    out.append(q)
        else:
            out.append(p)

    for b in order:
        es = exps[b]
        e = es[0] if len(es) == 1 else add(*es)
        if len(es) == 1 and (e is ONE):
            out.append(b)
            continue
        absorb(power(b, e))
    if exp_args:
        absorb(func("exp", add(*exp_args)))
    if coeff == 0:
        return ZERO
    if not out:
        return Rational(coeff)
    # re-collect if absorbing produced repeated bases (e.g. I^3 -> -I next to I)
    if len(out) > 1:
        bases = [x.base if isinstance(x, Pow) else x for x in out]
        if len(set(bases)) != len(bases):
            return mul(Rational(coeff), *out)
    out.sort(key=Expr.sort_key)
    if coeff == 1 and len(out) == 1:
        return out[0]
    if len(out) == 1 and isinstance(out[0], Add):
        return add(*[_scale_term(coeff, t) for t in out[0]._args])
    if coeff == 1:
        return Mul(tuple(out))
    return Mul((Rational(coeff),) + tuple(out))


def _int_root(n: int, k: int):
    if n < 0:
        return None
    r = round(n ** (1.0 / k)) if n else 0
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** k == n:
            return cand
    return None


def _exact_sqrt(q: Fraction):
    """Exact principal square root of a rational, or None."""
    sign = 1
    if q < 0:
        sign, q = -1, -q
    num = _int_root(q.numerator, 2)
    den = _int_root(q.denominator, 2)
    if num is None or den is None:
        return None
    root = Rational(Fraction(num, den))
    return root if sign > 0 else mul(root, I)


def power(base: Expr, exponent: Expr) -> Expr:
    if isinstance(exponent, Rational):
        ev = exponent.value
        if ev == 0:
            return ONE
        if ev == 1:
            return base
    if base == ONE:
        return ONE
    if isinstance(base, Rational):
        bv = base.value
        if bv == 0:
            if isinstance(exponent, Rational):
                if exponent.value > 0:
                    return ZERO
                raise DomainError("0 raised to a non-positive power")
            return Pow(base, exponent)
        if isinstance(exponent, Rational):
            ev = exponent.value
            if ev.denominator == 1:
                return Rational(bv ** ev.numerator)
            if ev.denominator == 2 and bv > 0:
                root = _exact_sqrt(bv)
                if root is not None:
                    return power(root, Rational(ev.numerator))
        return Pow(base, exponent)
    int_exp = isinstance(exponent, Rational) and exponent.value.denominator == 1
    if isinstance(base, ImaginaryUnit):
        if int_exp:
            k = exponent.value.numerator % 4
            return (ONE, I, MINUS_ONE, Mul((MINUS_ONE, I)))[k]
        return Pow(base, exponent)
    if int_exp:
        n = exponent.value.numerator
        if isinstance(base, Pow):
            return power(base.base, mul(base.exponent, exponent))
        if isinstance(base, Mul):
            return mul(*[power(f, exponent) for f in base._args])
        if isinstance(base, Func):
            if base.name == "exp":
                return func("exp", mul(exponent, base.arg))
            if base.name == "sqrt" and n % 2 == 0:
                return power(base.arg, Rational(n // 2))
    return Pow(base, exponent)


def _is_negative_term(e):
    c, _ = _split_coeff(e)
    return c < 0


def func(name: str, arg: Expr) -> Expr:
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    if isinstance(arg, Rational):
        v = arg.value
        if v == 0:
            if name in ("sin", "tan", "sqrt"):
                return ZERO
            if name in ("cos", "exp"):
                return ONE
            if name == "ln":
                raise DomainError("ln(0)")
        if name == "ln" and v == 1:
            return ZERO
        if name == "sqrt":
            root = _exact_sqrt(v)
            if root is not None:
                return root
    if name in ("sin", "tan", "cos") and not isinstance(arg, Add) and _is_negative_term(arg):
        pos = neg(arg)
        if name == "cos":
            return Func(name, pos)
        return neg(Func(name, pos))
    if name == "exp" and isinstance(arg, Func) and arg.name == "ln":
        return arg.arg
    return Func(name, arg)


def sqrt(e):
    return func("sqrt", as_expr(e))


def sin(e):
    return func("sin", as_expr(e))


def cos(e):
    return func("cos", as_expr(e))


def tan(e):
    return func("tan", as_expr(e))


def exp(e):
    return func("exp", as_expr(e))


def ln(e):
    return func("ln", as_expr(e))


def rebuild(e: Expr) -> Expr:
    """Re-run every smart constructor bottom-up."""
    if isinstance(e, (Rational, Symbol, ImaginaryUnit)):
        return e
    if isinstance(e, Add):
        return add(*[rebuild(a) for a in e._args])
    if isinstance(e, Mul):
        return mul(*[rebuild(a) for a in e._args])
    if isinstance(e, Pow):
        return power(rebuild(e.base), rebuild(e.exponent))
    return func(e.name, rebuild(e.arg))


def substitute(e: Expr, mapping) -> Expr:
    """Replace symbols by expressions; ``mapping`` keys are names or Symbols."""
    m = {}
    for k, v in mapping.items():
        m[k.name if isinstance(k, Symbol) else k] = as_expr(v)
    names = frozenset(m)
    cache = {}

    def go(x):
        if not (x.free_symbols() & names):
            return x
        hit = cache.get(x)
        if hit is not None:
            return hit
        if isinstance(x, Symbol):
            r = m[x.name]
        elif isinstance(x, Add):
            r = add(*[go(a) for a in x._args])
        elif isinstance(x, Mul):
            r = mul(*[go(a) for a in x._args])
        elif isinstance(x, Pow):
            r = power(go(x.base), go(x.exponent))
        else:
            r = func(x.name, go(x.arg))
        cache[x] = r
        return r

    return go(e)


def is_zero(e: Expr) -> bool:
    return isinstance(e, Rational) and e.value == 0


def total(exprs) -> Expr:
    exprs = list(exprs)
    return add(*exprs) if exprs else ZERO


def product(exprs) -> Expr:
    return reduce(mul, exprs, ONE)


def count_nodes(e: Expr) -> int:
    seen = set()
    stack = [e]
    while stack:
        x = stack.pop()
        if id(x) in seen:
            continue
        seen.add(id(x))
        if isinstance(x, (Add, Mul, Pow)):
            stack.extend(x._args)
        elif isinstance(x, Func):
            stack.append(x.arg)
    return len(seen)
