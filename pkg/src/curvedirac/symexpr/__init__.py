"""Symbolic scalar expressions: construction, parsing, calculus, evaluation."""

from .calculus import diff
from .core import (
    HALF,
    I,
    MINUS_ONE,
    ONE,
    TWO,
    ZERO,
    Add,
    Expr,
    Func,
    ImaginaryUnit,
    Mul,
    Pow,
    Rational,
    Symbol,
    add,
    as_expr,
    cos,
    count_nodes,
    div,
    exp,
    func,
    is_zero,
    ln,
    mul,
    neg,
    number,
    power,
    rebuild,
    sin,
    sqrt,
    sub,
    substitute,
    symbol,
    symbols,
    tan,
    total,
)
from .numeric import (
    EvalContext,
    Sampler,
    compile_exprs,
    eval_at,
    eval_many,
    expr_equiv,
    max_deviation,
    sample_values,
)
from .parsing import parse_expr
from .printing import to_text
from .simplify import expand, simplify

__all__ = [name for name in dir() if not name.startswith("_")]
