"""Small dense matrices of expressions, stored as tuples of row tuples."""

from .symexpr import ONE, ZERO, add, as_expr, mul, neg, power, simplify, MINUS_ONE


def as_matrix(rows):
    return tuple(tuple(as_expr(x) for x in row) for row in rows)


def identity(n):
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def zeros(n, m=None):
    m = n if m is None else m
    return tuple(tuple(ZERO for _ in range(m)) for _ in range(n))


def diagonal(entries):
    n = len(entries)
    return tuple(tuple(as_expr(entries[i]) if i == j else ZERO for j in range(n)) for i in range(n))


def matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return tuple(
        tuple(add(*[mul(a[i][s], b[s][j]) for s in range(k)]) for j in range(m)) for i in range(n)
    )


def matadd(*ms):
    n, m = len(ms[0]), len(ms[0][0])
    return tuple(tuple(add(*[x[i][j] for x in ms]) for j in range(m)) for i in range(n))


def scale(c, a):
    c = as_expr(c)
    return tuple(tuple(mul(c, x) for x in row) for row in a)


def matvec(a, v):
    return tuple(add(*[mul(a[i][j], v[j]) for j in range(len(v))]) for i in range(len(a)))


def transpose(a):
    return tuple(zip(*a))


def map_entries(fn, a):
    return tuple(tuple(fn(x) for x in row) for row in a)


def is_diagonal(a):
    return all(a[i][j] == ZERO for i in range(len(a)) for j in range(len(a)) if i != j)


def _minor(a, i, j):
    return tuple(tuple(row[c] for c in range(len(row)) if c != j) for r, row in enumerate(a) if r != i)


def det(a):
    """Cofactor expansion along the sparsest row (fine for n <= 4)."""
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return add(mul(a[0][0], a[1][1]), neg(mul(a[0][1], a[1][0])))
    r = min(range(n), key=lambda i: sum(1 for x in a[i] if x != ZERO), default=0)
    terms = []
    for j in range(n):
        if a[r][j] == ZERO:
            continue
        sign = ONE if (r + j) % 2 == 0 else MINUS_ONE
        terms.append(mul(sign, a[r][j], det(_minor(a, r, j))))
    return add(*terms)


def adjugate(a):
    n = len(a)
    if n == 1:
        return ((ONE,),)
    return tuple(
        tuple(
            mul(ONE if (i + j) % 2 == 0 else MINUS_ONE, det(_minor(a, j, i)))
            for j in range(n)
        )
        for i in range(n)
    )


def inverse(a):
    """Symbolic inverse via adjugate over determinant, entries simplified."""
    d = det(a)
    inv_d = power(d, MINUS_ONE)
    adj = adjugate(a)
    return tuple(tuple(simplify(mul(x, inv_d)) for x in row) for row in adj)
