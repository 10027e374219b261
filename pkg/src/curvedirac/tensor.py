"""Dense tensors of expressions with per-slot variance."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import SameVariance, SlotOutOfRange
from .symexpr import ONE, ZERO, Expr, add, as_expr, eval_many, max_deviation, mul, simplify, to_text

UP = "up"
DOWN = "down"


@dataclass(frozen=True)
class Tensor:
    """Components stored row-major: index ``(i0, ..., ik)`` maps to
    ``sum(i_s * dim**(rank-1-s))``.

    ``symmetries`` lists declared ``(slot_a, slot_b, sign)`` pairs; sign +1
    for symmetric, -1 for antisymmetric. They are checked by
    :func:`check_symmetries`, never assumed.
    """

    dim: int
    variance: tuple
    components: tuple
    symmetries: tuple = ()
    name: str = ""

    def __post_init__(self):
        if len(self.components) != self.dim ** len(self.variance):
            raise ValueError(
                f"{len(self.components)} components for dim={self.dim}, rank={len(self.variance)}"
            )
        for v in self.variance:
            if v not in (UP, DOWN):
                raise ValueError(f"bad variance {v!r}")

    @property
    def rank(self) -> int:
        return len(self.variance)

    def _flat(self, idx) -> int:
        k = 0
        for i in idx:
            k = k * self.dim + i
        return k

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        if len(idx) != self.rank:
            raise IndexError(f"rank {self.rank} tensor indexed with {len(idx)} indices")
        return self.components[self._flat(idx)]

    def indices(self):
        return itertools.product(range(self.dim), repeat=self.rank)

    def items(self):
        return zip(self.indices(), self.components)

    def nonzero(self):
        return [(idx, c) for idx, c in self.items() if c != ZERO]

    def is_zero(self) -> bool:
        return all(c == ZERO for c in self.components)

    def scalar(self) -> Expr:
        if self.rank != 0:
            raise ValueError("not a scalar")
        return self.components[0]

    def map(self, fn, name=None) -> Tensor:
        return Tensor(self.dim, self.variance, tuple(fn(c) for c in self.components), self.symmetries, name or self.name)

    def simplified(self) -> Tensor:
        return self.map(simplify)

    def evaluate(self, bindings, tol=1e-10) -> np.ndarray:
        vals = eval_many(self.components, bindings, tol)
        return vals.reshape((self.dim,) * self.rank)

    def to_dict(self, nonzero_only=True) -> dict:
        """``{"0,1,1": "<expr text>"}`` in index order."""
        out = {}
        for idx, c in self.items():
            if nonzero_only and c == ZERO:
                continue
            out[",".join(map(str, idx))] = to_text(c)
        return out

    @classmethod
    def from_function(cls, dim, variance, fn, symmetries=(), name=""):
        variance = tuple(variance)
        comps = tuple(as_expr(fn(*idx)) for idx in itertools.product(range(dim), repeat=len(variance)))
        return cls(dim, variance, comps, tuple(symmetries), name)

    @classmethod
    def from_nested(cls, rows, variance, name=""):
        arr = np.array(rows, dtype=object)
        dim = arr.shape[0] if arr.ndim else 1
        return cls(dim, tuple(variance), tuple(as_expr(x) for x in arr.reshape(-1)), (), name)

    @classmethod
    def scalar_of(cls, e, dim):
        return cls(dim, (), (as_expr(e),))


def kronecker(dim) -> Tensor:
    return Tensor.from_function(dim, (UP, DOWN), lambda a, b: ONE if a == b else ZERO, name="delta")


def tensor_product(a: Tensor, b: Tensor) -> Tensor:
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    comps = tuple(mul(x, y) for x in a.components for y in b.components)
    return Tensor(a.dim, a.variance + b.variance, comps)


def contract(t: Tensor, slot_a: int, slot_b: int) -> Tensor:
    """Sum over a paired up/down slot; rank drops by two."""
    for s in (slot_a, slot_b):
        if not 0 <= s < t.rank:
            raise SlotOutOfRange(f"slot {s} outside rank {t.rank}")
    if slot_a == slot_b:
        raise SlotOutOfRange("cannot contract a slot with itself")
    if t.variance[slot_a] == t.variance[slot_b]:
        raise SameVariance(f"slots {slot_a} and {slot_b} are both {t.variance[slot_a]}")
    keep = [s for s in range(t.rank) if s not in (slot_a, slot_b)]
    variance = tuple(t.variance[s] for s in keep)
    comps = []
    for idx in itertools.product(range(t.dim), repeat=len(keep)):
        full = [0] * t.rank
        for s, i in zip(keep, idx):
            full[s] = i
        terms = []
        for k in range(t.dim):
            full[slot_a] = full[slot_b] = k
            terms.append(t[tuple(full)])
        comps.append(add(*terms))
    return Tensor(t.dim, variance, tuple(comps))


def _apply_metric(t: Tensor, slot: int, m, new_variance) -> Tensor:
    variance = list(t.variance)
    variance[slot] = new_variance
    comps = []
    for idx in t.indices():
        terms = []
        for k in range(t.dim):
            src = idx[:slot] + (k,) + idx[slot + 1:]
            terms.append(mul(m[idx[slot]][k], t[src]))
        comps.append(simplify(add(*terms)))
    return Tensor(t.dim, tuple(variance), tuple(comps), t.symmetries, t.name)


def raise_or_lower(t: Tensor, slot: int, metric) -> Tensor:
    """Flip the variance of ``slot`` using ``g_{ab}`` (lowering) or ``g^{ab}`` (raising)."""
    from .metric import inverse_metric

    if not 0 <= slot < t.rank:
        raise SlotOutOfRange(f"slot {slot} outside rank {t.rank}")
    if metric.dim != t.dim:
        raise ValueError("metric dimension does not match tensor")
    if t.variance[slot] == UP:
        return _apply_metric(t, slot, metric.g, DOWN)
    ginv = inverse_metric(metric)
    rows = tuple(tuple(ginv[a, b] for b in range(t.dim)) for a in range(t.dim))
    return _apply_metric(t, slot, rows, UP)


def lower(t, slot, metric):
    if t.variance[slot] == DOWN:
        raise ValueError(f"slot {slot} is already down")
    return raise_or_lower(t, slot, metric)


def raise_index(t, slot, metric):
    if t.variance[slot] == UP:
        raise ValueError(f"slot {slot} is already up")
    return raise_or_lower(t, slot, metric)


def symmetry_deviation(t: Tensor, slot_a, slot_b, sign, domain, fixed=None, n_samples=16, seed=0) -> float:
    """Worst numeric deviation of ``t - sign * t(slot_a <-> slot_b)``."""
    lhs, rhs = [], []
    for idx in t.indices():
        if idx[slot_a] >= idx[slot_b] and sign > 0:
            continue
        if idx[slot_a] > idx[slot_b]:
            continue
        sw = list(idx)
        sw[slot_a], sw[slot_b] = sw[slot_b], sw[slot_a]
        lhs.append(t[idx])
        rhs.append(mul(as_expr(sign), t[tuple(sw)]))
    if not lhs:
        return 0.0
    return max_deviation(lhs, rhs, domain, n_samples, seed, fixed)


def check_symmetries(t: Tensor, domain, fixed=None, tol=1e-9, n_samples=16, seed=0) -> bool:
    return all(
        symmetry_deviation(t, a, b, s, domain, fixed, n_samples, seed) <= tol for a, b, s in t.symmetries
    )
