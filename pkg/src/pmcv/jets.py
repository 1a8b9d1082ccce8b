"""Forward-mode truncated multivariate Taylor jets.

A :class:`Jet` stores the normalized Taylor coefficients ``d^alpha f / alpha!``
for every multi-index with ``|alpha| <= order``, densely, in graded order.
The coefficient array has shape ``(ncoef, *tail)``; the tail is an arbitrary
numpy shape, so one Jet can carry a whole batch of base points and/or a
vector or matrix value.  Tails broadcast with numpy rules.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DimensionError

MAX_ORDER = 8


class _Space:
    """Multi-index bookkeeping for ``nvars`` variables up to ``order``."""

    def __init__(self, nvars: int, order: int):
        self.nvars = nvars
        self.order = order
        idx = []
        for deg in range(order + 1):
            for combo in itertools.combinations_with_replacement(range(nvars), deg):
                a = [0] * nvars
                for v in combo:
                    a[v] += 1
                idx.append(tuple(a))
        # combinations_with_replacement yields each multi-index once per degree
        self.multi = idx
        self.index = {a: i for i, a in enumerate(idx)}
        self.degree = np.array([sum(a) for a in idx])
        self.size = len(idx)

        ia, ib, ik = [], [], []
        for i, a in enumerate(idx):
            for j, b in enumerate(idx):
                if self.degree[i] + self.degree[j] <= order:
                    ia.append(i)
                    ib.append(j)
                    ik.append(self.index[tuple(x + y for x, y in zip(a, b))])
        order_k = np.argsort(ik, kind="stable")
        self.pa = np.array(ia)[order_k]
        self.pb = np.array(ib)[order_k]
        ks = np.array(ik)[order_k]
        self.starts = np.flatnonzero(np.r_[True, ks[1:] != ks[:-1]])
        # pairs with both factors of positive degree (the rest is a broadcast)
        high = (self.degree[self.pa] > 0) & (self.degree[self.pb] > 0)
        self.ha, self.hb, hk = self.pa[high], self.pb[high], ks[high]
        self.hstarts = np.flatnonzero(np.r_[True, hk[1:] != hk[:-1]]) if hk.size else hk
        self.htargets = hk[self.hstarts] if hk.size else hk

    def size_upto(self, order: int) -> int:
        return math.comb(self.nvars + order, order)


@lru_cache(maxsize=None)
def space(nvars: int, order: int) -> _Space:
    if not 0 <= order <= MAX_ORDER:
        raise DimensionError(f"jet order must be in [0, {MAX_ORDER}], got {order}")
    if nvars < 1:
        raise DimensionError("jets need at least one variable")
    return _Space(nvars, order)


@lru_cache(maxsize=None)
def _derivative_table(nvars: int, order: int, k: int):
    sp = space(nvars, order)
    pos, fac = [], []
    for tup in itertools.product(range(nvars), repeat=k):
        a = [0] * nvars
        for v in tup:
            a[v] += 1
        pos.append(sp.index[tuple(a)])
        fac.append(math.prod(math.factorial(x) for x in a))
    return np.array(pos), np.array(fac, dtype=float)


@lru_cache(maxsize=None)
def _partial_table(nvars: int, order: int, var: int):
    src = space(nvars, order)
    dst = space(nvars, order - 1)
    pos, fac = [], []
    for a in dst.multi:
        b = list(a)
        b[var] += 1
        pos.append(src.index[tuple(b)])
        fac.append(float(b[var]))
    return np.array(pos), np.array(fac)


def _pad_tail(c: np.ndarray, ndim: int) -> np.ndarray:
    """Left-pad the tail with singleton axes (numpy broadcasting semantics)."""
    extra = ndim - (c.ndim - 1)
    if extra <= 0:
        return c
    return c.reshape(c.shape[:1] + (1,) * extra + c.shape[1:])


def _expand(c: np.ndarray, ndim: int) -> np.ndarray:
    """Right-pad the tail with singleton axes up to ``ndim`` tail dimensions."""
    extra = ndim - (c.ndim - 1)
    return c.reshape(c.shape + (1,) * extra) if extra > 0 else c


class Jet:
    """Truncated Taylor expansion of a (possibly batched, tensor-valued) map."""

    __slots__ = ("c", "space", "base_point")
    __array_ufunc__ = None

    def __init__(self, coeffs, nvars: int, order: int, base_point=None):
        self.space = space(nvars, order)
        self.c = np.asarray(coeffs, dtype=float)
        if self.c.shape[0] != self.space.size:
            raise DimensionError(f"expected {self.space.size} coefficients, got {self.c.shape[0]}")
        self.base_point = base_point

    # -- structure ---------------------------------------------------------
    @property
    def order(self) -> int:
        return self.space.order

    @property
    def nvars(self) -> int:
        return self.space.nvars

    @property
    def tail(self) -> tuple:
        return self.c.shape[1:]

    @property
    def value(self) -> np.ndarray:
        return self.c[0]

    def _new(self, c) -> "Jet":
        return Jet(c, self.nvars, self.order, self.base_point)

    def coefficient(self, alpha) -> np.ndarray:
        return self.c[self.space.index[tuple(alpha)]]

    def derivative(self, alpha) -> np.ndarray:
        """``d^alpha f`` at the base point."""
        return math.prod(math.factorial(a) for a in alpha) * self.coefficient(alpha)

    def derivatives(self, k: int) -> np.ndarray:
        """Full symmetric tensor of k-th derivatives, shape ``(*tail, m, ..., m)``."""
        if k > self.order:
            raise DimensionError(f"jet of order {self.order} has no derivatives of order {k}")
        pos, fac = _derivative_table(self.nvars, self.order, k)
        t = self.c[pos] * fac.reshape((-1,) + (1,) * len(self.tail))
        t = t.reshape((self.nvars,) * k + self.tail)
        return np.moveaxis(t, list(range(k)), list(range(-k, 0))) if k else t

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise DimensionError("cannot raise the order of a jet by truncation")
        return Jet(self.c[: self.space.size_upto(order)], self.nvars, order, self.base_point)

    def partial(self, var: int) -> "Jet":
        """Jet of ``d f / d u_var``, one order lower."""
        pos, fac = _partial_table(self.nvars, self.order, var)
        c = self.c[pos] * fac.reshape((-1,) + (1,) * len(self.tail))
        return Jet(c, self.nvars, self.order - 1, self.base_point)

    def __getitem__(self, key) -> "Jet":
        if not isinstance(key, tuple):
            key = (key,)
        return self._new(self.c[(slice(None),) + key])

    def sum(self, axis=-1) -> "Jet":
        axis = axis if axis < 0 else axis + 1
        return self._new(self.c.sum(axis=axis))

    # -- arithmetic --------------------------------------------------------
    def _check(self, other: "Jet"):
        if other.space is not self.space:
            raise DimensionError(
                f"jet spaces differ: ({self.nvars}, {self.order}) vs ({other.nvars}, {other.order})"
            )

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            nd = max(len(self.tail), len(other.tail))
            return self._new(_pad_tail(self.c, nd) + _pad_tail(other.c, nd))
        other = np.asarray(other, dtype=float)
        c = _pad_tail(self.c, other.ndim)
        c = np.array(np.broadcast_to(c, c.shape[:1] + np.broadcast_shapes(c.shape[1:], other.shape)))
        c[0] = c[0] + other
        return self._new(c)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            nd = max(len(self.tail), len(other.tail))
            a = _pad_tail(self.c, nd)
            b = _pad_tail(other.c, nd)
            sp = self.space
            c = a * b[:1] + b * a[:1]
            c[0] -= a[0] * b[0]
            if sp.ha.size:
                c[sp.htargets] += np.add.reduceat(a[sp.ha] * b[sp.hb], sp.hstarts, axis=0)
            return self._new(c)
        other = np.asarray(other, dtype=float)
        return self._new(_pad_tail(self.c, other.ndim) * other[None])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * reciprocal(other)
        return self * (1.0 / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, p):
        if isinstance(p, int) and p >= 0:
            out = self * 0.0 + 1.0
            for _ in range(p):
                out = out * self
            return out
        return power(self, p)

    def compose(self, derivs) -> "Jet":
        """Evaluate ``sum_k derivs[k] * (self - self.value)**k`` by Horner.

        ``derivs[k]`` is the k-th normalized Taylor coefficient of the outer
        function at ``self.value``; it may carry extra trailing tail axes.
        """
        K = self.order
        delta = self.c.copy()
        delta[0] = 0.0
        d = [np.asarray(x, dtype=float) for x in derivs[: K + 1]]
        nd = max(x.ndim for x in d)
        delta = Jet(_expand(delta, nd), self.nvars, K, self.base_point)
        if K == 0:
            return constant(d[0], self)
        out = delta * d[K] + d[K - 1]
        for k in range(K - 2, -1, -1):
            out = delta * out + d[k]
        return out

    def __repr__(self):
        return f"Jet(nvars={self.nvars}, order={self.order}, tail={self.tail})"


# -- constructors ----------------------------------------------------------
def variables(point, order: int) -> list[Jet]:
    """Identity jets of the chart coordinates at ``point`` (shape ``(..., m)``)."""
    point = np.asarray(point, dtype=float)
    m = point.shape[-1]
    sp = space(m, order)
    out = []
    for i in range(m):
        c = np.zeros((sp.size,) + point.shape[:-1])
        c[0] = point[..., i]
        if order >= 1:
            e = [0] * m
            e[i] = 1
            c[sp.index[tuple(e)]] = 1.0
        out.append(Jet(c, m, order, point))
    return out


def constant(value, like: Jet) -> Jet:
    value = np.asarray(value, dtype=float)
    c = np.zeros((like.space.size,) + value.shape)
    c[0] = value
    return Jet(c, like.nvars, like.order, like.base_point)


def stack(jets, axis: int = -1) -> Jet:
    """Stack jets along a new tail axis."""
    nd = max(len(j.tail) for j in jets)
    cs = [_pad_tail(j.c, nd) for j in jets]
    shape = np.broadcast_shapes(*[c.shape for c in cs])
    cs = [np.broadcast_to(c, shape) for c in cs]
    axis = axis if axis < 0 else axis + 1
    j0 = jets[0]
    return Jet(np.stack(cs, axis=axis), j0.nvars, j0.order, j0.base_point)


# -- elementary functions ----------------------------------------------------
def _taylor(f_derivs: Callable[[np.ndarray, int], list], x: Jet) -> Jet:
    a = x.value
    ds = f_derivs(a, x.order)
    return x.compose([d / math.factorial(k) for k, d in enumerate(ds)])


def _sin_d(a, K):
    s, c = np.sin(a), np.cos(a)
    return [(s, c, -s, -c)[k % 4] for k in range(K + 1)]


def _cos_d(a, K):
    s, c = np.sin(a), np.cos(a)
    return [(c, -s, -c, s)[k % 4] for k in range(K + 1)]


def _exp_d(a, K):
    e = np.exp(a)
    return [e] * (K + 1)


def _log_d(a, K):
    return [np.log(a)] + [(-1) ** (k - 1) * math.factorial(k - 1) / a**k for k in range(1, K + 1)]


def _power_d(p):
    def f(a, K):
        out, coef = [], 1.0
        for k in range(K + 1):
            out.append(coef * a ** (p - k))
            coef *= p - k
        return out

    return f


def _dispatch(name, np_fn, d_fn):
    def fn(x):
        if isinstance(x, Jet):
            return _taylor(d_fn, x)
        return np_fn(x)

    fn.__name__ = name
    fn.__doc__ = f"{name} of a float, array or Jet."
    return fn


sin = _dispatch("sin", np.sin, _sin_d)
cos = _dispatch("cos", np.cos, _cos_d)
exp = _dispatch("exp", np.exp, _exp_d)
log = _dispatch("log", np.log, _log_d)


def power(x, p: float):
    if isinstance(x, Jet):
        return _taylor(_power_d(float(p)), x)
    return np.power(x, p)


def sqrt(x):
    return power(x, 0.5) if isinstance(x, Jet) else np.sqrt(x)


def reciprocal(x):
    return power(x, -1.0) if isinstance(x, Jet) else 1.0 / np.asarray(x, dtype=float)


_FUNCTIONS = {"sin": sin, "cos": cos, "exp": exp, "log": log, "sqrt": sqrt}


def jet_arithmetic(a: Jet, b, op: str) -> Jet:
    """Uniform entry point: ``add``, ``mul``, ``scale`` or ``compose``.

    For ``compose``, ``b`` names an elementary function (``sin``, ``cos``,
    ``exp``, ``log``, ``sqrt``) or is a callable accepting a Jet.
    """
    if op == "add":
        return a + b
    if op == "mul":
        if not isinstance(b, Jet):
            raise TypeError("mul expects two jets; use 'scale' for scalars")
        return a * b
    if op == "scale":
        return a * b
    if op == "compose":
        fn = _FUNCTIONS[b] if isinstance(b, str) else b
        return fn(a)
    raise ValueError(f"unknown jet operation {op!r}")
