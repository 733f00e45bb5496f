"""Forward-mode automatic differentiation with dual numbers.

A dual number a + b*eps (eps**2 = 0) propagates exact first derivatives
through ordinary arithmetic.  Components may themselves be Dual, which is
how second derivatives (nested brackets, Jacobi identity) fall out of the
same machinery.  Only scalars are handled here; grid code differentiates
with stencils instead.
"""

from __future__ import annotations

import math

_NUM = (int, float)


class Dual:
    """val + eps carrying d(val)/d(seed) in eps."""

    __slots__ = ("val", "eps")

    def __init__(self, val, eps=0.0):
        self.val = val
        self.eps = eps

    def __repr__(self):
        return f"Dual({self.val!r}, {self.eps!r})"

    def __add__(self, o):
        if isinstance(o, Dual):
            return Dual(self.val + o.val, self.eps + o.eps)
        if isinstance(o, _NUM):
            return Dual(self.val + o, self.eps)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, Dual):
            return Dual(self.val - o.val, self.eps - o.eps)
        if isinstance(o, _NUM):
            return Dual(self.val - o, self.eps)
        return NotImplemented

    def __rsub__(self, o):
        if isinstance(o, _NUM):
            return Dual(o - self.val, -self.eps)
        return NotImplemented

    def __mul__(self, o):
        if isinstance(o, Dual):
            return Dual(self.val * o.val, self.val * o.eps + self.eps * o.val)
        if isinstance(o, _NUM):
            return Dual(self.val * o, self.eps * o)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, Dual):
            inv = 1.0 / o.val
            v = self.val * inv
            return Dual(v, (self.eps - v * o.eps) * inv)
        if isinstance(o, _NUM):
            inv = 1.0 / o
            return Dual(self.val * inv, self.eps * inv)
        return NotImplemented

    def __rtruediv__(self, o):
        if isinstance(o, _NUM):
            inv = 1.0 / self.val
            v = o * inv
            return Dual(v, -v * inv * self.eps)
        return NotImplemented

    def __neg__(self):
        return Dual(-self.val, -self.eps)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if isinstance(n, int):
            if n == 0:
                return Dual(self.val * 0 + 1.0, self.eps * 0.0)
            if n == 1:
                return self
            v = self.val ** (n - 1)
            return Dual(v * self.val, n * v * self.eps)
        if isinstance(n, float):
            v = self.val ** (n - 1.0)
            return Dual(v * self.val, n * v * self.eps)
        return NotImplemented

    # comparisons act on the value part; handy for range guards in fields
    def __lt__(self, o):
        return self.val < (o.val if isinstance(o, Dual) else o)

    def __gt__(self, o):
        return self.val > (o.val if isinstance(o, Dual) else o)


def value(x):
    """Strip all dual layers, returning the underlying float."""
    while isinstance(x, Dual):
        x = x.val
    return x


# elementary functions, recursive so that nested duals work


def sin(x):
    if isinstance(x, Dual):
        return Dual(sin(x.val), cos(x.val) * x.eps)
    return math.sin(x)


def cos(x):
    if isinstance(x, Dual):
        return Dual(cos(x.val), -sin(x.val) * x.eps)
    return math.cos(x)


def exp(x):
    if isinstance(x, Dual):
        e = exp(x.val)
        return Dual(e, e * x.eps)
    return math.exp(x)


def expm1(x):
    if isinstance(x, Dual):
        return Dual(expm1(x.val), exp(x.val) * x.eps)
    return math.expm1(x)


def log(x):
    if isinstance(x, Dual):
        return Dual(log(x.val), x.eps / x.val)
    return math.log(x)


def log1p(x):
    if isinstance(x, Dual):
        return Dual(log1p(x.val), x.eps / (1.0 + x.val))
    return math.log1p(x)


def sqrt(x):
    if isinstance(x, Dual):
        r = sqrt(x.val)
        return Dual(r, 0.5 * x.eps / r)
    return math.sqrt(x)


def sinh(x):
    if isinstance(x, Dual):
        return Dual(sinh(x.val), cosh(x.val) * x.eps)
    return math.sinh(x)


def cosh(x):
    if isinstance(x, Dual):
        return Dual(cosh(x.val), sinh(x.val) * x.eps)
    return math.cosh(x)


def tanh(x):
    if isinstance(x, Dual):
        t = tanh(x.val)
        return Dual(t, (1.0 - t * t) * x.eps)
    return math.tanh(x)


def derivative(f, x):
    """d f / d x at a scalar x by seeding a single dual pass."""
    out = f(Dual(x, 1.0))
    return out.eps if isinstance(out, Dual) else 0.0


def second_derivative(f, x):
    """d2 f / d x2 via one level of nesting."""
    inner = f(Dual(Dual(x, 1.0), 1.0))
    if not isinstance(inner, Dual):
        return 0.0
    e = inner.eps
    return e.eps if isinstance(e, Dual) else 0.0
