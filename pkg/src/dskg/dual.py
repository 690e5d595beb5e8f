"""Forward-mode automatic differentiation with second-order jets.

A :class:`Dual` carries a complex value together with its gradient and
Hessian with respect to up to four seed variables (three chart coordinates
plus, optionally, one auxiliary variable).  All derivatives produced this
way are exact to rounding; no finite-difference truncation enters anywhere
in the main computation paths.
"""

from __future__ import annotations

import cmath


class Dual:
    """Second-order jet (value, gradient, Hessian) over complex scalars."""

    __slots__ = ("val", "grad", "hess")

    def __init__(self, val, grad, hess):
        self.val = val
        self.grad = grad        # tuple, length k
        self.hess = hess        # tuple of k tuples, symmetric

    # -- construction -------------------------------------------------

    @staticmethod
    def constant(value, nvars):
        z = (0j,) * nvars
        return Dual(complex(value), z, (z,) * nvars)

    @staticmethod
    def variable(value, index, nvars):
        g = [0j] * nvars
        g[index] = 1 + 0j
        z = (0j,) * nvars
        return Dual(complex(value), tuple(g), (z,) * nvars)

    @staticmethod
    def seed(point):
        """All coordinates of ``point`` as simultaneous dual variables."""
        k = len(point)
        return [Dual.variable(point[i], i, k) for i in range(k)]

    def _coerce(self, other):
        if isinstance(other, Dual):
            return other
        return Dual.constant(other, len(self.grad))

    # -- ring operations ----------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        g = tuple(a + b for a, b in zip(self.grad, o.grad))
        h = tuple(tuple(a + b for a, b in zip(ra, rb))
                  for ra, rb in zip(self.hess, o.hess))
        return Dual(self.val + o.val, g, h)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.val, tuple(-a for a in self.grad),
                    tuple(tuple(-a for a in r) for r in self.hess))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Dual):
            c = complex(other)
            g = tuple(a * c for a in self.grad)
            h = tuple(tuple(a * c for a in r) for r in self.hess)
            return Dual(self.val * c, g, h)
        o = other
        sv, ov = self.val, o.val
        sg, og = self.grad, o.grad
        g = tuple(sg[i] * ov + sv * og[i] for i in range(len(sg)))
        h = tuple(tuple(self.hess[i][j] * ov + sg[i] * og[j]
                        + sg[j] * og[i] + sv * o.hess[i][j]
                        for j in range(len(sg)))
                  for i in range(len(sg)))
        return Dual(sv * ov, g, h)

    __rmul__ = __mul__

    def reciprocal(self):
        iv = 1.0 / self.val
        iv2 = iv * iv
        g = tuple(-a * iv2 for a in self.grad)
        h = tuple(tuple((2.0 * self.grad[i] * self.grad[j] * iv - self.hess[i][j]) * iv2
                        for j in range(len(self.grad)))
                  for i in range(len(self.grad)))
        return Dual(iv, g, h)

    def __truediv__(self, other):
        if not isinstance(other, Dual):
            return self * (1.0 / complex(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def __pow__(self, p):
        if isinstance(p, int) or (isinstance(p, float) and p.is_integer()):
            n = int(p)
            if n == 0:
                return Dual.constant(1.0, len(self.grad))
            if n < 0:
                return (self ** (-n)).reciprocal()
            out = self
            for _ in range(n - 1):
                out = out * self
            return out
        # non-integer exponent: principal branch
        return exp(log(self) * p)

    # -- composition with a univariate 2-jet ---------------------------

    def lift(self, f0, f1, f2):
        """Compose with a scalar function given by value/first/second derivative."""
        g = tuple(f1 * a for a in self.grad)
        h = tuple(tuple(f1 * self.hess[i][j] + f2 * self.grad[i] * self.grad[j]
                        for j in range(len(self.grad)))
                  for i in range(len(self.grad)))
        return Dual(f0, g, h)

    def __repr__(self):
        return f"Dual({self.val!r}, grad={self.grad!r})"


# -- elementary functions, usable on Dual or plain scalars -------------

def exp(x):
    if isinstance(x, Dual):
        e = cmath.exp(x.val)
        return x.lift(e, e, e)
    return cmath.exp(x)


def log(x):
    if isinstance(x, Dual):
        v = x.val
        return x.lift(cmath.log(v), 1.0 / v, -1.0 / (v * v))
    return cmath.log(x)


def sqrt(x):
    if isinstance(x, Dual):
        s = cmath.sqrt(x.val)
        return x.lift(s, 0.5 / s, -0.25 / (s * s * s))
    return cmath.sqrt(x)


def sin(x):
    if isinstance(x, Dual):
        s, c = cmath.sin(x.val), cmath.cos(x.val)
        return x.lift(s, c, -s)
    return cmath.sin(x)


def cos(x):
    if isinstance(x, Dual):
        s, c = cmath.sin(x.val), cmath.cos(x.val)
        return x.lift(c, -s, -c)
    return cmath.cos(x)


def tan(x):
    return sin(x) / cos(x)


def sinh(x):
    if isinstance(x, Dual):
        s, c = cmath.sinh(x.val), cmath.cosh(x.val)
        return x.lift(s, c, s)
    return cmath.sinh(x)


def cosh(x):
    if isinstance(x, Dual):
        s, c = cmath.sinh(x.val), cmath.cosh(x.val)
        return x.lift(c, s, c)
    return cmath.cosh(x)


def tanh(x):
    return sinh(x) / cosh(x)


def power(x, p):
    """Principal-branch power with arbitrary complex exponent."""
    if isinstance(x, Dual) or isinstance(p, Dual):
        xd = x if isinstance(x, Dual) else Dual.constant(x, len(p.grad))
        return exp(log(xd) * p)
    return cmath.exp(p * cmath.log(x))


def value(x):
    return x.val if isinstance(x, Dual) else complex(x)


def gradient(f, point):
    """Exact gradient of ``f`` at ``point`` (tuple of partials)."""
    r = f(Dual.seed(point))
    return r.grad if isinstance(r, Dual) else (0j,) * len(point)


def hessian(f, point):
    r = f(Dual.seed(point))
    if isinstance(r, Dual):
        return r.hess
    k = len(point)
    return ((0j,) * k,) * k
