"""Truncated Taylor ("jet") arithmetic at a point.

A :class:`Jet` stores the Taylor coefficients c_alpha = (d^alpha f)(p) / alpha!
of a scalar function about a fixed base point, densely in graded
lexicographic order, up to a truncation order.  Because the ordering is
graded, truncating to a lower order is a prefix slice.

Arithmetic between jets of different orders silently truncates to the lower
order; every jet therefore knows how many derivative levels it still carries,
which is what the exterior-derivative budget accounting relies on.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import DomainError

__all__ = [
    "Jet", "ncoeffs", "multi_indices", "partial",
    "exp", "ln", "sqrt", "powf", "power", "reciprocal",
    "sin", "cos", "tan", "csc", "cot",
    "sinh", "cosh", "tanh", "sech", "asinh", "atan", "atan2",
    "jet_matrix_inverse",
]


# ---------------------------------------------------------------------------
# index bookkeeping

def ncoeffs(dim: int, order: int) -> int:
    """Number of monomials of total degree <= order in `dim` variables."""
    return math.comb(dim + order, dim)


def _indices_of_degree(dim, deg):
    if dim == 1:
        return [(deg,)]
    out = []
    for first in range(deg, -1, -1):
        for rest in _indices_of_degree(dim - 1, deg - first):
            out.append((first,) + rest)
    return out


@lru_cache(maxsize=None)
def multi_indices(dim: int, order: int) -> tuple:
    """All exponent multi-indices with |alpha| <= order, graded lex order."""
    out = []
    for deg in range(order + 1):
        out.extend(_indices_of_degree(dim, deg))
    return tuple(out)


@lru_cache(maxsize=None)
def _rank(dim: int, order: int):
    return {a: i for i, a in enumerate(multi_indices(dim, order))}


@lru_cache(maxsize=None)
def _mul_table(dim: int, order: int):
    # Precomputed gather/scatter triples: product coefficient T gets a[I]*b[J].
    idx = multi_indices(dim, order)
    rank = _rank(dim, order)
    degs = [sum(a) for a in idx]
    I, J, T = [], [], []
    for i, a in enumerate(idx):
        for j, b in enumerate(idx):
            if degs[i] + degs[j] <= order:
                I.append(i)
                J.append(j)
                T.append(rank[tuple(x + y for x, y in zip(a, b))])
    return (np.asarray(I, dtype=np.intp),
            np.asarray(J, dtype=np.intp),
            np.asarray(T, dtype=np.intp))


@lru_cache(maxsize=None)
def _diff_table(dim: int, order: int, axis: int):
    # Taylor coefficient beta of d/dx_axis is c_{beta+e_axis} * (beta_axis+1).
    idx = multi_indices(dim, order)
    rank_lo = _rank(dim, order - 1)
    src, dst, fac = [], [], []
    for i, a in enumerate(idx):
        if a[axis] == 0:
            continue
        b = list(a)
        b[axis] -= 1
        src.append(i)
        dst.append(rank_lo[tuple(b)])
        fac.append(a[axis])
    return (np.asarray(src, dtype=np.intp),
            np.asarray(dst, dtype=np.intp),
            np.asarray(fac, dtype=float))


# ---------------------------------------------------------------------------
# the jet itself

class Jet:
    """A truncated Taylor expansion at a (implicit) base point.

    Jets are immutable by convention; all operations return fresh instances.
    """

    __slots__ = ("dim", "order", "c")

    def __init__(self, dim: int, order: int, c):
        self.dim = dim
        self.order = order
        self.c = np.asarray(c, dtype=float)
        if self.c.shape != (ncoeffs(dim, order),):
            raise ValueError(
                f"jet coefficient vector has length {self.c.shape}, "
                f"expected {ncoeffs(dim, order)} for dim={dim} order={order}"
            )

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, value: float, dim: int, order: int) -> "Jet":
        c = np.zeros(ncoeffs(dim, order))
        c[0] = value
        return cls(dim, order, c)

    @classmethod
    def variable(cls, value: float, axis: int, dim: int, order: int) -> "Jet":
        """The coordinate function x_axis seeded at the given value."""
        c = np.zeros(ncoeffs(dim, order))
        c[0] = value
        if order >= 1:
            c[1 + axis] = 1.0
        return cls(dim, order, c)

    # -- basic queries ------------------------------------------------------

    @property
    def value(self) -> float:
        return float(self.c[0])

    def gradient(self) -> np.ndarray:
        """The first-order coefficients (the plain partial derivatives)."""
        if self.order < 1:
            raise ValueError("order-0 jet has no gradient")
        return self.c[1:1 + self.dim].copy()

    def coeff(self, alpha) -> float:
        """Taylor coefficient for an exponent multi-index."""
        return float(self.c[_rank(self.dim, self.order)[tuple(alpha)]])

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError(f"cannot extend order {self.order} jet to {order}")
        if order == self.order:
            return self
        return Jet(self.dim, order, self.c[:ncoeffs(self.dim, order)])

    def __repr__(self):
        return f"Jet(dim={self.dim}, order={self.order}, value={self.value:.6g})"

    # -- ring operations ----------------------------------------------------

    def _align(self, other):
        if isinstance(other, Jet):
            if other.dim != self.dim:
                raise ValueError("jet dimension mismatch")
            m = min(self.order, other.order)
            return self.truncate(m), other.truncate(m)
        return self, Jet.constant(float(other), self.dim, self.order)

    def __add__(self, other):
        a, b = self._align(other)
        return Jet(a.dim, a.order, a.c + b.c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.dim, self.order, -self.c)

    def __sub__(self, other):
        a, b = self._align(other)
        return Jet(a.dim, a.order, a.c - b.c)

    def __rsub__(self, other):
        a, b = self._align(other)
        return Jet(a.dim, a.order, b.c - a.c)

    def __mul__(self, other):
        a, b = self._align(other)
        I, J, T = _mul_table(a.dim, a.order)
        prod = np.bincount(T, weights=a.c[I] * b.c[J],
                           minlength=ncoeffs(a.dim, a.order))
        return Jet(a.dim, a.order, prod)

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._align(other)
        return a * reciprocal(b)

    def __rtruediv__(self, other):
        a, b = self._align(other)
        return b * reciprocal(a)

    def __pow__(self, p):
        return power(self, p)


def partial(j: Jet, axis: int) -> Jet:
    """d/dx_axis as a jet one order lower.  Raises at order 0."""
    if j.order < 1:
        raise ValueError("cannot differentiate an order-0 jet")
    src, dst, fac = _diff_table(j.dim, j.order, axis)
    c = np.zeros(ncoeffs(j.dim, j.order - 1))
    np.add.at(c, dst, j.c[src] * fac)
    return Jet(j.dim, j.order - 1, c)


# ---------------------------------------------------------------------------
# elementary functions via Horner composition on the nilpotent part

def _compose(f: Jet, outer) -> Jet:
    """Evaluate sum_k outer[k] * (f - f0)^k by Horner."""
    u = f - f.value
    acc = Jet.constant(outer[-1], f.dim, f.order)
    for k in range(len(outer) - 2, -1, -1):
        acc = acc * u + outer[k]
    return acc


def _series(f, coeff_fn):
    outer = [coeff_fn(k) for k in range(f.order + 1)]
    return _compose(f, outer)


def _as_jet(x, like: Jet) -> Jet:
    if isinstance(x, Jet):
        return x
    return Jet.constant(float(x), like.dim, like.order)


def exp(f: Jet) -> Jet:
    e0 = math.exp(f.value)
    return _series(f, lambda k: e0 / math.factorial(k))


def ln(f: Jet) -> Jet:
    f0 = f.value
    if f0 <= 0.0:
        raise DomainError("ln", f0)
    def ck(k):
        if k == 0:
            return math.log(f0)
        return ((-1.0) ** (k + 1)) / (k * f0 ** k)
    return _series(f, ck)


def reciprocal(f: Jet) -> Jet:
    f0 = f.value
    if f0 == 0.0:
        raise DomainError("reciprocal", f0)
    return _series(f, lambda k: ((-1.0) ** k) / f0 ** (k + 1))


def _int_power(f: Jet, n: int) -> Jet:
    if n < 0:
        return reciprocal(_int_power(f, -n))
    result = Jet.constant(1.0, f.dim, f.order)
    base = f
    while n:
        if n & 1:
            result = result * base
        base = base * base if n > 1 else base
        n >>= 1
    return result


def powf(f: Jet, p: float) -> Jet:
    """f**p for a real constant exponent.

    Integer exponents work for any nonzero-valued base (and any base when
    p >= 0); non-integer exponents require a positive base value.
    """
    if float(p).is_integer():
        return _int_power(f, int(p))
    f0 = f.value
    if f0 <= 0.0:
        raise DomainError("power", f0)
    return _series(f, lambda k: _binom(p, k) * f0 ** (p - k))


def _binom(p: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= (p - i) / (i + 1)
    return out


def power(f: Jet, g) -> Jet:
    """General power.  Constant exponents take the direct series; a genuinely
    varying exponent goes through exp(g*ln f)."""
    if isinstance(g, Jet):
        if np.any(g.c[1:] != 0.0):
            return exp(g * ln(f))
        g = g.value
    return powf(f, float(g))


def sqrt(f: Jet) -> Jet:
    f0 = f.value
    if f0 < 0.0 or (f0 == 0.0 and f.order >= 1):
        raise DomainError("sqrt", f0)
    if f0 == 0.0:
        return Jet.constant(0.0, f.dim, f.order)
    return _series(f, lambda k: _binom(0.5, k) * f0 ** (0.5 - k))


def sin(f: Jet) -> Jet:
    f0 = f.value
    return _series(f, lambda k: math.sin(f0 + k * math.pi / 2) / math.factorial(k))


def cos(f: Jet) -> Jet:
    f0 = f.value
    return _series(f, lambda k: math.cos(f0 + k * math.pi / 2) / math.factorial(k))


def tan(f: Jet) -> Jet:
    c = cos(f)
    if c.value == 0.0:
        raise DomainError("tan", f.value)
    return sin(f) / c


def csc(f: Jet) -> Jet:
    s = sin(f)
    if s.value == 0.0:
        raise DomainError("csc", f.value)
    return reciprocal(s)


def cot(f: Jet) -> Jet:
    s = sin(f)
    if s.value == 0.0:
        raise DomainError("cot", f.value)
    return cos(f) / s


def sinh(f: Jet) -> Jet:
    f0 = f.value
    s0, c0 = math.sinh(f0), math.cosh(f0)
    return _series(f, lambda k: (s0 if k % 2 == 0 else c0) / math.factorial(k))


def cosh(f: Jet) -> Jet:
    f0 = f.value
    s0, c0 = math.sinh(f0), math.cosh(f0)
    return _series(f, lambda k: (c0 if k % 2 == 0 else s0) / math.factorial(k))


def tanh(f: Jet) -> Jet:
    return sinh(f) / cosh(f)


def sech(f: Jet) -> Jet:
    return reciprocal(cosh(f))


def asinh(f: Jet) -> Jet:
    return ln(f + sqrt(f * f + 1.0))


def atan(f: Jet) -> Jet:
    # atan(f) = atan(f0) + atan(u) with u = (f-f0)/(1+f*f0) nilpotent.
    f0 = f.value
    u = (f - f0) / (f * f0 + 1.0)
    outer = [0.0] * (f.order + 1)
    for k in range(1, f.order + 1, 2):
        outer[k] = ((-1.0) ** ((k - 1) // 2)) / k
    return _compose(u, outer) + math.atan(f0)


def atan2(y, x) -> Jet:
    """Two-argument arctangent of jets (angle of the point (x, y)).

    The larger-magnitude coordinate is used as the divisor, so the result is
    smooth across both axes; the branch constant only shifts the value part.
    """
    if not isinstance(y, Jet):
        y = _as_jet(y, x)
    x = _as_jet(x, y)
    y0, x0 = y.value, x.value
    if y0 == 0.0 and x0 == 0.0:
        raise DomainError("atan2", 0.0)
    base = math.atan2(y0, x0)
    if abs(x0) >= abs(y0):
        t = atan(y / x)
        return t + (base - math.atan(y0 / x0))
    t = atan(x / y)
    return (base + math.atan(x0 / y0)) - t


# ---------------------------------------------------------------------------
# small dense linear algebra over jets

def jet_matrix_inverse(m):
    """Invert a small square matrix of jets (Gauss-Jordan, value pivoting).

    Raises DomainError("matrix inverse", 0.0) when the matrix is singular at
    the base point.
    """
    n = len(m)
    a = [list(row) for row in m]
    dim, order = a[0][0].dim, min(e.order for row in a for e in row)
    ident = [[Jet.constant(1.0 if i == j else 0.0, dim, order) for j in range(n)]
             for i in range(n)]
    a = [[e.truncate(order) for e in row] for row in a]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col].value))
        if a[piv][col].value == 0.0:
            raise DomainError("matrix inverse", 0.0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            ident[col], ident[piv] = ident[piv], ident[col]
        inv_piv = reciprocal(a[col][col])
        a[col] = [e * inv_piv for e in a[col]]
        ident[col] = [e * inv_piv for e in ident[col]]
        for r in range(n):
            if r == col:
                continue
            factor = a[r][col]
            if np.all(factor.c == 0.0):
                continue
            a[r] = [e - factor * q for e, q in zip(a[r], a[col])]
            ident[r] = [e - factor * q for e, q in zip(ident[r], ident[col])]
    return ident
