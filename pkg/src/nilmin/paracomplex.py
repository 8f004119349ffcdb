"""Split-complex (paracomplex) arithmetic and second-order jets.

Numbers are of the form z = x + j*y with j**2 = +1.  The squared modulus
x**2 - y**2 is sign-indefinite, and elements with zero squared modulus
("null divisors") are not invertible.  Every module in this package runs
on this algebra; the derivative convention is fixed once here:

    d/dz    = (d/dx + j d/dy) / 2
    d/dzbar = (d/dx - j d/dy) / 2

Elementary functions (exp, sinh, cosh) are evaluated through the null
basis e+ = (1+j)/2, e- = (1-j)/2:  z = u*e+ + v*e- with u = x+y,
v = x-y, and f(z) = f(u)*e+ + f(v)*e-.  This keeps them total on the
whole plane.
"""
from __future__ import annotations

import math

from .errors import NullDivisor

__all__ = [
    "Paracomplex",
    "Jet2",
    "J",
    "ONE",
    "ZERO",
    "pexp",
    "psinh",
    "pcosh",
    "sqrt_all",
    "close",
]

_NumberLike = (int, float)


class Paracomplex:
    """An immutable split-complex number re + j*im."""

    __slots__ = ("re", "im")

    def __init__(self, re=0.0, im=0.0):
        object.__setattr__(self, "re", float(re))
        object.__setattr__(self, "im", float(im))

    def __setattr__(self, name, value):
        raise AttributeError("Paracomplex values are immutable")

    # -- basic structure ------------------------------------------------

    def conj(self):
        return Paracomplex(self.re, -self.im)

    def modulus_sq(self):
        """z * conj(z) = re**2 - im**2; may be negative or zero."""
        return self.re * self.re - self.im * self.im

    def inverse(self):
        m = self.modulus_sq()
        if m == 0.0:
            raise NullDivisor(f"{self} is a null divisor")
        return Paracomplex(self.re / m, -self.im / m)

    # -- arithmetic -----------------------------------------------------

    @staticmethod
    def _coerce(x):
        if isinstance(x, Paracomplex):
            return x
        if isinstance(x, _NumberLike):
            return Paracomplex(x, 0.0)
        return None

    def __add__(self, other):
        o = Paracomplex._coerce(other)
        if o is None:
            return NotImplemented
        return Paracomplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = Paracomplex._coerce(other)
        if o is None:
            return NotImplemented
        return Paracomplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = Paracomplex._coerce(other)
        if o is None:
            return NotImplemented
        return Paracomplex(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = Paracomplex._coerce(other)
        if o is None:
            return NotImplemented
        # (a + jb)(c + jd) = (ac + bd) + j(ad + bc), using j**2 = 1
        return Paracomplex(
            self.re * o.re + self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Paracomplex._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = Paracomplex._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __neg__(self):
        return Paracomplex(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (self ** (-n)).inverse()
        result = ONE
        base = self
        k = n
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison and misc -------------------------------------------

    def __eq__(self, other):
        o = Paracomplex._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"Paracomplex({self.re!r}, {self.im!r})"

    def __str__(self):
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re:g} {sign} {abs(self.im):g}j"


J = Paracomplex(0.0, 1.0)
ONE = Paracomplex(1.0, 0.0)
ZERO = Paracomplex(0.0, 0.0)


def close(a, b, tol=1e-9):
    """Absolute-plus-relative closeness of two paracomplex values.

    No exact float equality is used anywhere in this package.
    """
    a = Paracomplex._coerce(a)
    b = Paracomplex._coerce(b)
    scale = max(abs(a.re), abs(a.im), abs(b.re), abs(b.im), 1.0)
    return abs(a.re - b.re) <= tol * scale and abs(a.im - b.im) <= tol * scale


def _from_null_basis(fu, fv):
    return Paracomplex(0.5 * (fu + fv), 0.5 * (fu - fv))


def _apply_real(z, f):
    """f(z) via the idempotent decomposition z = u*e+ + v*e-."""
    u = z.re + z.im
    v = z.re - z.im
    return _from_null_basis(f(u), f(v))


def pexp(z):
    return _apply_real(Paracomplex._coerce(z), math.exp)


def psinh(z):
    return _apply_real(Paracomplex._coerce(z), math.sinh)


def pcosh(z):
    return _apply_real(Paracomplex._coerce(z), math.cosh)


def sqrt_all(z, tol=1e-12):
    """All w with w**2 = z; the set may be empty.

    In null coordinates w**2 = z becomes (a+b)**2 = u, (a-b)**2 = v with
    u = x+y, v = x-y, so roots exist iff u >= 0 and v >= 0.  Generic
    sizes are 0, 2 or 4 (4 when both u > 0 and v > 0).
    """
    z = Paracomplex._coerce(z)
    u = z.re + z.im
    v = z.re - z.im
    if u < 0.0 or v < 0.0:
        return []
    s = math.sqrt(u)
    t = math.sqrt(v)
    roots = []
    for sg_s in (1.0, -1.0):
        for sg_t in (1.0, -1.0):
            a = 0.5 * (sg_s * s + sg_t * t)
            b = 0.5 * (sg_s * s - sg_t * t)
            w = Paracomplex(a, b)
            if not any(close(w, r, tol) for r in roots):
                roots.append(w)
    return roots


class Jet2:
    """Second-order forward-mode jet of a paracomplex function of (z, zbar).

    Slots hold the value and the five independent derivatives; the mixed
    partial is a single shared slot.
    """

    __slots__ = ("v", "dz", "dzb", "dzz", "dzzb", "dzbzb")

    def __init__(self, v, dz=ZERO, dzb=ZERO, dzz=ZERO, dzzb=ZERO, dzbzb=ZERO):
        self.v = Paracomplex._coerce(v)
        self.dz = Paracomplex._coerce(dz)
        self.dzb = Paracomplex._coerce(dzb)
        self.dzz = Paracomplex._coerce(dzz)
        self.dzzb = Paracomplex._coerce(dzzb)
        self.dzbzb = Paracomplex._coerce(dzbzb)

    @classmethod
    def const(cls, c):
        return cls(Paracomplex._coerce(c))

    @classmethod
    def var_z(cls, z0):
        return cls(z0, dz=ONE)

    @classmethod
    def var_zbar(cls, z0):
        """Jet of the coordinate zbar seeded at the point z0."""
        return cls(Paracomplex._coerce(z0).conj(), dzb=ONE)

    @staticmethod
    def _coerce(x):
        if isinstance(x, Jet2):
            return x
        p = Paracomplex._coerce(x)
        return None if p is None else Jet2.const(p)

    # -- ring operations ------------------------------------------------

    def __add__(self, other):
        o = Jet2._coerce(other)
        if o is None:
            return NotImplemented
        return Jet2(
            self.v + o.v, self.dz + o.dz, self.dzb + o.dzb,
            self.dzz + o.dzz, self.dzzb + o.dzzb, self.dzbzb + o.dzbzb,
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = Jet2._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = Jet2._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __neg__(self):
        return Jet2(-self.v, -self.dz, -self.dzb, -self.dzz, -self.dzzb, -self.dzbzb)

    def __mul__(self, other):
        o = Jet2._coerce(other)
        if o is None:
            return NotImplemented
        f, g = self, o
        return Jet2(
            f.v * g.v,
            f.dz * g.v + f.v * g.dz,
            f.dzb * g.v + f.v * g.dzb,
            f.dzz * g.v + 2.0 * (f.dz * g.dz) + f.v * g.dzz,
            f.dzzb * g.v + f.dz * g.dzb + f.dzb * g.dz + f.v * g.dzzb,
            f.dzbzb * g.v + 2.0 * (f.dzb * g.dzb) + f.v * g.dzbzb,
        )

    __rmul__ = __mul__

    def inverse(self):
        iv = self.v.inverse()
        iv2 = iv * iv
        iv3 = iv2 * iv
        return Jet2(
            iv,
            -self.dz * iv2,
            -self.dzb * iv2,
            (2.0 * self.dz * self.dz - self.v * self.dzz) * iv3,
            (2.0 * self.dz * self.dzb - self.v * self.dzzb) * iv3,
            (2.0 * self.dzb * self.dzb - self.v * self.dzbzb) * iv3,
        )

    def __truediv__(self, other):
        o = Jet2._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = Jet2._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (self ** (-n)).inverse()
        result = Jet2.const(ONE)
        base = self
        k = n
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self):
        # conjugation swaps the z and zbar derivative slots:
        # d/dz conj(f) = conj(d/dzbar f)
        return Jet2(
            self.v.conj(),
            self.dzb.conj(),
            self.dz.conj(),
            self.dzbzb.conj(),
            self.dzzb.conj(),
            self.dzz.conj(),
        )

    # -- elementary functions -------------------------------------------

    def _lift(self, f0, f1, f2):
        """Chain rule for h = F(self), with F, F', F'' as paracomplex maps."""
        F = f0(self.v)
        dF = f1(self.v)
        ddF = f2(self.v)
        return Jet2(
            F,
            dF * self.dz,
            dF * self.dzb,
            ddF * (self.dz * self.dz) + dF * self.dzz,
            ddF * (self.dz * self.dzb) + dF * self.dzzb,
            ddF * (self.dzb * self.dzb) + dF * self.dzbzb,
        )

    def exp(self):
        return self._lift(pexp, pexp, pexp)

    def sinh(self):
        return self._lift(psinh, pcosh, psinh)

    def cosh(self):
        return self._lift(pcosh, psinh, pcosh)

    def __repr__(self):
        return (
            f"Jet2(v={self.v}, dz={self.dz}, dzb={self.dzb}, "
            f"dzz={self.dzz}, dzzb={self.dzzb}, dzbzb={self.dzbzb})"
        )
