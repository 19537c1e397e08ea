"""Exact univariate polynomial arithmetic over the rationals."""

from fractions import Fraction
from math import comb, factorial


def frac(v):
    """Coerce to an exact rational. Floats are refused on purpose."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError("not an exact rational: %r" % (v,))


def falling(n, k):
    """Falling factorial n(n-1)...(n-k+1); zero whenever 0 <= n < k."""
    out = 1
    for i in range(k):
        out *= n - i
    return out


def inv_factorial(k):
    return Fraction(1, factorial(k))


class Poly:
    """Dense polynomial with Fraction coefficients and a variable tag.

    Coefficients are indexed by degree with no trailing zeros; the zero
    polynomial has an empty coefficient tuple.
    """

    __slots__ = ("var", "coeffs")

    def __init__(self, coeffs, var="x"):
        cs = [frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.var = var

    @classmethod
    def zero(cls, var="x"):
        return cls((), var)

    @classmethod
    def one(cls, var="x"):
        return cls((1,), var)

    @classmethod
    def const(cls, c, var="x"):
        return cls((frac(c),), var)

    @classmethod
    def gen(cls, var="x"):
        return cls((0, 1), var)

    @classmethod
    def monomial(cls, c, k, var="x"):
        return cls((0,) * k + (frac(c),), var)

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def degree(self):
        # degree of the zero polynomial is -1 by convention
        return len(self.coeffs) - 1

    def coeff(self, k):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def leading(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def _join_var(self, other):
        if self.coeffs and other.coeffs and self.var != other.var:
            raise ValueError("mixed variables %r and %r" % (self.var, other.var))
        return self.var if self.coeffs else other.var

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        if not self.coeffs and not other.coeffs:
            return True
        return self.var == other.var and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.var if self.coeffs else "", self.coeffs))

    def __add__(self, other):
        var = self._join_var(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self.coeff(i) + other.coeff(i) for i in range(n)], var)

    def __sub__(self, other):
        var = self._join_var(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self.coeff(i) - other.coeff(i) for i in range(n)], var)

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.var)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        var = self._join_var(other)
        if not self.coeffs or not other.coeffs:
            return Poly.zero(var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] += a * b
        return Poly(out, var)

    __rmul__ = __mul__

    def scale(self, c):
        c = frac(c)
        if c == 0:
            return Poly.zero(self.var)
        return Poly([a * c for a in self.coeffs], self.var)

    def shift(self, k):
        """Multiply by var^k."""
        if not self.coeffs:
            return self
        return Poly((0,) * k + self.coeffs, self.var)

    def deriv(self):
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:], self.var)

    def __call__(self, value):
        out = Fraction(0)
        for c in reversed(self.coeffs):
            out = out * value + c
        return out

    def __divmod__(self, other):
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        var = self._join_var(other)
        rem = list(self.coeffs)
        dq = len(self.coeffs) - len(other.coeffs)
        if dq < 0:
            return Poly.zero(var), self
        q = [Fraction(0)] * (dq + 1)
        lead = other.leading()
        for k in range(dq, -1, -1):
            top = rem[k + other.degree()]
            if top == 0:
                continue
            f = top / lead
            q[k] = f
            for j, b in enumerate(other.coeffs):
                rem[k + j] -= f * b
        return Poly(q, var), Poly(rem, var)

    def exact_div(self, other):
        q, r = divmod(self, other)
        if r.coeffs:
            raise ValueError("inexact polynomial division")
        return q

    def monic(self):
        if not self.coeffs:
            return self
        return self.scale(1 / self.leading())

    @staticmethod
    def gcd(a, b):
        while b.coeffs:
            a, b = b, divmod(a, b)[1]
        return a.monic()

    def to_map(self):
        """JSON form: degree (as string) -> rational string, zeros omitted."""
        return {str(i): str(c) for i, c in enumerate(self.coeffs) if c}

    @classmethod
    def from_map(cls, m, var="x"):
        if not m:
            return cls.zero(var)
        top = max(int(k) for k in m)
        cs = [Fraction(0)] * (top + 1)
        for k, v in m.items():
            cs[int(k)] = frac(v)
        return cls(cs, var)

    def text(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            if i == 0:
                term = str(c)
            else:
                v = self.var if i == 1 else "%s^%d" % (self.var, i)
                term = v if c == 1 else ("-" + v if c == -1 else "%s*%s" % (c, v))
            parts.append(term)
        out = parts[0]
        for term in parts[1:]:
            out += " - " + term[1:] if term.startswith("-") else " + " + term
        return out

    def __repr__(self):
        return "Poly(%s)" % self.text()


class RatFunc:
    """Rational function num/den over one variable; den is monic and nonzero."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if den is None:
            den = Poly.one(num.var)
        if not den.coeffs:
            raise ZeroDivisionError("zero denominator")
        if num.coeffs:
            g = Poly.gcd(num, den)
            if g.degree() > 0:
                num = num.exact_div(g)
                den = den.exact_div(g)
            lead = den.leading()
            if lead != 1:
                num = num.scale(1 / lead)
                den = den.scale(1 / lead)
        else:
            den = Poly.one(den.var)
        self.num = num
        self.den = den

    @classmethod
    def const(cls, c, var="x"):
        return cls(Poly.const(c, var))

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other):
        return RatFunc(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __mul__(self, other):
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        if not other.num.coeffs:
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __repr__(self):
        if self.den == Poly.one(self.den.var):
            return "RatFunc(%s)" % self.num.text()
        return "RatFunc((%s)/(%s))" % (self.num.text(), self.den.text())


__all__ = ["frac", "falling", "inv_factorial", "comb", "Poly", "RatFunc"]
