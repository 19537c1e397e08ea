"""Conformal structures on free Q[D]-modules over a base-algebra basis.

Elements are finite sums of D-polynomial multiples of base basis symbols
(written b~). The whole family of n-products is generated from a basis-level
table by the two shift rules, so the table is the only modelling input:
here it is always (b1, b2, m) -> (-1)^m b1 * delta^m(b2) for a locally
nilpotent derivation delta, with delta = 0 giving the pure current case.
"""

import random
from fractions import Fraction
from math import comb

from .algebra import AlgebraError, Derivation, Element, nilpotency_index
from .rings import Poly, falling, frac


class ConformalError(AlgebraError):
    pass


class LocalityIndeterminate(ConformalError):
    """A locality scan hit its cap before certifying; structural_bound is the
    order below which the true value is known to sit."""

    def __init__(self, message, structural_bound):
        super().__init__(message)
        self.structural_bound = structural_bound


class ConformalAlgebra:
    """Carrier for the n-products; owns the basis table and its caches."""

    def __init__(self, base, derivation, tag):
        if derivation.alg != base:
            raise AlgebraError("derivation is not over the carrier algebra")
        self.base = base
        self.der = derivation
        self.tag = tag
        self._der_pow = {}
        self._table = {}
        self._nilp = {}

    def descriptor(self):
        return ("conformal", self.tag, self.base.descriptor(), self.der.descriptor())

    def __eq__(self, other):
        return isinstance(other, ConformalAlgebra) and self.descriptor() == other.descriptor()

    def __hash__(self):
        return hash(self.descriptor())

    def zero(self):
        return CElement(self, {})

    def tilde(self, elem):
        """Image of a base element under b -> b~."""
        if elem.alg != self.base:
            raise ConformalError("element is not in the carrier algebra")
        return CElement(self, {k: Poly.const(c, "D") for k, c in elem.items.items()})

    def element(self, items):
        return CElement(self, items)

    def from_map(self, mapping):
        items = {}
        for name, polymap in mapping.items():
            items[self.base.parse_key(name)] = Poly.from_map(polymap, "D")
        return CElement(self, items)

    def named_element(self, name):
        """Resolve a basis symbol name, or L<k> / L<k>_eij shorthand for the
        multiplication-operator generators x^k (times a matrix unit)."""
        if name.startswith("L") and len(name) > 1:
            body = name[1:]
            unit = None
            if "_" in body:
                body, unit = body.split("_", 1)
            if body.isdigit():
                k = int(body)
                if self.base.kind == "poly" and unit is None:
                    return self.tilde(self.base.basis_element(k))
                if self.base.kind == "matrix_poly":
                    if unit is None:
                        diag = {(k, i, i): Fraction(1) for i in range(1, self.base.n + 1)}
                        return self.tilde(Element(self.base, diag))
                    if len(unit) == 3 and unit[0] == "e" and unit[1:].isdigit():
                        i, j = int(unit[1]), int(unit[2])
                        if 1 <= i <= self.base.n and 1 <= j <= self.base.n:
                            return self.tilde(self.base.basis_element((k, i, j)))
            raise ConformalError("unknown generator name %r" % name)
        return self.tilde(self.base.basis_element(self.base.parse_key(name)))

    def _delta_pow(self, key, m):
        if m == 0:
            return self.base.basis_element(key)
        got = self._der_pow.get((key, m))
        if got is None:
            got = self.der.apply(self._delta_pow(key, m - 1))
            self._der_pow[(key, m)] = got
        return got

    def basis_nprod(self, k1, k2, m):
        """Order-m product of two basis symbols, as a key -> coefficient map."""
        got = self._table.get((k1, k2, m))
        if got is None:
            dm = self._delta_pow(k2, m)
            prod = self.base.basis_element(k1).mul(dm)
            sign = Fraction(-1 if m % 2 else 1)
            got = {k: sign * c for k, c in prod.items.items()}
            self._table[(k1, k2, m)] = got
        return got

    def nilp_key(self, key, cap=64):
        got = self._nilp.get(key)
        if got is None:
            got = nilpotency_index(self.der, self.base.basis_element(key), cap)
            self._nilp[key] = got
        return got

    def structural_bound(self, a, b):
        """Order above which a (n) b vanishes identically, or None when an
        argument is zero. Every term of the expanded product carries a basis
        order >= n - pdeg(a) - pdeg(b), and basis orders at or past the
        nilpotency index of delta on the right support are zero."""
        if a.is_zero() or b.is_zero():
            return None
        nil = max(self.nilp_key(k) for k in b.items)
        return a.pdeg() + b.pdeg() + nil - 1

    def nprod(self, a, b, n):
        if n < 0:
            raise ConformalError("product order must be >= 0")
        if a.conf != self or b.conf != self:
            raise ConformalError("arguments of a different conformal algebra")
        bound = self.structural_bound(a, b)
        if bound is None or n > bound:
            return self.zero()
        # (D^i u) (n) (D^j v) = (-1)^i ff(n,i) sum_s C(j,s) ff(n-i,s)
        #                        D^(j-s) [u (n-i-s) v]
        # with ff the falling factorial; each ff vanishes exactly when its
        # step count exceeds its argument, so orders never go negative.
        acc = {}
        for k1, p in a.items.items():
            for i in range(p.degree() + 1):
                pi = p.coeff(i)
                if not pi or i > n:
                    continue
                head = pi * falling(n, i) * (-1 if i % 2 else 1)
                if not head:
                    continue
                for k2, q in b.items.items():
                    for j in range(q.degree() + 1):
                        qj = q.coeff(j)
                        if not qj:
                            continue
                        for s in range(min(j, n - i) + 1):
                            c = head * qj * comb(j, s) * falling(n - i, s)
                            if not c:
                                continue
                            table = self.basis_nprod(k1, k2, n - i - s)
                            if not table:
                                continue
                            for bk, bc in table.items():
                                slot = acc.setdefault(bk, {})
                                pw = j - s
                                slot[pw] = slot.get(pw, Fraction(0)) + c * bc
        items = {}
        for bk, slot in acc.items():
            top = max(slot)
            coeffs = [slot.get(t, Fraction(0)) for t in range(top + 1)]
            items[bk] = Poly(coeffs, "D")
        return CElement(self, items)

    def nprod_all(self, a, b):
        """All nonzero orders of a (n) b, as a dict order -> element."""
        bound = self.structural_bound(a, b)
        out = {}
        if bound is None:
            return out
        for n in range(bound + 1):
            v = self.nprod(a, b, n)
            if not v.is_zero():
                out[n] = v
        return out


class CElement:
    """Finite sum of D-polynomial multiples of base basis symbols."""

    __slots__ = ("conf", "items")

    def __init__(self, conf, items):
        clean = {}
        for k, p in items.items():
            if not isinstance(p, Poly):
                p = Poly.const(frac(p), "D")
            elif p.var != "D" and not p.is_zero():
                raise ConformalError("coefficient polynomials must use the variable D")
            if not p.is_zero():
                clean[k] = p
        self.conf = conf
        self.items = dict(sorted(clean.items()))

    def is_zero(self):
        return not self.items

    def __eq__(self, other):
        if not isinstance(other, CElement):
            return NotImplemented
        return self.conf == other.conf and self.items == other.items

    def __hash__(self):
        return hash((self.conf.descriptor(), tuple(self.items.items())))

    def _compat(self, other):
        if self.conf != other.conf:
            raise ConformalError("elements of different conformal algebras")

    def add(self, other):
        self._compat(other)
        out = dict(self.items)
        for k, p in other.items.items():
            out[k] = out[k] + p if k in out else p
        return CElement(self.conf, out)

    def neg(self):
        return CElement(self.conf, {k: -p for k, p in self.items.items()})

    def sub(self, other):
        return self.add(other.neg())

    def scale(self, c):
        c = frac(c)
        return CElement(self.conf, {k: p.scale(c) for k, p in self.items.items()})

    def dapply(self, k=1):
        """Multiply by D^k."""
        return CElement(self.conf, {key: p.shift(k) for key, p in self.items.items()})

    def pmul(self, g):
        """Multiply by a polynomial in D."""
        if g.var != "D" and not g.is_zero():
            raise ConformalError("multiplier must be a polynomial in D")
        return CElement(self.conf, {key: p * g for key, p in self.items.items()})

    def pdeg(self):
        if not self.items:
            return -1
        return max(p.degree() for p in self.items.values())

    def coeff_of(self, key):
        return self.items.get(key, Poly.zero("D"))

    def to_map(self):
        return {self.conf.base.key_name(k): p.to_map() for k, p in self.items.items()}

    def __repr__(self):
        if not self.items:
            return "0"
        parts = []
        for k, p in self.items.items():
            name = self.conf.base.key_name(k)
            if any(ch in name for ch in "*^:"):
                name = "(%s)" % name
            name += "~"
            if p == Poly.one("D"):
                parts.append(name)
            else:
                parts.append("(%s)*%s" % (p.text(), name))
        return " + ".join(parts)


def structural_bound(c, a, b):
    return c.structural_bound(a, b)


def nprod(c, a, b, n):
    return c.nprod(a, b, n)


def locality_degree(c, a, b, cap=None):
    """Largest order with a nonzero product, or "none" when all orders vanish.

    The scan starts at the structural bound, so the result is always exact;
    a cap only limits what the caller is willing to accept, and a true value
    above it raises LocalityIndeterminate."""
    bound = c.structural_bound(a, b)
    if bound is None:
        return "none"
    for n in range(bound, -1, -1):
        if not c.nprod(a, b, n).is_zero():
            if cap is not None and n > cap:
                raise LocalityIndeterminate(
                    "locality exceeds cap %d (structural bound %d)" % (cap, bound),
                    bound,
                )
            return n
    return "none"


def sample_celement(c, rng, degree, pdeg=2, terms=3, coeff_bound=5):
    keys = c.base.basis_upto(degree)
    picked = rng.sample(keys, min(rng.randint(1, terms), len(keys)))
    items = {}
    for k in picked:
        coeffs = [Fraction(rng.randint(-coeff_bound, coeff_bound)) for _ in range(pdeg + 1)]
        items[k] = Poly(coeffs, "D")
    return CElement(c, items)


def check_axioms(c, samples=200, seed=0, degree=4, pdeg=2, product=None):
    """Randomized check of the two shift rules on sampled element pairs.

    product may override the n-product under test; the default is the
    algebra's own. Returns a report dict; ok is False with a witness when a
    violation is found."""
    if product is None:
        product = c.nprod
    rng = random.Random(seed)
    report = {
        "ok": True,
        "samples": samples,
        "seed": seed,
        "degree": degree,
        "checked": ["leibniz", "shift"],
        "violation": None,
    }
    for _ in range(samples):
        a = sample_celement(c, rng, degree, pdeg)
        b = sample_celement(c, rng, degree, pdeg)
        bound = c.structural_bound(a, b)
        top = 1 if bound is None else bound + 1
        n = rng.randint(0, max(top, 1))
        lhs = product(a, b, n).dapply()
        rhs = product(a.dapply(), b, n).add(product(a, b.dapply(), n))
        if lhs != rhs:
            report["ok"] = False
            report["violation"] = {
                "axiom": "leibniz",
                "order": n,
                "a": a.to_map(),
                "b": b.to_map(),
            }
            return report
        lhs = product(a.dapply(), b, n)
        rhs = c.zero() if n == 0 else product(a, b, n - 1).scale(-n)
        if lhs != rhs:
            report["ok"] = False
            report["violation"] = {
                "axiom": "shift",
                "order": n,
                "a": a.to_map(),
                "b": b.to_map(),
            }
            return report
    return report


def coeff_matrix(elems):
    """Common-support coefficient matrix of conformal elements; rows are
    D-polynomial vectors, one per element."""
    keys = sorted(set().union(*[set(e.items) for e in elems])) if elems else []
    rows = []
    for e in elems:
        rows.append([e.items.get(k, Poly.zero("D")) for k in keys])
    return keys, rows


__all__ = [
    "ConformalError",
    "LocalityIndeterminate",
    "ConformalAlgebra",
    "CElement",
    "structural_bound",
    "nprod",
    "locality_degree",
    "sample_celement",
    "check_axioms",
    "coeff_matrix",
]
