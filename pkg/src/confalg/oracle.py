"""Independent verification route through formal distributions.

A conformal element maps to the family f(n) = sum_i c_i (-1)^i ff(n,i) b t^(n-i)
of twisted-Laurent-ring values, stored on a finite symmetric window. The
order-m product of two such families is computed by a residue-style sum in
the ring itself, never through the closed-form n-product, so agreement of
the two routes is evidence for both.
"""

import random
from fractions import Fraction
from math import comb

from .algebra import AlgebraError, OreElement, ore_mul
from .conformal import sample_celement
from .rings import falling


class OracleError(AlgebraError):
    pass


class Distribution:
    """Window of ring values n -> f(n), with zero values stored sparsely."""

    __slots__ = ("base", "der", "lo", "hi", "vals")

    def __init__(self, base, der, lo, hi, vals):
        if lo > hi:
            raise OracleError("empty window")
        self.base = base
        self.der = der
        self.lo = lo
        self.hi = hi
        self.vals = {n: v for n, v in vals.items() if not v.is_zero()}

    def value(self, n):
        if not self.lo <= n <= self.hi:
            raise OracleError("index %d outside window [%d, %d]" % (n, self.lo, self.hi))
        got = self.vals.get(n)
        if got is None:
            got = OreElement(self.base, self.der, {})
        return got

    def restrict(self, lo, hi):
        lo = max(lo, self.lo)
        hi = min(hi, self.hi)
        return Distribution(
            self.base, self.der, lo, hi, {n: v for n, v in self.vals.items() if lo <= n <= hi}
        )

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return (
            self.lo == other.lo
            and self.hi == other.hi
            and self.vals == other.vals
        )

    def first_difference(self, other):
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        for n in range(lo, hi + 1):
            if self.value(n) != other.value(n):
                return n
        return None


def to_distribution(a, window):
    """Distribution of a conformal element on [-window, window]:
    (D^i b)~ goes to n -> (-1)^i ff(n,i) b t^(n-i)."""
    if window < 0:
        raise OracleError("window must be >= 0")
    base = a.conf.base
    der = a.conf.der
    vals = {}
    for n in range(-window, window + 1):
        items = {}
        for k, p in a.items.items():
            b = base.basis_element(k)
            for i in range(p.degree() + 1):
                ci = p.coeff(i)
                if not ci:
                    continue
                c = ci * falling(n, i) * (-1 if i % 2 else 1)
                if not c:
                    continue
                pw = n - i
                term = b.scale(c)
                items[pw] = items[pw].add(term) if pw in items else term
        vals[n] = OreElement(base, der, items)
    return Distribution(base, der, -window, window, vals)


def dist_nprod(f, g, m, cache=None):
    """Order-m product of distributions by the ring-side residue sum
    (f m g)(n) = sum_j C(m,j) (-1)^j f(m-j) g(n+j); needs f on [0, m] and
    returns the window [g.lo, g.hi - m]."""
    if m < 0:
        raise OracleError("product order must be >= 0")
    if f.lo > 0 or f.hi < m:
        raise OracleError("left window [%d, %d] does not cover [0, %d]" % (f.lo, f.hi, m))
    if cache is None:
        cache = {}

    def pr(i, j):
        got = cache.get((i, j))
        if got is None:
            got = ore_mul(f.value(i), g.value(j))
            cache[(i, j)] = got
        return got

    from .algebra import Element

    vals = {}
    for n in range(g.lo, g.hi - m + 1):
        acc = {}
        for j in range(m + 1):
            term = pr(m - j, n + j)
            if term.is_zero():
                continue
            c = Fraction(comb(m, j) * (-1 if j % 2 else 1))
            for p, el in term.items.items():
                slot = acc.setdefault(p, {})
                for k, v in el.items.items():
                    cur = slot.get(k)
                    slot[k] = c * v if cur is None else cur + c * v
        vals[n] = OreElement(
            f.base, f.der, {p: Element(f.base, s) for p, s in acc.items()}
        )
    return Distribution(f.base, f.der, g.lo, g.hi - m, vals)


def oracle_check(c, samples=100, seed=0, window=8, degree=4, pdeg=2):
    """Randomized two-route agreement check: for sampled pairs and every
    order up to one past the structural bound, the distribution of the
    closed-form product must match the ring-side residue product on the
    whole valid window."""
    rng = random.Random(seed)
    report = {
        "ok": True,
        "samples": samples,
        "seed": seed,
        "window": window,
        "degree": degree,
        "orders_checked": 0,
        "violation": None,
    }
    for _ in range(samples):
        a = sample_celement(c, rng, degree, pdeg)
        b = sample_celement(c, rng, degree, pdeg)
        f = to_distribution(a, window)
        g = to_distribution(b, window)
        bound = c.structural_bound(a, b)
        top = min((0 if bound is None else bound + 1), window)
        cache = {}
        for m in range(top + 1):
            lhs = to_distribution(c.nprod(a, b, m), window).restrict(g.lo, g.hi - m)
            rhs = dist_nprod(f, g, m, cache)
            n = lhs.first_difference(rhs)
            report["orders_checked"] += 1
            if n is not None:
                report["ok"] = False
                report["violation"] = {
                    "order": m,
                    "index": n,
                    "a": a.to_map(),
                    "b": b.to_map(),
                    "closed_form": lhs.value(n).to_map(),
                    "residue": rhs.value(n).to_map(),
                }
                return report
    return report


def sample_ore(base, der, rng, degree=3, power=2, terms=2, coeff_bound=5, cls=OreElement):
    items = {}
    for _ in range(rng.randint(1, terms)):
        p = rng.randint(-power, power)
        keys = base.basis_upto(degree)
        picked = rng.sample(keys, min(rng.randint(1, 2), len(keys)))
        el = base.element({k: Fraction(rng.randint(-coeff_bound, coeff_bound)) for k in picked})
        items[p] = items[p].add(el) if p in items else el
    return cls(base, der, items)


def coeff_assoc_check(base, der, samples=100, seed=0, degree=3, power=2, mul=None, cls=OreElement):
    """Randomized associativity check for the twisted Laurent ring, mixing
    positive and negative powers of t. mul may override the product."""
    if mul is None:
        mul = ore_mul
    rng = random.Random(seed)
    report = {
        "ok": True,
        "samples": samples,
        "seed": seed,
        "degree": degree,
        "power": power,
        "violation": None,
    }
    for _ in range(samples):
        x = sample_ore(base, der, rng, degree, power, cls=cls)
        y = sample_ore(base, der, rng, degree, power, cls=cls)
        z = sample_ore(base, der, rng, degree, power, cls=cls)
        lhs = mul(mul(x, y), z)
        rhs = mul(x, mul(y, z))
        if lhs != rhs:
            report["ok"] = False
            report["violation"] = {
                "x": x.to_map(),
                "y": y.to_map(),
                "z": z.to_map(),
                "left_assoc": lhs.to_map(),
                "right_assoc": rhs.to_map(),
            }
            return report
    return report


__all__ = [
    "OracleError",
    "Distribution",
    "to_distribution",
    "dist_nprod",
    "oracle_check",
    "sample_ore",
    "coeff_assoc_check",
]
