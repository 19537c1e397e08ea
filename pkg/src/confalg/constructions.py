"""Builders for the stock conformal structures and the closure machinery.

A current structure is the differential one with the zero derivation, so a
single basis table serves every construction; what changes is which carrier
and derivation get installed.
"""

from fractions import Fraction

from .algebra import AlgebraError, Derivation, MatrixPolyAlgebra
from .conformal import CElement, ConformalAlgebra
from .rings import RatFunc


def make_current(base):
    """Pure current structure: b1~ (0) b2~ = (b1 b2)~, higher orders zero."""
    return ConformalAlgebra(base, Derivation.zero(base), "current")


def make_differential(base, der):
    """Structure with basis table b1~ (m) b2~ = (-1)^m (b1 delta^m(b2))~."""
    if der.alg != base:
        raise AlgebraError("derivation is not over the given algebra")
    return ConformalAlgebra(base, der, "differential")


def make_cend(n):
    """Conformal endomorphism structure of rank n over Q[x]: the carrier is
    n x n matrices over Q[x] with delta = d/dx."""
    base = MatrixPolyAlgebra(n)
    return ConformalAlgebra(base, Derivation.ddx(base), "cend")


def product_table(c, named_gens):
    """All pairwise n-products of named generators; only nonzero orders are
    listed. named_gens is a list of (name, element) pairs."""
    entries = []
    for name1, a in named_gens:
        for name2, b in named_gens:
            orders = c.nprod_all(a, b)
            entries.append(
                {
                    "left": name1,
                    "right": name2,
                    "orders": {str(n): v.to_map() for n, v in sorted(orders.items())},
                }
            )
    return entries


class SpanReducer:
    """Incremental echelon form over the fraction field Q(D), sparse rows
    keyed by base basis keys. Rank over Q(D) equals the free-module rank of
    the Q[D]-span, which is what the closure and growth profiles count."""

    def __init__(self):
        self.rows = []

    @property
    def rank(self):
        return len(self.rows)

    def _reduce(self, vec):
        for pivot, row in self.rows:
            c = vec.get(pivot)
            if c is None or not c:
                continue
            for k, v in row.items():
                cur = vec.get(k, RatFunc.const(0, "D"))
                cur = cur - c * v
                if cur:
                    vec[k] = cur
                else:
                    vec.pop(k, None)
        return vec

    def contains(self, elem):
        vec = {k: RatFunc(p) for k, p in elem.items.items()}
        return not self._reduce(vec)

    def add(self, elem):
        """Insert an element; True when it raised the rank."""
        vec = {k: RatFunc(p) for k, p in elem.items.items()}
        vec = self._reduce(vec)
        if not vec:
            return False
        pivot = min(vec)
        inv = vec[pivot]
        vec = {k: v / inv for k, v in vec.items()}
        self.rows.append((pivot, vec))
        self.rows.sort(key=lambda r: r[0])
        return True


class ClosureProfile:
    """Spanning elements and the per-round rank trace of a closure run."""

    def __init__(self, spanning, ranks, frontier_sizes, stabilized):
        self.spanning = spanning
        self.ranks = ranks
        self.frontier_sizes = frontier_sizes
        self.stabilized = stabilized

    def rank_after(self, r):
        return self.ranks[r - 1]


def generate_closure(c, gens, rounds=4):
    """Left-normed closure: round 1 keeps the generators, every later round
    multiplies the previous round's new elements by the generators at all
    nonzero orders. Candidates that do not raise the Q(D)-rank are dropped;
    the higher-bracketed products they would feed are then linear
    combinations of towers already kept, so the rank trace is unaffected."""
    if rounds < 1:
        raise AlgebraError("rounds must be >= 1")
    reducer = SpanReducer()
    spanning = []
    frontier = []
    for g in gens:
        if reducer.add(g):
            spanning.append(g)
            frontier.append(g)
    ranks = [reducer.rank]
    sizes = [len(frontier)]
    stabilized = None
    for r in range(2, rounds + 1):
        new = []
        for u in frontier:
            for g in gens:
                prods = c.nprod_all(u, g)
                for n in sorted(prods):
                    v = prods[n]
                    if reducer.add(v):
                        spanning.append(v)
                        new.append(v)
        frontier = new
        ranks.append(reducer.rank)
        sizes.append(len(new))
        if not new and stabilized is None:
            stabilized = r
    return ClosureProfile(spanning, ranks, sizes, stabilized)


def enumerate_towers(c, gens, length):
    """Every product of the generators with every bracketing, up to the given
    factor count, at all nonzero orders. Exponential; test-scale only."""
    by_len = {1: list(gens)}
    for l in range(2, length + 1):
        out = []
        for split in range(1, l):
            for u in by_len[split]:
                for v in by_len[l - split]:
                    for n, w in sorted(c.nprod_all(u, v).items()):
                        out.append(w)
        by_len[l] = out
    all_elems = []
    for l in range(1, length + 1):
        all_elems.extend(by_len[l])
    return all_elems


__all__ = [
    "make_current",
    "make_differential",
    "make_cend",
    "product_table",
    "SpanReducer",
    "ClosureProfile",
    "generate_closure",
    "enumerate_towers",
]
