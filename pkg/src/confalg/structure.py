"""Structural operations: conformal identities, untwisting inner-derivation
structures to pure currents, currentness certificates, the dual identity on
component slices, ideal transfer in both directions, and nilpotency indices.
"""

from fractions import Fraction

from .algebra import AlgebraError, Element, element_nilpotency_index
from .conformal import CElement, coeff_matrix
from .constructions import SpanReducer, make_current, product_table
from .linalg import bareiss_rank, pol_constant_intersection, rref, solve_right
from .rings import Poly, inv_factorial


class StructureError(AlgebraError):
    pass


def component_slices(a):
    """D-power slices of a conformal element, as base elements: the map
    k -> a_k with a = sum_k D^k (a_k)~."""
    base = a.conf.base
    out = {}
    for key, p in a.items.items():
        for i in range(p.degree() + 1):
            c = p.coeff(i)
            if c:
                out.setdefault(i, {})[key] = c
    return {i: Element(base, m) for i, m in sorted(out.items())}


def slices_rebuild(c, comps):
    out = c.zero()
    for k, a_k in comps.items():
        out = out.add(c.tilde(a_k).dapply(k))
    return out


def extract_current_components(c, a):
    """Recover the slices through products against the canonical identity:
    a (n) 1~ = (-1)^n n! (a_n)~. Only the image of the base identity works
    here, so the carrier must be unital."""
    if not c.base.is_unital():
        raise StructureError("component extraction needs a unital carrier")
    e = c.tilde(c.base.one())
    out = {}
    fact = Fraction(1)
    for n in range(a.pdeg() + 1):
        if n:
            fact *= n
        v = c.nprod(a, e, n)
        if v.is_zero():
            continue
        sign = Fraction(-1 if n % 2 else 1) / fact
        items = {}
        for key, p in v.items.items():
            if p.degree() > 0:
                raise StructureError("non-constant residue in component extraction")
            items[key] = p.coeff(0) * sign
        out[n] = Element(c.base, items)
    return out


class IdentityCandidate:
    """A would-be conformal identity plus its certification state."""

    __slots__ = ("element", "certified", "report")

    def __init__(self, element, certified, report=None):
        self.element = element
        self.certified = certified
        self.report = report or {}


def is_conformal_identity(c, e, degree=4):
    """Certify e: order-0 left action fixes every basis symbol up to the
    degree window, and all self-products of order >= 1 vanish. The order-0
    rule extends over D-multiples exactly, so basis symbols suffice."""
    failures = []
    for key in c.base.basis_upto(degree):
        v = c.tilde(c.base.basis_element(key))
        if c.nprod(e, v, 0) != v:
            failures.append({"check": "left_identity", "basis": c.base.key_name(key)})
    bound = c.structural_bound(e, e)
    if bound is not None:
        for n in range(1, bound + 1):
            if not c.nprod(e, e, n).is_zero():
                failures.append({"check": "self_product", "order": n})
    report = {"ok": not failures, "degree": degree, "failures": failures}
    return IdentityCandidate(e, report["ok"], report)


class UntwistResult:
    __slots__ = (
        "e_prime",
        "e_internal",
        "images",
        "table",
        "pure",
        "roundtrip_exact",
        "nilpotency",
    )

    def __init__(self, e_prime, e_internal, images, table, pure, roundtrip_exact, nilpotency):
        self.e_prime = e_prime
        self.e_internal = e_internal
        self.images = images
        self.table = table
        self.pure = pure
        self.roundtrip_exact = roundtrip_exact
        self.nilpotency = nilpotency


def untwist(c, degree=2, nilp_cap=16):
    """Rewrite a structure twisted by an inner derivation ad(r), r nilpotent,
    as pure currents: b~ maps to b~ (0) e_int with the alternating-sign
    series e_int = sum (-1)^k/k! D^k (r^k)~, and the returned identity
    candidate is the plain-sign series e' = sum 1/k! D^k (r^k)~.

    The image products are checked to be genuinely current (order 0 equal to
    the image of the base product, higher orders zero). The double action of
    e' on r~ reproduces r~ exactly when r^2 = 0; for higher nilpotency the
    defect is reported, not raised."""
    if c.der.kind != "ad":
        raise StructureError("untwist needs an inner derivation")
    if not c.base.is_unital():
        raise StructureError("untwist needs a unital carrier")
    r = c.der.r
    m = element_nilpotency_index(r, nilp_cap)
    one = c.base.one()

    def series(sign):
        out = c.zero()
        power = one
        for k in range(m):
            coef = inv_factorial(k) * (sign**k)
            out = out.add(c.tilde(power.scale(coef)).dapply(k))
            power = power.mul(r)
        return out

    e_prime = series(1)
    e_int = series(-1)

    def image(b):
        return c.nprod(c.tilde(b), e_int, 0)

    keys = c.base.basis_upto(degree)
    names = [c.base.key_name(k) for k in keys]
    images = {}
    for key, name in zip(keys, names):
        images[name] = image(c.base.basis_element(key))

    pure = True
    for key1, name1 in zip(keys, names):
        for key2, name2 in zip(keys, names):
            prods = c.nprod_all(images[name1], images[name2])
            expected = image(c.base.basis_element(key1).mul(c.base.basis_element(key2)))
            if set(prods) - {0}:
                pure = False
            if prods.get(0, c.zero()) != expected:
                pure = False

    cert = is_conformal_identity(c, e_prime, degree)
    rt = c.nprod(c.nprod(c.tilde(r), e_prime, 0), e_prime, 0)
    roundtrip_exact = rt == c.tilde(r)
    if m <= 2 and not roundtrip_exact:
        raise StructureError("double identity action failed on a square-zero twist")

    table = product_table(c, [(n, images[n]) for n in names])
    return UntwistResult(cert, e_int, images, table, pure, roundtrip_exact, m)


def dual_identity_consistency(c, e, b=None):
    """Check a candidate identity against its component-side dual: reading
    the same coefficients in the pure current structure, the order-1
    self-product must vanish, which pins the slice recursion
    (k+1) e_{k+1} = e_1 e_k. With a companion element b (slices
    b_i = b_0 e_1^i / i!) the constant slice of the order-1 action on b is
    the commutator -[e_1, b_0]."""
    if isinstance(e, IdentityCandidate):
        certified = e.certified
        e = e.element
    else:
        certified = is_conformal_identity(c, e).certified
    base = c.base
    cur = make_current(base)
    comps = component_slices(e)
    e0 = comps.get(0, base.zero())
    e1 = comps.get(1, base.zero())
    top = max(comps) if comps else 0

    recursion_failures = []
    for k in range(top + 1):
        lhs = comps.get(k + 1, base.zero()).scale(k + 1)
        rhs = e1.mul(comps.get(k, base.zero()))
        if lhs != rhs:
            recursion_failures.append(k)

    ebar = CElement(cur, dict(e.items))
    dual = cur.nprod(ebar, ebar, 1)
    dual_zero = dual.is_zero()

    report = {
        "certified": certified,
        "constant_slice_is_one": base.is_unital() and e0 == base.one(),
        "dual_order1_zero": dual_zero,
        "recursion_failures": recursion_failures,
        "consistent": dual_zero and not recursion_failures,
    }

    if b is not None:
        bcomps = component_slices(b)
        b0 = bcomps.get(0, base.zero())
        companion = True
        power = b0
        for i in range(1, (max(bcomps) if bcomps else 0) + 1):
            power = power.mul(e1)
            if bcomps.get(i, base.zero()) != power.scale(inv_factorial(i)):
                companion = False
                break
        bbar = CElement(cur, dict(b.items))
        act = cur.nprod(ebar, bbar, 1)
        d0 = component_slices(act).get(0, base.zero())
        expected = b0.mul(e1).sub(e1.mul(b0))
        report["companion"] = companion
        report["action_d0"] = d0.to_map()
        report["expected_d0"] = expected.to_map()
        report["action_consistent"] = d0 == expected
        report["consistent"] = report["consistent"] and (not companion or d0 == expected)
    return report


class CurrentnessVerdict:
    __slots__ = ("degree", "current", "witness")

    def __init__(self, degree, current, witness):
        self.degree = degree
        self.current = current
        self.witness = witness


def is_current(sub, a, degree):
    """Decide whether a acts on the degree slice of the subalgebra like one
    of its own elements: solve sum_s c_s [v_s, u] = [a, u] over all spanning
    u. The witness is the canonical particular solution (free unknowns
    zero), so reruns are reproducible."""
    if a.alg != sub.parent:
        raise StructureError("element must live in the parent algebra")
    vs = sub.span_upto(degree)
    if not vs:
        return CurrentnessVerdict(degree, False, None)
    rows = []
    rhs = []
    for u in vs:
        comms = [v.mul(u).sub(u.mul(v)) for v in vs]
        target = a.mul(u).sub(u.mul(a))
        keys = sorted(set().union(set(target.items), *[set(w.items) for w in comms]))
        for key in keys:
            rows.append([w.items.get(key, Fraction(0)) for w in comms])
            rhs.append(target.items.get(key, Fraction(0)))
    sol = solve_right(rows, rhs, Fraction(0), Fraction(1))
    if sol is None:
        return CurrentnessVerdict(degree, False, None)
    witness = sub.parent.zero()
    for cs, v in zip(sol, vs):
        witness = witness.add(v.scale(cs))
    return CurrentnessVerdict(degree, True, witness)


def _echelon_elements(alg, elems):
    """Canonical Q-spanning list for a set of base elements."""
    live = [e for e in elems if not e.is_zero()]
    if not live:
        return []
    keys = sorted(set().union(*[set(e.items) for e in live]))
    rows = [[e.items.get(k, Fraction(0)) for k in keys] for e in live]
    red, pivots = rref(rows, Fraction(0))
    out = []
    for i in range(len(pivots)):
        items = {k: red[i][j] for j, k in enumerate(keys) if red[i][j]}
        out.append(Element(alg, items))
    return out


class IdealPair:
    """A base-ideal degree slice together with its conformal counterpart."""

    __slots__ = ("base_span", "conf_span", "degree", "delta_stable", "two_sided")

    def __init__(self, base_span, conf_span, degree, delta_stable, two_sided):
        self.base_span = base_span
        self.conf_span = conf_span
        self.degree = degree
        self.delta_stable = delta_stable
        self.two_sided = two_sided


def ideal_lift(c, gens, degree=4, within=None):
    """Two-sided ideal slice generated in the carrier (or in a subalgebra
    view of it), lifted to the module: span of b1 g b2 up to the degree
    window, its symbols as conformal spanning set. Also reports whether the
    slice is stable under delta; only a stable slice generates a conformal
    ideal."""
    base = c.base
    for g in gens:
        if g.alg != base:
            raise StructureError("ideal generator outside the carrier")
    if within is None:
        basis = [base.basis_element(k) for k in base.basis_upto(degree)]
    else:
        if within.parent != base:
            raise StructureError("subalgebra view over a different carrier")
        for g in gens:
            if not within.member(g, degree):
                raise StructureError("ideal generator outside the subalgebra")
        basis = within.span_upto(degree)
    raw = list(gens)
    for g in gens:
        for b1 in basis:
            left = b1.mul(g)
            raw.append(left)
            raw.append(g.mul(b1))
            for b2 in basis:
                p = left.mul(b2)
                if p.degree() <= degree:
                    raw.append(p)
    raw = [p for p in raw if p.degree() <= degree]
    span = _echelon_elements(base, raw)

    def member(v):
        if v.is_zero():
            return True
        keys = sorted(set().union(set(v.items), *[set(w.items) for w in span]))
        rows = [[w.items.get(k, Fraction(0)) for k in keys] for w in span]
        target = [v.items.get(k, Fraction(0)) for k in keys]
        return solve_right(rows, target, Fraction(0), Fraction(1)) is not None

    delta_stable = all(member(c.der.apply(u)) for u in span)
    two_sided = True
    for u in span:
        for b in basis:
            for p in (b.mul(u), u.mul(b)):
                if p.degree() <= degree and not member(p):
                    two_sided = False
    conf_span = [c.tilde(u) for u in span]
    return IdealPair(span, conf_span, degree, delta_stable, two_sided)


def ideal_restrict(c, celems):
    """Constant part of the module span: all base elements b with b~ in the
    Q[D]-span of the given conformal elements."""
    live = [e for e in celems if not e.is_zero()]
    if not live:
        return []
    keys, rows = coeff_matrix(live)
    consts = pol_constant_intersection(rows)
    out = []
    for vec in consts:
        items = {k: vec[j] for j, k in enumerate(keys) if vec[j]}
        out.append(Element(c.base, items))
    return _echelon_elements(c.base, out)


def nilpotency_check(c, gens, degree=4, cap=8, within=None):
    """Nilpotency index of the ideal slice on both sides of the transfer.
    Carrier side: S_{k+1} = S_k S_1. Module side: T_{k+1} spanned by the
    left-normed products of T_k spanning elements with T_1 at every nonzero
    order. The two indices must agree for the lift to be faithful."""
    pair = ideal_lift(c, gens, degree, within=within)
    s1 = pair.base_span

    base_index = None
    level = s1
    for k in range(2, cap + 2):
        nxt = [u.mul(v) for u in level for v in s1]
        level = _echelon_elements(c.base, nxt)
        if not level:
            base_index = k
            break
    if base_index is None:
        raise StructureError("carrier ideal slice not nilpotent within cap %d" % cap)

    t1 = pair.conf_span
    conf_index = None
    level = t1
    for k in range(2, cap + 2):
        nxt = []
        reducer = SpanReducer()
        for u in level:
            for v in t1:
                for n, w in sorted(c.nprod_all(u, v).items()):
                    if reducer.add(w):
                        nxt.append(w)
        level = nxt
        if not level:
            conf_index = k
            break
    if conf_index is None:
        raise StructureError("module ideal slice not nilpotent within cap %d" % cap)

    return {
        "degree": degree,
        "delta_stable": pair.delta_stable,
        "base_index": base_index,
        "conformal_index": conf_index,
        "agree": base_index == conf_index,
    }


def unital_split(c, e, degree=4):
    """Split the degree window under the order-0 action of e: the action is
    idempotent when e (0) e = e, so the window is image plus kernel; ranks
    are reported over the fraction field of Q[D]."""
    if isinstance(e, IdentityCandidate):
        cert = e
        e = cert.element
    else:
        cert = is_conformal_identity(c, e, degree)
    keys = c.base.basis_upto(degree)
    images = [c.nprod(e, c.tilde(c.base.basis_element(k)), 0) for k in keys]
    live = [v for v in images if not v.is_zero()]
    image_rank = 0
    if live:
        _, rows = coeff_matrix(live)
        image_rank = bareiss_rank(rows)
    module_rank = len(keys)
    return {
        "degree": degree,
        "identity_certified": cert.certified,
        "module_rank": module_rank,
        "image_rank": image_rank,
        "kernel_rank": module_rank - image_rank,
    }


__all__ = [
    "StructureError",
    "component_slices",
    "slices_rebuild",
    "extract_current_components",
    "IdentityCandidate",
    "is_conformal_identity",
    "UntwistResult",
    "untwist",
    "dual_identity_consistency",
    "CurrentnessVerdict",
    "is_current",
    "IdealPair",
    "ideal_lift",
    "ideal_restrict",
    "nilpotency_check",
    "unital_split",
]
