import random
from fractions import Fraction

import pytest

from confalg.algebra import Derivation, MatrixAlgebra, MatrixPolyAlgebra
from confalg.conformal import (
    CElement,
    ConformalAlgebra,
    ConformalError,
    LocalityIndeterminate,
    check_axioms,
    coeff_matrix,
    locality_degree,
    sample_celement,
)
from confalg.constructions import make_cend, make_current, make_differential


def cur_m2():
    return make_current(MatrixAlgebra(2))


def dif_m2():
    base = MatrixPolyAlgebra(2)
    return make_differential(base, Derivation.ddx(base))


STRUCTURES = [cur_m2, dif_m2, lambda: make_cend(1)]


def _ref_term(c, k1, i, k2, j, n):
    """Single-term product computed by peeling D-powers with the two shift
    rules, one at a time. Independent of the closed-form expansion."""
    if n < 0:
        return c.zero()
    if i > 0:
        if n == 0:
            return c.zero()
        return _ref_term(c, k1, i - 1, k2, j, n - 1).scale(Fraction(-n))
    if j > 0:
        head = _ref_term(c, k1, 0, k2, j - 1, n).dapply()
        if n == 0:
            return head
        return head.add(_ref_term(c, k1, 0, k2, j - 1, n - 1).scale(Fraction(n)))
    return CElement(c, dict(c.basis_nprod(k1, k2, n)))


def reference_nprod(c, a, b, n):
    out = c.zero()
    for k1, p in a.items.items():
        for i in range(p.degree() + 1):
            ci = p.coeff(i)
            if not ci:
                continue
            for k2, q in b.items.items():
                for j in range(q.degree() + 1):
                    cj = q.coeff(j)
                    if not cj:
                        continue
                    out = out.add(_ref_term(c, k1, i, k2, j, n).scale(ci * cj))
    return out


@pytest.mark.parametrize("make", STRUCTURES)
def test_closed_form_matches_recursive_reference(make):
    c = make()
    rng = random.Random(42)
    for _ in range(40):
        a = sample_celement(c, rng, degree=3, pdeg=2)
        b = sample_celement(c, rng, degree=3, pdeg=2)
        bound = c.structural_bound(a, b)
        if bound is None:
            continue
        for n in range(bound + 2):
            assert c.nprod(a, b, n) == reference_nprod(c, a, b, n)


@pytest.mark.parametrize("make", STRUCTURES)
def test_axioms_hold(make):
    report = check_axioms(make(), samples=120, seed=5)
    assert report["ok"]
    assert report["violation"] is None


def test_axiom_check_catches_a_flipped_order():
    c = cur_m2()

    def flip1(a, b, n):
        v = c.nprod(a, b, n)
        return v.neg() if n == 1 else v

    report = check_axioms(c, samples=200, seed=0, product=flip1)
    assert not report["ok"]
    assert report["violation"]["axiom"] in ("leibniz", "shift")


def test_products_vanish_above_the_structural_bound():
    c = dif_m2()
    rng = random.Random(9)
    for _ in range(20):
        a = sample_celement(c, rng, degree=3, pdeg=2)
        b = sample_celement(c, rng, degree=3, pdeg=2)
        bound = c.structural_bound(a, b)
        if bound is None:
            continue
        assert c.nprod(a, b, bound + 1).is_zero()
        assert c.nprod(a, b, bound + 3).is_zero()


def test_structural_bound_none_on_zero():
    c = cur_m2()
    assert c.structural_bound(c.zero(), c.zero()) is None
    assert locality_degree(c, c.zero(), c.zero()) == "none"


def test_current_structure_has_locality_zero_or_none():
    c = cur_m2()
    e12 = c.tilde(c.base.parse_element({"e12": "1"}))
    e21 = c.tilde(c.base.parse_element({"e21": "1"}))
    assert locality_degree(c, e12, e21) == 0
    # e12 * e12 = 0 in the base, and all higher orders vanish too
    assert locality_degree(c, e12, e12) == "none"


def test_locality_grows_with_d_powers():
    c = cur_m2()
    e12 = c.tilde(c.base.parse_element({"e12": "1"}))
    e21 = c.tilde(c.base.parse_element({"e21": "1"}))
    assert locality_degree(c, e12.dapply(2), e21.dapply(1)) == 3


def test_locality_cap_raises_with_the_bound_attached():
    c = cur_m2()
    e12 = c.tilde(c.base.parse_element({"e12": "1"}))
    e21 = c.tilde(c.base.parse_element({"e21": "1"}))
    a = e12.dapply(2)
    with pytest.raises(LocalityIndeterminate) as exc:
        locality_degree(c, a, e21, cap=1)
    assert exc.value.structural_bound >= 2
    # a cap at or above the true degree is fine
    assert locality_degree(c, a, e21, cap=2) == 2


def test_negative_order_is_rejected():
    c = cur_m2()
    one = c.tilde(c.base.one())
    with pytest.raises(ConformalError):
        c.nprod(one, one, -1)


def test_elements_of_different_structures_do_not_mix():
    a = cur_m2()
    b = dif_m2()
    with pytest.raises(ConformalError):
        a.tilde(a.base.one()).add(b.tilde(b.base.one()))


def test_celement_enforces_the_d_variable():
    from confalg.rings import Poly

    c = cur_m2()
    with pytest.raises(ConformalError):
        CElement(c, {(1, 2): Poly.gen("x")})
    # plain numbers coerce to constants
    v = CElement(c, {(1, 2): 3})
    assert v.coeff_of((1, 2)) == Poly.const(Fraction(3), "D")


def test_nprod_all_collects_exactly_the_nonzero_orders():
    c = make_cend(1)
    l1 = c.named_element("L1")
    got = c.nprod_all(l1, l1)
    assert sorted(got) == [0, 1]
    assert got[1] == c.named_element("L1").neg()


def test_coeff_matrix_shape():
    c = cur_m2()
    e12 = c.tilde(c.base.parse_element({"e12": "1"}))
    keys, rows = coeff_matrix([e12, e12.dapply()])
    assert keys == [(1, 2)]
    assert len(rows) == 2 and len(rows[0]) == 1


def test_sample_celement_deterministic():
    c = dif_m2()
    assert sample_celement(c, random.Random(1), 3) == sample_celement(
        c, random.Random(1), 3
    )
