import math
import random

import pytest

from charp.arith import PolyRing
from charp.errors import LevelMismatch
from charp.generators import random_poly
from charp.pd import PDElement, comultiply, pd_basis, pd_mul, pd_taylor, quotient_mod_I


def _tau(ring, k, level, c=1):
    return PDElement.monomial(ring, k, level, c)


def test_binomial_rule():
    r5 = PolyRing(5, ("x",))
    t = PDElement.tau(r5, 0, 4)
    assert pd_mul(t, t) == _tau(r5, (2,), 4, 2)
    r2 = PolyRing(2, ("x",))
    t = PDElement.tau(r2, 0, 4)
    assert pd_mul(t, t).is_zero()


def test_lemma_coefficient_example():
    # tau^[3] tau^[3] = C(6,3) tau^[6] and C(6,3) = 20; the unit is 20/2 = 10 = 1 mod 3
    r = PolyRing(3, ("x",))
    prod = pd_mul(_tau(r, (3,), 9), _tau(r, (3,), 9))
    assert prod == _tau(r, (6,), 9, 2)


@pytest.mark.parametrize("p", (2, 3, 5))
def test_product_table_against_binomials(p):
    ring = PolyRing(p, ("x", "y"))
    level = 2 * p
    basis = pd_basis(2, level)
    for a in basis:
        for b in basis:
            got = pd_mul(_tau(ring, a, level), _tau(ring, b, level))
            k = tuple(i + j for i, j in zip(a, b))
            if sum(k) > level:
                assert got.is_zero()
                continue
            c = math.prod(math.comb(i + j, i) for i, j in zip(a, b)) % p
            assert got == _tau(ring, k, level, c)


def test_taylor_examples():
    r = PolyRing(5, ("x",))
    x = r.gen(0)
    want = PDElement(r, 2, {(0,): x ** 2, (1,): x.scale(2), (2,): r.const(2)})
    assert pd_taylor(x ** 2, 2) == want
    assert pd_taylor(r.const(3), 4) == PDElement.constant(r, 4, r.const(3))
    assert pd_taylor(x, 1) == PDElement(r, 1, {(0,): x, (1,): r.one()})


@pytest.mark.parametrize("p", (2, 3, 5))
def test_taylor_of_monomial_oracle(p):
    # (x + tau)^m = sum C(m,k) x^(m-k) k! tau^[k]
    ring = PolyRing(p, ("x",))
    x = ring.gen(0)
    level = p * p
    for m in range(2 * p + 3):
        want = {}
        for k in range(min(m, level) + 1):
            c = math.comb(m, k) * math.factorial(k) % p
            if c:
                want[(k,)] = (x ** (m - k)).scale(c)
        assert pd_taylor(x ** m, level) == PDElement(ring, level, want)


@pytest.mark.parametrize("p", (2, 3, 5))
def test_taylor_is_multiplicative(p):
    ring = PolyRing(p, ("x", "y"))
    rng = random.Random(p)
    for _ in range(100):
        f, g = random_poly(ring, rng, 3), random_poly(ring, rng, 3)
        assert pd_taylor(f * g, 2 * p) == pd_mul(pd_taylor(f, 2 * p), pd_taylor(g, 2 * p))


def test_comultiply_examples():
    r = PolyRing(3, ("x",))
    d = comultiply(_tau(r, (2,), 4))
    assert set(d.terms) == {((2,), (0,)), ((1,), (1,)), ((0,), (2,))}
    assert comultiply(PDElement.constant(r, 4, r.one())).terms == {((0,), (0,)): r.one()}
    f = r.parse("x^2 + 1")
    d = comultiply(_tau(r, (1,), 4, f))
    assert d.terms == {((1,), (0,)): f, ((0,), (1,)): f}


def _triple_left(ring, level, k):
    out = {}
    for (i, j), c in comultiply(_tau(ring, k, level)).terms.items():
        for (a, b), c2 in comultiply(_tau(ring, i, level, c)).terms.items():
            out[(a, b, j)] = out.get((a, b, j), ring.zero()) + c2
    return {k: v for k, v in out.items() if not v.is_zero()}


def _triple_right(ring, level, k):
    out = {}
    for (i, j), c in comultiply(_tau(ring, k, level)).terms.items():
        for (a, b), c2 in comultiply(_tau(ring, j, level, c)).terms.items():
            out[(i, a, b)] = out.get((i, a, b), ring.zero()) + c2
    return {k: v for k, v in out.items() if not v.is_zero()}


@pytest.mark.parametrize("p,m", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_coassociativity(p, m):
    ring = PolyRing(p, tuple("xy"[:m]))
    level = p * p
    for k in pd_basis(m, level):
        assert _triple_left(ring, level, k) == _triple_right(ring, level, k)


@pytest.mark.parametrize("p", (2, 3))
def test_counit(p):
    ring = PolyRing(p, ("x", "y"))
    level = p * p
    for k in pd_basis(2, level):
        w = _tau(ring, k, level, ring.parse("x + y^2"))
        d = comultiply(w)
        assert d.counit_left() == w
        assert d.counit_right() == w


@pytest.mark.parametrize("p", (2, 3, 5))
def test_quotient_examples(p):
    ring = PolyRing(p, ("x",))
    level = 2 * p + 2
    assert quotient_mod_I(PDElement.tau(ring, 0, level)).is_zero()
    g = quotient_mod_I(_tau(ring, (p,), level))
    assert g.terms == {(1,): ring.one()}
    f = ring.parse("x + 1")
    assert quotient_mod_I(_tau(ring, (p + 1,), level, f)).is_zero()


@pytest.mark.parametrize("p", (2, 3))
def test_quotient_is_algebra_map_with_kernel_I(p):
    ring = PolyRing(p, ("x", "y"))
    level = 2 * p
    basis = pd_basis(2, level)
    for k in basis:
        img = quotient_mod_I(_tau(ring, k, level))
        assert img.is_zero() == any(a % p for a in k)
        for l in basis:
            lhs = quotient_mod_I(pd_mul(_tau(ring, k, level), _tau(ring, l, level)))
            rhs = img * quotient_mod_I(_tau(ring, l, level))
            assert lhs == rhs


def test_level_mismatch():
    ring = PolyRing(3, ("x",))
    with pytest.raises(LevelMismatch):
        pd_mul(_tau(ring, (1,), 2), _tau(ring, (1,), 3))


def test_rendering():
    ring = PolyRing(3, ("x",))
    assert str(pd_taylor(ring.gen(0), 1)) == "T1^[1] + x"
    assert str(comultiply(_tau(ring, (1,), 2))) == "T1^[1] (x) 1 + 1 (x) T1^[1]"
