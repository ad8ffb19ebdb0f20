import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from charp.arith import (
    ModPoly,
    PolyMatrix,
    PolyRing,
    binom_mod_p,
    is_prime,
    nullspace_mod_p,
    pd_coefficient,
    poly_derive,
    poly_frobenius,
    rank_mod_p,
    solve_mod_p,
)
from charp.errors import ContextError, ParseError, PreconditionError
from charp.generators import random_poly

PRIMES = (2, 3, 5, 7)


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@pytest.mark.parametrize("n,k,p,want", [(5, 2, 3, 1), (9, 0, 5, 1), (3, 1, 3, 0), (4, 7, 3, 0)])
def test_binom_examples(n, k, p, want):
    assert binom_mod_p(n, k, p) == want


@pytest.mark.parametrize("p", PRIMES)
def test_lucas_matches_bigint(p):
    for n in range(201):
        for k in range(n + 1):
            assert binom_mod_p(n, k, p) == math.comb(n, k) % p


def _pd_coefficient_bigint(k, p):
    # (kp)! / (k! (p!)^k) as an exact integer
    q = math.factorial(k * p) // (math.factorial(k) * math.factorial(p) ** k)
    return q % p


@pytest.mark.parametrize("k,p,want", [(2, 3, 1), (1, 5, 1), (3, 2, 1)])
def test_pd_coefficient_examples(k, p, want):
    assert pd_coefficient(k, p) == want


@pytest.mark.parametrize("p", (2, 3, 5))
def test_pd_coefficient_bigint(p):
    for k in range(1, 12):
        assert pd_coefficient(k, p) == _pd_coefficient_bigint(k, p)


def test_derive_examples():
    r3 = PolyRing(3, ("x",))
    assert poly_derive(r3.parse("x^3"), 0).is_zero()
    r5 = PolyRing(5, ("x", "y"))
    assert poly_derive(r5.parse("x^2 y"), 0) == r5.parse("2 x y")
    assert poly_derive(r5.const(4), 1).is_zero()


def test_frobenius_examples():
    r2 = PolyRing(2, ("x",))
    assert poly_frobenius(r2.parse("x + 1")) == r2.parse("x^2 + 1")
    assert poly_frobenius(r2.zero()).is_zero()
    r3 = PolyRing(3, ("x",))
    assert poly_frobenius(r3.parse("2x")) == r3.parse("2 x^3")


@pytest.mark.parametrize("p", PRIMES)
def test_freshman_dream(p):
    ring = PolyRing(p, ("x", "y"))
    rng = random.Random(p)
    for _ in range(100):
        f, g = random_poly(ring, rng, 3), random_poly(ring, rng, 3)
        assert (f + g) ** p == f ** p + g ** p
        assert (f + g).frobenius() == f ** p + g ** p


@pytest.mark.parametrize("p", PRIMES)
def test_leibniz(p):
    ring = PolyRing(p, ("x", "y"))
    rng = random.Random(10 + p)
    for _ in range(50):
        f, g = random_poly(ring, rng, 4), random_poly(ring, rng, 4)
        for i in range(2):
            assert (f * g).derive(i) == f.derive(i) * g + f * g.derive(i)


def test_param_is_not_derived():
    ring = PolyRing(3, ("x",), "t")
    f = ring.parse("t^2 x^2")
    assert f.derive(0) == ring.parse("2 t^2 x")
    assert f.eval_param(1) == ring.without_param().parse("x^2")
    assert ring.parse("t^4 x + t^2").param_valuation() == 2


def test_twist_and_embed():
    ring = PolyRing(3, ("x", "y"))
    tw = ring.twisted()
    assert tw.names == ("x'", "y'")
    g = tw.parse("x' y'^2 + 1")
    assert g.untwist(ring) == ring.parse("x^3 y^6 + 1")
    rt = ring.with_param()
    assert ring.gen(0).embed(rt) == rt.gen(0)


def test_parse_errors():
    ring = PolyRing(3, ("x", "y"))
    with pytest.raises(ParseError) as e:
        ring.parse("x +* y")
    assert e.value.column == 4
    with pytest.raises(ParseError):
        ring.parse("z")
    with pytest.raises(ParseError):
        ring.parse("x^-1")


def test_bad_modulus():
    with pytest.raises(ContextError):
        PolyRing(4, ("x",))


def test_mixed_rings_rejected():
    a, b = PolyRing(3, ("x",)), PolyRing(5, ("x",))
    with pytest.raises(ContextError):
        a.gen(0) + b.gen(0)


def test_render_roundtrip():
    ring = PolyRing(5, ("x", "y"), "t")
    rng = random.Random(3)
    for _ in range(50):
        f = random_poly(ring, rng, 4, terms=4)
        assert ring.parse(str(f)) == f


def test_matrix_inverse_and_det():
    ring = PolyRing(3, ("x", "y"))
    x, y = ring.gen(0), ring.gen(1)
    s = PolyMatrix(ring, [[1, x], [0, 1]]) * PolyMatrix(ring, [[1, 0], [y ** 2, 1]])
    assert s.det() == ring.one()
    assert s * s.inverse() == PolyMatrix.identity(ring, 2)
    with pytest.raises(PreconditionError):
        PolyMatrix(ring, [[x, 0], [0, 1]]).inverse()


def test_matrix_derive_product_rule():
    ring = PolyRing(5, ("x",))
    rng = random.Random(1)
    a = PolyMatrix(ring, [[random_poly(ring, rng) for _ in range(2)] for _ in range(2)])
    b = PolyMatrix(ring, [[random_poly(ring, rng) for _ in range(2)] for _ in range(2)])
    assert (a * b).derive(0) == a.derive(0) * b + a * b.derive(0)


def test_linear_algebra():
    assert nullspace_mod_p([[1, 2], [2, 4]], 2, 5) == [[3, 1]]
    assert solve_mod_p([[1, 0], [0, 2]], [3, 4], 2, 5) == [3, 2]
    assert rank_mod_p([[1, 2], [2, 4]], 2, 5) == 1


@settings(max_examples=60, deadline=None)
@given(
    p=st.sampled_from(PRIMES),
    a=st.dictionaries(st.tuples(st.integers(0, 4), st.integers(0, 4)), st.integers(-20, 20), max_size=5),
    b=st.dictionaries(st.tuples(st.integers(0, 4), st.integers(0, 4)), st.integers(-20, 20), max_size=5),
)
def test_ring_axioms(p, a, b):
    ring = PolyRing(p, ("x", "y"))
    f, g = ModPoly.from_terms(ring, a), ModPoly.from_terms(ring, b)
    x = ring.gen(0)
    assert f * g == g * f
    assert (f + g) * x == f * x + g * x
    assert f - f == ring.zero()
    assert (f * g).frobenius() == f.frobenius() * g.frobenius()
