"""A seeded invariant suite run by ``charp selftest``.

Each check returns (name, ok, witness) and uses only public operations, so a
failure points at a broken identity rather than at the harness.
"""

from __future__ import annotations

import random

from .arith import PolyRing, pd_coefficient
from .connections import (
    bracket_closure,
    cocycle_check,
    horizontal_fields,
    is_integrable,
    p_curvature,
    p_power_closure,
    taylor_stratification,
)
from .diffops import DiffOp, conj_level, conj_level_membership, op_mul, p_curvature_derivation, pair, rees_specialize
from .frobenius import cartier_descend, cartier_splitting, frobenius_pullback, theta_coalgebra_check
from .generators import (
    connection_corpus,
    filtered_connection,
    gauge_flat,
    nilpotent_higgs,
    random_derivation,
    random_hodge_element,
    random_lift,
    random_operator,
    random_poly,
)
from .pd import PDElement, pd_basis
from .rees import NEITHER, PRESERVES, associated_higgs, conj_deform, griffiths_check, theta_rees_compat

__all__ = ["CHECKS", "run"]


def _is_zero_all(mats):
    return all(m.is_zero() for m in mats)


def check_duality(rng, size):
    bad = 0
    for p in (2, 3):
        for m in (1, 2):
            ring = PolyRing(p, tuple(f"x{i + 1}" for i in range(m)))
            n = 2 * p
            basis = pd_basis(m, n)
            for k in basis:
                w = PDElement.monomial(ring, k, n)
                for a in basis:
                    v = pair(w, DiffOp.monomial(ring, a))
                    if v != ring.const(1 if a == k else 0):
                        bad += 1
    return bad == 0, {"mismatches": bad}


def check_associativity(rng, size):
    bad = 0
    for p in (2, 3, 5):
        ring = PolyRing(p, ("x", "y"))
        for _ in range(size):
            a, b, c = (random_operator(ring, rng, order=2, degree=2, terms=2) for _ in range(3))
            if op_mul(op_mul(a, b), c) != op_mul(a, op_mul(b, c)):
                bad += 1
    return bad == 0, {"failures": bad}


def check_psi_linearity(rng, size):
    bad = 0
    for p in (2, 3, 5):
        ring = PolyRing(p, ("x", "y"))
        for _ in range(size):
            d, e = random_derivation(ring, rng, 1), random_derivation(ring, rng, 1)
            f = random_poly(ring, rng, 1)
            pd_, pe = p_curvature_derivation(d), p_curvature_derivation(e)
            if p_curvature_derivation(d + e) != pd_ + pe:
                bad += 1
            fd = p_curvature_derivation(d.scale_left(f))
            if fd != op_mul(DiffOp.function(f ** p), pd_):
                bad += 1
            if pd_.commutator(pe) != DiffOp.zero(ring) or pd_.commutator(f) != DiffOp.zero(ring):
                bad += 1
    for p in (2, 3, 5, 7):
        ring = PolyRing(p, ("x",))
        x = ring.gen(0)
        xd = DiffOp.monomial(ring, (1,), x)
        if xd ** p != xd + DiffOp.monomial(ring, (p,), x ** p):
            bad += 1
    return bad == 0, {"failures": bad}


def check_horizontal(rng, size):
    bad = 0
    seen = set()
    for p in (2, 3):
        ring = PolyRing(p, ("x", "y"))
        for inst in connection_corpus(ring, rng, size):
            c = inst.connection
            h = horizontal_fields(c)
            flat = is_integrable(c)
            psi0 = _is_zero_all(p_curvature(c))
            seen.add((flat, psi0))
            if flat != bracket_closure(h) or psi0 != p_power_closure(h):
                bad += 1
    return bad == 0, {"failures": bad, "sides": sorted(seen)}


def check_equalizer(rng, size):
    bad = 0
    for p in (2, 3):
        ring = PolyRing(p, ("x", "y"))
        for inst in connection_corpus(ring, rng, size):
            c = inst.connection
            if not is_integrable(c):
                continue
            s = taylor_stratification(c, p)
            if not cocycle_check(s) or s.quotient_is_identity() != _is_zero_all(p_curvature(c)):
                bad += 1
    return bad == 0, {"failures": bad}


def check_cartier(rng, size):
    bad = 0
    for p in (2, 3, 5):
        ring = PolyRing(p, ("x", "y"))
        can, _ = frobenius_pullback(ring, 2)
        if not _is_zero_all(p_curvature(can)):
            bad += 1
        for _ in range(size):
            inst = gauge_flat(ring, 2, rng)
            c, s = inst.connection, inst.gauge
            bound = max(f.degree() for f in s.inverse().entries())
            desc = cartier_descend(c, bound)
            # flat frames agree up to matrices over F_p[x^p]
            change = s * desc.frame
            if desc.pullback() != c or any(not change.derive(i).is_zero() for i in range(ring.nvars)):
                bad += 1
    return bad == 0, {"failures": bad}


def check_theta(rng, size):
    ok = True
    for p in (2, 3):
        ring = PolyRing(p, ("x",))
        ok &= bool(theta_coalgebra_check(ring, p * p))
    for p in (2, 3, 5):
        ok &= all(pd_coefficient(k, p) == 1 for k in range(1, 5))
    return ok, {}


def check_rees(rng, size):
    bad = 0
    for p in (2, 3):
        ring = PolyRing(p, ("x", "y"))
        for n in range(size):
            target = ("preserve", "griffiths")[n % 2]
            v, c = filtered_connection(ring, rng.randint(2, 3), rng, target)
            g = griffiths_check(v, c)
            if g == NEITHER:
                continue
            if (g == PRESERVES) != associated_higgs(v, c).is_zero():
                bad += 1
        rt = ring.with_param()
        for _ in range(size):
            a = random_hodge_element(rt, rng)
            f = random_poly(rt.without_param(), rng, 2).embed(rt)
            if not rees_specialize(a.commutator(type(a).function(f)), 0).is_zero():
                bad += 1
    return bad == 0, {"failures": bad}


def check_deform(rng, size):
    bad = 0
    for p in (2, 3, 5):
        ring = PolyRing(p, ("x", "y"))
        for rank in (2, 3):
            higgs = nilpotent_higgs(ring, rank, rng)
            for lifts in ([ring.zero()] * 2, random_lift(ring, rng)):
                z = cartier_splitting(lifts)
                r = conj_deform(higgs, z, p)
                r1 = conj_deform(higgs, z, 1)
                if not (r.integrable and r.member and r1.measured_exponent == 1):
                    bad += 1
    return bad == 0, {"failures": bad}


def check_theta_rees(rng, size):
    ok = all(bool(theta_rees_compat(PolyRing(p, ("x", "y")), 3)) for p in (2, 3, 5))
    return ok, {}


def check_conj_levels(rng, size):
    bad = 0
    for p in (2, 3):
        ring = PolyRing(p, ("x",))
        for _ in range(size):
            a = random_operator(ring, rng, order=3 * p, terms=2)
            b = random_operator(ring, rng, order=3 * p, terms=2)
            la, lb = conj_level(a), conj_level(b)
            prod = op_mul(a, b)
            if la is not None and lb is not None and not conj_level_membership(prod, la + lb):
                bad += 1
    return bad == 0, {"failures": bad}


CHECKS = [
    ("duality", check_duality),
    ("associativity", check_associativity),
    ("psi-linearity", check_psi_linearity),
    ("horizontal-equivalences", check_horizontal),
    ("equalizer", check_equalizer),
    ("cartier-round-trip", check_cartier),
    ("theta-coalgebra", check_theta),
    ("rees-griffiths", check_rees),
    ("key-deformation", check_deform),
    ("theta-filtration", check_theta_rees),
    ("conjugate-filtration", check_conj_levels),
]


def run(seed: int = 0, size: int = 10):
    out = []
    for name, fn in CHECKS:
        rng = random.Random(f"{seed}:{name}")
        ok, witness = fn(rng, size)
        out.append((name, ok, witness))
    return out
