"""Frobenius twist and pullback, the Cartier operator, Cartier splittings from
Frobenius lifts, Cartier descent, and the p-curvature map theta.

Twisted functions are ModPoly over ``ring.twisted()`` (variables x1', ...);
the relative Frobenius substitutes x_i' -> x_i^p.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arith import ModPoly, PolyMatrix, PolyRing, solve_mod_p
from .connections import DR, ConnectionData, flat_sections, frame_matrix, gauge_transform
from .errors import ContextError, DimensionMismatch, InfeasibleError, NonClosedFormError, PreconditionError
from .pd import GammaElement, PDElement, comultiply, pd_basis, quotient_mod_I

__all__ = [
    "OneForm",
    "frobenius_pullback",
    "cartier_operator",
    "CartierSplitting",
    "cartier_splitting",
    "Descent",
    "cartier_descend",
    "theta_map",
    "ThetaReport",
    "theta_coalgebra_check",
]


class OneForm:
    """sum_i w_i dx_i with polynomial coefficients."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: PolyRing, coeffs):
        coeffs = tuple(ring.coerce(c) for c in coeffs)
        if len(coeffs) != ring.nvars:
            raise DimensionMismatch("one coefficient per coordinate")
        self.ring = ring
        self.coeffs = coeffs

    @classmethod
    def exact(cls, f: ModPoly) -> "OneForm":
        return cls(f.ring, [f.derive(i) for i in range(f.ring.nvars)])

    @classmethod
    def basis(cls, ring, i, coeff=1) -> "OneForm":
        return cls(ring, [coeff if j == i else 0 for j in range(ring.nvars)])

    def is_closed(self) -> bool:
        m = self.ring.nvars
        return all(
            self.coeffs[j].derive(i) == self.coeffs[i].derive(j) for i in range(m) for j in range(i + 1, m)
        )

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def __add__(self, other):
        return OneForm(self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        return OneForm(self.ring, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def scale_left(self, f) -> "OneForm":
        return OneForm(self.ring, [f * c for c in self.coeffs])

    def degree(self) -> int:
        return max((c.degree() for c in self.coeffs), default=-1)

    def __eq__(self, other):
        return isinstance(other, OneForm) and self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __str__(self):
        parts = []
        for name, c in zip(self.ring.names, self.coeffs):
            if c.is_zero():
                continue
            if c == self.ring.one():
                parts.append(f"d{name}")
            elif c.n_terms() > 1:
                parts.append(f"({c}) d{name}")
            else:
                parts.append(f"{c} d{name}")
        return " + ".join(parts) or "0"

    def __repr__(self):
        return f"OneForm({self})"


def frobenius_pullback(ring: PolyRing, rank: int, higgs=None):
    """F^*E' for a free E' of the given rank on X' = Spec ring.twisted().

    Returns the canonical connection (zero matrices in the pulled-back frame)
    and, if Higgs matrices B_i' over the twist are given, B_i(x) = B_i'(x^p).
    """
    can = ConnectionData.trivial(ring, rank, DR)
    if higgs is None:
        return can, None
    tw = ring.twisted()
    pulled = []
    for b in higgs:
        if b.ring != tw:
            raise ContextError(f"Higgs matrix must live over {tw}")
        pulled.append(b.untwist(ring))
    return can, pulled


# ---------------------------------------------------------------------------
# the Cartier operator
# ---------------------------------------------------------------------------


def cartier_operator(omega: OneForm, degree_bound: int | None = None) -> OneForm:
    """Solve omega = dg + sum u_i(x^p) x_i^(p-1) dx_i and return sum u_i(x') dx_i'.

    g ranges over polynomials of degree <= bound + 1 and each u_i(x^p) x_i^(p-1)
    over degree <= bound.  The u-part of a solution is unique.
    """
    ring = omega.ring
    p, m = ring.p, ring.nvars
    if ring.param:
        raise ContextError("the Cartier operator is taken over F_p[x]")
    if not omega.is_closed():
        raise NonClosedFormError("input form is not closed")
    if degree_bound is None:
        degree_bound = max(omega.degree(), 0)
    tw = ring.twisted()
    gmonos = [e for e in ring.monomials_up_to(degree_bound + 1) if any(e)]
    umonos = [e for e in ring.monomials_up_to(max((degree_bound - p + 1) // p, -1))] if degree_bound >= p - 1 else []
    cols = [("g", e) for e in gmonos] + [("u", i, e) for i in range(m) for e in umonos]
    # each unknown contributes a one-form; collect coordinates (i, monomial)
    contrib = []
    for col in cols:
        if col[0] == "g":
            form = OneForm.exact(ring.monomial(col[1]))
        else:
            _, i, e = col
            mono = tuple(p * a + (p - 1 if j == i else 0) for j, a in enumerate(e))
            form = OneForm.basis(ring, i, ring.monomial(mono))
        contrib.append(form)
    keys = {}
    for form in contrib + [omega]:
        for i, c in enumerate(form.coeffs):
            for e in c.terms:
                keys.setdefault((i, e), len(keys))
    rows = [[0] * len(cols) for _ in keys]
    for n, form in enumerate(contrib):
        for i, c in enumerate(form.coeffs):
            for e, v in c.terms.items():
                rows[keys[(i, e)]][n] = v
    rhs = [0] * len(keys)
    for i, c in enumerate(omega.coeffs):
        for e, v in c.terms.items():
            rhs[keys[(i, e)]] = v
    sol = solve_mod_p(rows, rhs, len(cols), p) if keys else [0] * len(cols)
    if sol is None:
        raise InfeasibleError(f"no decomposition with degree bound {degree_bound}")
    us = [dict() for _ in range(m)]
    for n, col in enumerate(cols):
        if col[0] == "u" and sol[n]:
            us[col[1]][col[2]] = sol[n]
    return OneForm(tw, [ModPoly.from_terms(tw, u) for u in us])


# ---------------------------------------------------------------------------
# splittings of Cartier from coordinate Frobenius lifts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CartierSplitting:
    """zeta(dx_i') = x_i^(p-1) dx_i + dh_i for the lift x_i -> x_i^p + p h_i."""

    ring: PolyRing
    lifts: tuple
    images: tuple

    def apply(self, form: OneForm) -> OneForm:
        """sum u_i(x') dx_i'  ->  sum u_i(x^p) zeta(dx_i')."""
        if form.ring != self.ring.twisted():
            raise ContextError("expected a one-form on the Frobenius twist")
        acc = OneForm(self.ring, [0] * self.ring.nvars)
        for u, z in zip(form.coeffs, self.images):
            if not u.is_zero():
                acc = acc + z.scale_left(u.untwist(self.ring))
        return acc

    def is_section(self) -> bool:
        """Every zeta(dx_i') is closed and the Cartier operator sends it back to dx_i'."""
        tw = self.ring.twisted()
        for i, z in enumerate(self.images):
            if not z.is_closed():
                return False
            if cartier_operator(z) != OneForm.basis(tw, i):
                return False
        return True


def _int_linear_part(h: ModPoly, j: int):
    """Integer-coefficient tau_j-linear part of h(x + tau), h lifted with coefficients in [0, p)."""
    out = {}
    for e, c in h.terms.items():
        if e[j]:
            e2 = e[:j] + (e[j] - 1,) + e[j + 1:]
            out[e2] = out.get(e2, 0) + c * e[j]
    return out


def cartier_splitting(lifts) -> CartierSplitting:
    """Splitting induced by the lift F(x_i) = x_i^p + p h_i.

    The tau-linear part of (F(x + tau) - F(x)) / p is computed over the
    integers before reducing mod p: (x_i + tau_i)^p contributes C(p,1)/p x_i^(p-1)
    and p h_i(x + tau) contributes the partials of h_i.
    """
    from math import comb

    lifts = tuple(lifts)
    if not lifts:
        raise PreconditionError("need one lift polynomial per coordinate")
    ring = lifts[0].ring
    p, m = ring.p, ring.nvars
    if len(lifts) != m:
        raise DimensionMismatch("need one lift polynomial per coordinate")
    images = []
    for i, h in enumerate(lifts):
        coeffs = []
        for j in range(m):
            num = {e: p * c for e, c in _int_linear_part(h, j).items()}
            if j == i:
                e = tuple(p - 1 if k == i else 0 for k in range(ring.arity))
                num[e] = num.get(e, 0) + comb(p, 1)
            for e, v in num.items():
                assert v % p == 0
            coeffs.append(ModPoly.from_terms(ring, {e: v // p for e, v in num.items()}))
        images.append(OneForm(ring, coeffs))
    return CartierSplitting(ring, lifts, tuple(images))


# ---------------------------------------------------------------------------
# Cartier descent
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Descent:
    """A free module on X' presented by the frame of flat sections it pulls back to."""

    ring: PolyRing
    rank: int
    frame: PolyMatrix

    def pullback(self) -> ConnectionData:
        """The connection for which ``frame`` is flat."""
        triv = ConnectionData.trivial(self.ring, self.rank, DR)
        return gauge_transform(triv, self.frame.inverse())


def cartier_descend(c: ConnectionData, degree_bound: int | None = None) -> Descent:
    cols = flat_sections(c, degree_bound)
    frame = frame_matrix(c.ring, cols)
    out = Descent(c.ring, c.rank, frame)
    if out.pullback() != c:
        raise PreconditionError("flat frame does not reproduce the connection")
    return out


# ---------------------------------------------------------------------------
# theta: P -> F^* Gamma Omega_{X'}
# ---------------------------------------------------------------------------

DOL_LABEL = "dx{i}'"


def theta_map(a: PDElement) -> GammaElement:
    """tau^[pk] -> (dx')^[k], every other PD monomial -> 0; coefficients untouched."""
    return quotient_mod_I(a, DOL_LABEL)


@dataclass(frozen=True)
class ThetaReport:
    level: int
    counit: bool
    source_target: bool
    comultiplication: bool
    failures: tuple = ()

    def __bool__(self):
        return self.counit and self.source_target and self.comultiplication


def _theta_tensor(t, theta):
    out = {}
    for (k, l), c in t.terms.items():
        a = theta(PDElement.monomial(t.ring, k, t.level))
        b = theta(PDElement.monomial(t.ring, l, t.level))
        for ka, ca in a.terms.items():
            for kb, cb in b.terms.items():
                key = (ka, kb)
                v = c * ca * cb
                out[key] = out[key] + v if key in out else v
    return {k: v for k, v in out.items() if not v.is_zero()}


def theta_coalgebra_check(ring: PolyRing, level: int | None = None, theta=None) -> ThetaReport:
    """Check the three diagrams making theta a coalgebra map, on every PD monomial.

    counit: the constant terms agree; source/target: theta(tau_i w) = 0, i.e.
    theta does not see the difference between x_i w and (x_i + tau_i) w;
    comultiplication: (theta (x) theta) Delta(w) = Delta(theta(w)).
    ``theta`` may be replaced by any map on monomials to test the check itself.
    """
    theta = theta or theta_map
    p, m = ring.p, ring.nvars
    level = p * p if level is None else level
    counit = source = comult = True
    failures = []
    zero = (0,) * m
    for k in pd_basis(m, level):
        w = PDElement.monomial(ring, k, level)
        tw = theta(w)
        if tw.terms.get(zero, ring.zero()) != w.terms.get(zero, ring.zero()):
            counit = False
            failures.append(("counit", k))
        for i in range(m):
            if sum(k) + 1 > level:
                break
            shifted = PDElement.tau(ring, i, level) * w
            if not theta(shifted).is_zero():
                source = False
                failures.append(("source_target", k))
        lhs = _theta_tensor(comultiply(w), theta)
        rhs = {kl: v for kl, v in tw.comultiply().terms.items() if not v.is_zero()}
        if lhs != rhs:
            comult = False
            failures.append(("comultiplication", k))
    return ThetaReport(level, counit, source, comult, tuple(failures))
