"""Crystalline differential operators in normal form  sum_alpha f_alpha(x) d^alpha.

Coefficients sit on the left and are ModPoly (scalar operators) or square
PolyMatrix (operators on a free module of rank d; the symbols d_i commute
with constant matrices).  Multiplication uses the rewrite

    d^a g = sum_{c <= a} C(a, c) d^{a-c}(g) d^c

coordinate-wise, which is the only relation needed in normal form.
"""

from __future__ import annotations

import itertools

from .arith import ModPoly, PolyMatrix, PolyRing, binom_mod_p
from .errors import ContextError, DimensionMismatch, LevelMismatch, PreconditionError
from .pd import PDElement, PDTensor, pd_taylor

__all__ = [
    "DiffOp",
    "Derivation",
    "HodgeElement",
    "ConjElement",
    "op_mul",
    "op_apply",
    "pair",
    "pair_tensor",
    "dual_product",
    "p_curvature_derivation",
    "conj_level",
    "conj_level_membership",
    "rees_specialize",
]


def _alpha_key(a):
    return (sum(a), a)


def _binom_multi(a, c, p):
    v = 1
    for x, y in zip(a, c):
        if y:
            v = v * binom_mod_p(x, y, p) % p
            if not v:
                return 0
    return v


def _below(alpha):
    return itertools.product(*(range(a + 1) for a in alpha))


class DiffOp:
    __slots__ = ("ring", "dim", "terms")

    def __init__(self, ring: PolyRing, terms, dim: int | None = None):
        self.ring = ring
        self.dim = dim
        clean = {}
        for a, c in terms.items():
            a = tuple(a)
            if len(a) != ring.nvars:
                raise DimensionMismatch("derivative multi-index has wrong arity")
            if isinstance(c, int):
                c = ring.const(c) if dim is None else PolyMatrix.identity(ring, dim).scale(c)
            if dim is None and not isinstance(c, ModPoly):
                raise TypeError("scalar operator needs ModPoly coefficients")
            if dim is not None and (not isinstance(c, PolyMatrix) or c.shape != (dim, dim)):
                raise DimensionMismatch(f"coefficient is not a {dim}x{dim} matrix")
            if not c.is_zero():
                clean[a] = c
        self.terms = clean

    # constructors -----------------------------------------------------------
    @classmethod
    def d(cls, ring: PolyRing, i: int, power: int = 1, dim: int | None = None) -> "DiffOp":
        a = [0] * ring.nvars
        a[i] = power
        one = ring.one() if dim is None else PolyMatrix.identity(ring, dim)
        return cls(ring, {tuple(a): one}, dim)

    @classmethod
    def monomial(cls, ring, alpha, coeff=1, dim=None) -> "DiffOp":
        if dim is None and not isinstance(coeff, ModPoly):
            coeff = ring.coerce(coeff)
        return cls(ring, {tuple(alpha): coeff}, dim)

    @classmethod
    def function(cls, f) -> "DiffOp":
        if isinstance(f, PolyMatrix):
            return cls(f.ring, {(0,) * f.ring.nvars: f}, f.shape[0])
        return cls(f.ring, {(0,) * f.ring.nvars: f})

    @classmethod
    def zero(cls, ring, dim=None):
        return cls(ring, {}, dim)

    @classmethod
    def one(cls, ring, dim=None):
        c = ring.one() if dim is None else PolyMatrix.identity(ring, dim)
        return cls(ring, {(0,) * ring.nvars: c}, dim)

    # structure --------------------------------------------------------------
    @property
    def nvars(self):
        return self.ring.nvars

    def order(self) -> int:
        return max((sum(a) for a in self.terms), default=-1)

    def coefficient(self, alpha):
        alpha = tuple(alpha)
        if alpha in self.terms:
            return self.terms[alpha]
        return self.ring.zero() if self.dim is None else PolyMatrix.zeros(self.ring, self.dim)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, ModPoly, PolyMatrix)):
            other = self._coerce(other)
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.ring == other.ring and self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def _coerce(self, other):
        if isinstance(other, DiffOp):
            if other.ring != self.ring or other.dim != self.dim:
                raise ContextError("operators live over different coefficient rings")
            return other
        if isinstance(other, int):
            return DiffOp.one(self.ring, self.dim).scale(other)
        if isinstance(other, (ModPoly, PolyMatrix)):
            return DiffOp.function(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out[a] + c if a in out else c
        return DiffOp(self.ring, out, self.dim)

    __radd__ = __add__

    def __neg__(self):
        return DiffOp(self.ring, {a: -c for a, c in self.terms.items()}, self.dim)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int) -> "DiffOp":
        return DiffOp(self.ring, {a: v.scale(c) for a, v in self.terms.items()}, self.dim)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return op_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if isinstance(other, (ModPoly, PolyMatrix)):
            return op_mul(DiffOp.function(other), self)
        return NotImplemented

    def __pow__(self, n: int):
        out = DiffOp.one(self.ring, self.dim)
        base = self
        while n:
            if n & 1:
                out = op_mul(out, base)
            n >>= 1
            if n:
                base = op_mul(base, base)
        return out

    def commutator(self, other) -> "DiffOp":
        other = self._coerce(other)
        return op_mul(self, other) - op_mul(other, self)

    def apply(self, f):
        return op_apply(self, f)

    def order_part(self, lo: int, hi: int | None = None) -> "DiffOp":
        """Terms whose order lies in [lo, hi]."""
        hi = lo if hi is None else hi
        return DiffOp(self.ring, {a: c for a, c in self.terms.items() if lo <= sum(a) <= hi}, self.dim)

    def map_coefficients(self, fn, ring=None) -> "DiffOp":
        out = {a: fn(c) for a, c in self.terms.items()}
        if ring is None:
            ring = next((c.ring for c in out.values()), self.ring)
        return DiffOp(ring, out, self.dim)

    def eval_param(self, value: int) -> "DiffOp":
        return self.map_coefficients(lambda c: c.eval_param(value), self.ring.without_param())

    def embed(self, ring) -> "DiffOp":
        return self.map_coefficients(lambda c: c.embed(ring), ring)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: _alpha_key(kv[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for a, c in self.sorted_terms():
            mono = " ".join(f"D{i + 1}" if k == 1 else f"D{i + 1}^{k}" for i, k in enumerate(a) if k)
            if not mono:
                parts.append(f"({c})" if isinstance(c, ModPoly) and c.n_terms() > 1 else str(c))
                continue
            is_one = (c == c.ring.one()) if isinstance(c, ModPoly) else c == PolyMatrix.identity(c.ring, c.shape[0])
            if is_one:
                parts.append(mono)
            elif isinstance(c, ModPoly) and c.n_terms() > 1:
                parts.append(f"({c}) {mono}")
            else:
                parts.append(f"{c} {mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"DiffOp({self})"


def op_mul(a: DiffOp, b: DiffOp) -> DiffOp:
    """Normal-form product.  Matrix coefficients multiply in the given order."""
    if a.ring != b.ring:
        raise ContextError("operators over different rings")
    if a.dim != b.dim:
        raise DimensionMismatch(f"cannot multiply rank {a.dim} by rank {b.dim} operators")
    p = a.ring.p
    out: dict = {}
    for beta, g in b.terms.items():
        dcache = {}
        for alpha, f in a.terms.items():
            for c in _below(alpha):
                coef = _binom_multi(alpha, c, p)
                if not coef:
                    continue
                delta = tuple(x - y for x, y in zip(alpha, c))
                if delta not in dcache:
                    dcache[delta] = g.derive_multi(delta)
                dg = dcache[delta]
                if dg.is_zero():
                    continue
                term = f * dg
                if coef != 1:
                    term = term.scale(coef)
                key = tuple(x + y for x, y in zip(c, beta))
                out[key] = out[key] + term if key in out else term
    return DiffOp(a.ring, out, a.dim)


def op_apply(a: DiffOp, v):
    """Evaluate sum f_alpha d^alpha(v) on a function or a column of functions."""
    if a.dim is None:
        if not isinstance(v, ModPoly):
            raise DimensionMismatch("scalar operator acts on a single polynomial")
        acc = a.ring.zero()
    else:
        if not isinstance(v, PolyMatrix) or v.shape[0] != a.dim:
            raise DimensionMismatch(f"rank {a.dim} operator needs a column with {a.dim} rows")
        acc = PolyMatrix.zeros(a.ring, v.shape[0], v.shape[1])
    if v.ring != a.ring:
        raise ContextError("operand lives in a different ring")
    for alpha, f in a.terms.items():
        dv = v.derive_multi(alpha)
        if not dv.is_zero():
            acc = acc + f * dv
    return acc


def pair(a: PDElement, b: DiffOp) -> ModPoly:
    """<tau^[k], d^alpha> = delta_{k, alpha}, extended left-O-bilinearly."""
    if b.dim is not None:
        raise PreconditionError("pairing is defined for scalar operators")
    if b.order() > a.level:
        raise LevelMismatch(f"operator order {b.order()} exceeds PD level {a.level}")
    acc = a.ring.zero()
    for alpha, f in b.terms.items():
        c = a.terms.get(alpha)
        if c is not None:
            acc = acc + f * c
    return acc


def pair_tensor(t: PDTensor, first: DiffOp, second: DiffOp) -> ModPoly:
    """<sum c tau^[i] (x) tau^[j], (first, second)>.

    The right factor is paired with ``second`` first; the resulting function
    sits in the middle of the tensor, so it crosses to the left factor as its
    PD Taylor series before ``first`` is paired.
    """
    acc = t.ring.zero()
    for (k, l), c in t.terms.items():
        right = pair(PDElement.monomial(t.ring, l, t.level), second)
        if right.is_zero():
            continue
        left = PDElement.monomial(t.ring, k, t.level, c) * pd_taylor(right, t.level)
        acc = acc + pair(left, first)
    return acc


def dual_product(first: DiffOp, second: DiffOp, level: int) -> DiffOp:
    """The product obtained by dualizing comultiplication, on P^level.

    Returns sum_k <Delta(tau^[k]), (first, second)> d^k.
    """
    from .pd import comultiply, pd_basis

    out = {}
    for k in pd_basis(first.nvars, level):
        w = PDElement.monomial(first.ring, k, level)
        v = pair_tensor(comultiply(w), first, second)
        if not v.is_zero():
            out[k] = v
    return DiffOp(first.ring, out)


# ---------------------------------------------------------------------------
# derivations and p-curvature
# ---------------------------------------------------------------------------


class Derivation:
    """D = sum g_i d_i with polynomial coefficients."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: PolyRing, coeffs):
        coeffs = tuple(ring.coerce(c) for c in coeffs)
        if len(coeffs) != ring.nvars:
            raise DimensionMismatch("one coefficient per coordinate")
        self.ring = ring
        self.coeffs = coeffs

    @classmethod
    def partial(cls, ring, i):
        return cls(ring, [1 if j == i else 0 for j in range(ring.nvars)])

    def as_op(self) -> DiffOp:
        terms = {}
        for i, g in enumerate(self.coeffs):
            a = [0] * self.ring.nvars
            a[i] = 1
            terms[tuple(a)] = g
        return DiffOp(self.ring, terms)

    def apply(self, f: ModPoly) -> ModPoly:
        acc = self.ring.zero()
        for i, g in enumerate(self.coeffs):
            if g:
                acc = acc + g * f.derive(i)
        return acc

    def iterate(self, n: int) -> "Derivation":
        """The n-fold composite on coordinates, D^{o n}(x_i), packaged as a derivation.

        Only for n = p is the result a derivation of the ring.
        """
        out = []
        for i in range(self.ring.nvars):
            f = self.ring.gen(i)
            for _ in range(n):
                f = self.apply(f)
            out.append(f)
        return Derivation(self.ring, out)

    def __add__(self, other):
        return Derivation(self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def scale_left(self, f) -> "Derivation":
        return Derivation(self.ring, [f * g for g in self.coeffs])

    def __eq__(self, other):
        return isinstance(other, Derivation) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __str__(self):
        return str(self.as_op())


def p_curvature_derivation(D: Derivation) -> DiffOp:
    """psi(D) = D^p - D^{o p}: operator power minus the p-th iterate derivation."""
    p = D.ring.p
    return D.as_op() ** p - D.iterate(p).as_op()


# ---------------------------------------------------------------------------
# conjugate filtration
# ---------------------------------------------------------------------------


def _floor_weight(alpha, p):
    return sum(a // p for a in alpha)


def conj_level(a: DiffOp):
    """Largest k with a in Lambda^{>= pk}; None for the zero operator.

    Since each d_i^p is central, Lambda^{>= pk} is the left O-span of the
    monomials d^alpha with sum floor(alpha_i / p) >= k.
    """
    p = a.ring.p
    return min((_floor_weight(al, p) for al in a.terms), default=None)


def conj_level_membership(a: DiffOp, k: int) -> bool:
    lvl = conj_level(a)
    return lvl is None or lvl >= k


# ---------------------------------------------------------------------------
# Rees algebras of the order (Hodge) and conjugate filtrations
# ---------------------------------------------------------------------------


class HodgeElement:
    """Element of Lambda_Hod = sum_m O[t] t^m Lambda_m.

    Stored as an operator over F_p[x][t]; every term t^j f d^alpha must have
    j >= |alpha|.
    """

    __slots__ = ("op",)

    def __init__(self, op: DiffOp):
        if not op.ring.param:
            raise ContextError("Hodge Rees elements need a ring with parameter t")
        for alpha, c in op.terms.items():
            for e in _coeff_monomials(c):
                if e[-1] < sum(alpha):
                    raise PreconditionError(f"term t^{e[-1]} d^{alpha} is not in Lambda_Hod")
        self.op = op

    @classmethod
    def d(cls, ring, i):
        """t * d_i, the image of the tangent vector d_i."""
        return cls(DiffOp.d(ring, i).map_coefficients(lambda c: ring.t * c, ring))

    @classmethod
    def function(cls, f):
        return cls(DiffOp.function(f))

    def __mul__(self, other):
        return HodgeElement(self.op * other.op)

    def __add__(self, other):
        return HodgeElement(self.op + other.op)

    def __sub__(self, other):
        return HodgeElement(self.op - other.op)

    def commutator(self, other):
        return HodgeElement(self.op.commutator(other.op))

    def __eq__(self, other):
        return isinstance(other, HodgeElement) and self.op == other.op

    def __hash__(self):
        return hash(self.op)

    def __str__(self):
        return str(self.op)


def _coeff_monomials(c):
    if isinstance(c, ModPoly):
        return list(c.terms)
    return [e for f in c.entries() for e in f.terms]


class GradedSymbol:
    """Commutative symbol sum f_alpha(x) xi^alpha in the associated graded."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = {a: c for a, c in terms.items() if not c.is_zero()}

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, GradedSymbol) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for a in sorted(self.terms, key=_alpha_key, reverse=True):
            c = self.terms[a]
            mono = "*".join(f"xi{i + 1}" if k == 1 else f"xi{i + 1}^{k}" for i, k in enumerate(a) if k)
            cs = f"({c})" if isinstance(c, ModPoly) and c.n_terms() > 1 else str(c)
            parts.append(cs if not mono else mono if c == c.ring.one() else f"{cs}*{mono}")
        return " + ".join(parts)


class ConjElement:
    """Element of Lambda_conj = sum_k t^{-pk} O[t] Lambda^{>= pk}.

    Stored as pairs (k, op_k) meaning sum t^{-pk} op_k with op_k over
    F_p[x][t] and op_k in Lambda^{>= pk}; no negative powers are materialized.
    """

    __slots__ = ("ring", "parts")

    def __init__(self, ring: PolyRing, parts):
        if not ring.param:
            raise ContextError("conjugate Rees elements need a ring with parameter t")
        clean = {}
        for k, op in dict(parts).items():
            if op.ring != ring:
                raise ContextError("part lives over another ring")
            if not conj_level_membership(op, k):
                raise PreconditionError(f"part {op} is not in Lambda^(>= {ring.p * k})")
            if not op.is_zero():
                clean[k] = clean[k] + op if k in clean else op
        self.ring = ring
        self.parts = clean

    @classmethod
    def central(cls, ring, i):
        """The formal generator t^{-p} d_i^p."""
        return cls(ring, {1: DiffOp.d(ring, i, ring.p)})

    @classmethod
    def from_op(cls, op: DiffOp):
        return cls(op.ring, {0: op})

    def __mul__(self, other):
        out = {}
        for k, a in self.parts.items():
            for l, b in other.parts.items():
                prod = a * b
                out[k + l] = out[k + l] + prod if k + l in out else prod
        return ConjElement(self.ring, out)

    def scale_t(self, power: int) -> "ConjElement":
        tp = self.ring.t ** power
        return ConjElement(self.ring, {k: op.map_coefficients(lambda c: tp * c, self.ring) for k, op in self.parts.items()})

    def __add__(self, other):
        out = dict(self.parts)
        for k, op in other.parts.items():
            out[k] = out[k] + op if k in out else op
        return ConjElement(self.ring, out)

    def __str__(self):
        return " + ".join(f"t^-{self.ring.p * k}*({op})" if k else f"({op})" for k, op in sorted(self.parts.items())) or "0"


def rees_specialize(a, t0: int):
    """Fibre of a Rees element at t = t0.

    Hodge: t0 != 0 gives an operator in Lambda; t0 = 0 gives the commutative
    symbol in Gr Lambda (the surviving terms are exactly t^|alpha| f d^alpha).
    Conjugate: t0 != 0 gives sum t0^{-pk} op_k(t0); t0 = 0 gives the classes
    {k: op_k(0) mod Lambda^{>= p(k+1)}} in the conjugate associated graded.
    """
    if isinstance(a, HodgeElement):
        if t0 % a.op.ring.p:
            return a.op.eval_param(t0)
        base = a.op.ring.without_param()
        out = {}
        for alpha, c in a.op.terms.items():
            if not isinstance(c, ModPoly):
                raise PreconditionError("graded symbols are formed for scalar operators")
            top = ModPoly.from_terms(base, {e[:-1]: v for e, v in c.terms.items() if e[-1] == sum(alpha)})
            if not top.is_zero():
                out[alpha] = top
        return GradedSymbol(base, out)
    if isinstance(a, ConjElement):
        p = a.ring.p
        if t0 % p:
            acc = None
            for k, op in a.parts.items():
                term = op.eval_param(t0).scale(pow(t0, -p * k, p))
                acc = term if acc is None else acc + term
            return acc if acc is not None else DiffOp.zero(a.ring.without_param())
        out = {}
        for k, op in a.parts.items():
            at0 = op.eval_param(0)
            kept = DiffOp(at0.ring, {al: c for al, c in at0.terms.items() if _floor_weight(al, p) == k}, at0.dim)
            if not kept.is_zero():
                out[k] = kept
        return out
    raise TypeError("expected a HodgeElement or ConjElement")
