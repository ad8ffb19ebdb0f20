"""Exact arithmetic over F_p and F_p[t]: multivariate polynomials and matrices.

Polynomials live in a :class:`PolyRing`, which fixes the prime, the ordered
coordinate names and an optional deformation parameter ``t``.  The parameter
is an ordinary commuting variable on which no derivation acts.

All values are immutable after construction.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from math import comb

from .errors import ContextError, DimensionMismatch, ParseError, PreconditionError

__all__ = [
    "PolyRing",
    "ModPoly",
    "PolyMatrix",
    "binom_mod_p",
    "pd_coefficient",
    "poly_derive",
    "poly_frobenius",
    "is_prime",
    "nullspace_mod_p",
    "solve_mod_p",
]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def binom_mod_p(n: int, k: int, p: int) -> int:
    """C(n, k) mod p by Lucas' theorem (digit-wise in base p)."""
    if n < 0 or k < 0:
        raise ValueError("binom_mod_p needs nonnegative arguments")
    if k > n:
        return 0
    result = 1
    while n or k:
        n, nd = divmod(n, p)
        k, kd = divmod(k, p)
        if kd > nd:
            return 0
        result = result * comb(nd, kd) % p
    return result


def pd_coefficient(k: int, p: int) -> int:
    """(kp)! / (p!^k k!) mod p, the factor in (x^[p])^[k] = c * x^[pk].

    Uses the multinomial recursion c_k = c_{k-1} * C(kp - 1, p - 1), so no
    factorial is ever formed.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    c = 1
    for j in range(1, k + 1):
        c = c * binom_mod_p(j * p - 1, p - 1, p) % p
    return c


# ---------------------------------------------------------------------------
# rings and polynomials
# ---------------------------------------------------------------------------

_NAME = r"[A-Za-z_][A-Za-z0-9_]*'?"
_TOKEN = re.compile(rf"\s*(?:(\d+)|({_NAME})|(\*\*|[-+*^()]))")


@dataclass(frozen=True)
class PolyRing:
    """F_p[x_1..x_m] or F_p[x_1..x_m][t].

    ``names`` are the coordinates that derivations act on; ``param`` names the
    optional deformation parameter, stored as the last exponent slot.
    """

    p: int
    names: tuple
    param: str | None = None

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ContextError(f"modulus {self.p!r} is not prime")
        object.__setattr__(self, "names", tuple(self.names))
        allnames = self.names + ((self.param,) if self.param else ())
        if len(set(allnames)) != len(allnames):
            raise ContextError("duplicate variable names")
        for n in allnames:
            if not re.fullmatch(_NAME, n):
                raise ContextError(f"bad variable name {n!r}")

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def arity(self) -> int:
        return len(self.names) + (1 if self.param else 0)

    @property
    def all_names(self) -> tuple:
        return self.names + ((self.param,) if self.param else ())

    # constructors -----------------------------------------------------------
    def zero(self) -> "ModPoly":
        return ModPoly(self, {})

    def one(self) -> "ModPoly":
        return self.const(1)

    def const(self, c: int) -> "ModPoly":
        c %= self.p
        return ModPoly(self, {(0,) * self.arity: c} if c else {})

    def gen(self, i: int) -> "ModPoly":
        e = [0] * self.arity
        e[i] = 1
        return ModPoly(self, {tuple(e): 1})

    def var(self, name: str) -> "ModPoly":
        return self.gen(self.all_names.index(name))

    @property
    def t(self) -> "ModPoly":
        if not self.param:
            raise ContextError("ring has no deformation parameter")
        return self.gen(self.arity - 1)

    def monomial(self, exps, c: int = 1) -> "ModPoly":
        exps = tuple(exps)
        if len(exps) != self.arity:
            raise DimensionMismatch("exponent vector has wrong arity")
        c %= self.p
        return ModPoly(self, {exps: c} if c else {})

    def coerce(self, value) -> "ModPoly":
        if isinstance(value, ModPoly):
            if value.ring != self:
                raise ContextError(f"polynomial from {value.ring} used in {self}")
            return value
        if isinstance(value, int):
            return self.const(value)
        if isinstance(value, str):
            return self.parse(value)
        raise TypeError(f"cannot coerce {type(value).__name__} into {self}")

    # derived rings ----------------------------------------------------------
    def with_param(self, param: str = "t") -> "PolyRing":
        return PolyRing(self.p, self.names, param)

    def without_param(self) -> "PolyRing":
        return PolyRing(self.p, self.names, None)

    def twisted(self) -> "PolyRing":
        """Coordinates x_i' on the Frobenius twist X'."""
        return PolyRing(self.p, tuple(n + "'" for n in self.names), self.param)

    def extend(self, extra) -> "PolyRing":
        return PolyRing(self.p, self.names + tuple(extra), self.param)

    def monomials_up_to(self, degree: int):
        """All x-exponent vectors (param slot 0) of total degree <= degree."""
        out = []
        for total in range(degree + 1):
            for combo in itertools.combinations_with_replacement(range(self.nvars), total):
                e = [0] * self.arity
                for i in combo:
                    e[i] += 1
                out.append(tuple(e))
        return out

    # parsing ----------------------------------------------------------------
    def parse(self, text: str) -> "ModPoly":
        """Parse sums/products/powers of integers and variable names."""
        return _Parser(self, text).parse()

    def __str__(self):
        inner = ",".join(self.names)
        s = f"F_{self.p}[{inner}]"
        return s + f"[{self.param}]" if self.param else s


def _grlex_key(exps):
    return (sum(exps), exps)


class ModPoly:
    """Polynomial with coefficients in [0, p); no zero coefficient is stored."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms):
        self.ring = ring
        self.terms = terms
        self._hash = None

    @classmethod
    def from_terms(cls, ring: PolyRing, terms) -> "ModPoly":
        p = ring.p
        clean = {}
        for e, c in dict(terms).items():
            e = tuple(e)
            if len(e) != ring.arity:
                raise DimensionMismatch("exponent vector has wrong arity")
            c %= p
            if c:
                clean[e] = (clean.get(e, 0) + c) % p
                if not clean[e]:
                    del clean[e]
        return cls(ring, clean)

    # basic predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> int:
        return self.terms.get((0,) * self.ring.arity, 0)

    def degree(self) -> int:
        """Total degree in the x-variables and t; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def x_degree(self) -> int:
        n = self.ring.nvars
        return max((sum(e[:n]) for e in self.terms), default=-1)

    def param_valuation(self):
        """Largest k with t^k dividing self, or None for zero."""
        if not self.terms:
            return None
        return min(e[-1] for e in self.terms)

    def coefficient(self, exps) -> int:
        return self.terms.get(tuple(exps), 0)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        if not isinstance(other, ModPoly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    # arithmetic -------------------------------------------------------------
    def _other(self, other):
        if isinstance(other, ModPoly):
            if other.ring != self.ring:
                raise ContextError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, int):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = (out.get(e, 0) + c) % p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return ModPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return ModPoly(self.ring, {e: p - c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c: int) -> "ModPoly":
        p = self.ring.p
        c %= p
        if not c:
            return self.ring.zero()
        return ModPoly(self.ring, {e: v * c % p for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if isinstance(other, PolyMatrix):
            return other.scale_left(self)
        other = self._other(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = (out.get(e, 0) + c1 * c2) % p
        return ModPoly(self.ring, {e: c for e, c in out.items() if c})

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # calculus and Frobenius -------------------------------------------------
    def derive(self, i: int) -> "ModPoly":
        """Partial derivative with respect to the i-th x-coordinate."""
        if not 0 <= i < self.ring.nvars:
            raise PreconditionError(f"no derivation acts on slot {i}")
        p = self.ring.p
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            v = k * c % p
            if v:
                e2 = e[:i] + (k - 1,) + e[i + 1:]
                out[e2] = v
        return ModPoly(self.ring, out)

    def derive_multi(self, alpha) -> "ModPoly":
        f = self
        for i, a in enumerate(alpha):
            for _ in range(a):
                if not f.terms:
                    return f
                f = f.derive(i)
        return f

    def frobenius(self) -> "ModPoly":
        """f^p, computed by x_i -> x_i^p on exponents (coefficients are fixed by Fermat)."""
        p = self.ring.p
        return ModPoly(self.ring, {tuple(a * p for a in e): c for e, c in self.terms.items()})

    def substitute(self, values) -> "ModPoly":
        """Substitute polynomials (or ints) for every slot, in ring order."""
        values = list(values)
        if len(values) != self.ring.arity:
            raise DimensionMismatch("wrong number of substitution values")
        target = None
        for v in values:
            if isinstance(v, ModPoly):
                target = v.ring
                break
        if target is None:
            target = self.ring
        vals = [target.coerce(v) for v in values]
        result = target.zero()
        cache = {}
        for e, c in self.terms.items():
            term = target.const(c)
            for slot, k in enumerate(e):
                if k:
                    key = (slot, k)
                    if key not in cache:
                        cache[key] = vals[slot] ** k
                    term = term * cache[key]
            result = result + term
        return result

    def eval_param(self, value: int) -> "ModPoly":
        """Specialize t to an integer, landing in the ring without parameter."""
        if not self.ring.param:
            raise ContextError("ring has no deformation parameter")
        target = self.ring.without_param()
        p = self.ring.p
        out: dict = {}
        for e, c in self.terms.items():
            v = c * pow(value, e[-1], p) % p if e[-1] else c
            if v:
                out[e[:-1]] = (out.get(e[:-1], 0) + v) % p
        return ModPoly(target, {e: c for e, c in out.items() if c})

    def embed(self, ring: PolyRing) -> "ModPoly":
        """Include into a ring with the same x-names and possibly a parameter."""
        if ring.names[: self.ring.nvars] != self.ring.names or ring.p != self.ring.p:
            raise ContextError(f"cannot embed {self.ring} into {ring}")
        out = {}
        for e, c in self.terms.items():
            xs = e[: self.ring.nvars]
            tpart = e[self.ring.nvars:]
            new = list(xs) + [0] * (ring.nvars - self.ring.nvars)
            if ring.param:
                new.append(tpart[0] if tpart else 0)
            elif tpart and tpart[0]:
                raise ContextError("cannot drop a nonzero parameter power")
            out[tuple(new)] = c
        return ModPoly(ring, out)

    def untwist(self, ring: PolyRing) -> "ModPoly":
        """Relative Frobenius pullback: x_i' -> x_i^p into ``ring``."""
        p = self.ring.p
        n = self.ring.nvars
        out = {}
        for e, c in self.terms.items():
            new = tuple(a * p for a in e[:n]) + tuple(e[n:])
            out[new] = c
        if ring.arity != self.ring.arity:
            raise ContextError("untwist target must have the same arity")
        return ModPoly(ring, out)

    # rendering --------------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def n_terms(self) -> int:
        return len(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.ring.all_names
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for name, k in zip(names, e):
                if k == 1:
                    factors.append(name)
                elif k:
                    factors.append(f"{name}^{k}")
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"ModPoly({self}; {self.ring})"


class _Parser:
    def __init__(self, ring: PolyRing, text: str):
        self.ring = ring
        self.text = text
        self.tokens = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected character {stripped[pos]!r}", column=pos + 1)
            kind = "int" if m.group(1) else "name" if m.group(2) else "op"
            value = m.group(1) or m.group(2) or m.group(3)
            start = m.start(m.lastindex)
            self.tokens.append((kind, value, start + 1))
            pos = m.end()
        self.i = 0

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text) + 1)

    def _take(self):
        tok = self._peek()
        self.i += 1
        return tok

    def _fail(self, msg, col):
        err = ParseError(msg, column=col)
        raise err

    def parse(self) -> ModPoly:
        if not self.tokens:
            self._fail("empty polynomial", 1)
        result = self._sum()
        kind, value, col = self._peek()
        if kind is not None:
            self._fail(f"unexpected token {value!r}", col)
        return result

    def _sum(self):
        sign = 1
        kind, value, _ = self._peek()
        if kind == "op" and value in "+-":
            self._take()
            sign = -1 if value == "-" else 1
        acc = self._product().scale(sign)
        while True:
            kind, value, _ = self._peek()
            if kind == "op" and value in ("+", "-"):
                self._take()
                term = self._product()
                acc = acc + term if value == "+" else acc - term
            else:
                return acc

    def _product(self):
        acc = self._power()
        while True:
            kind, value, _ = self._peek()
            if kind == "op" and value == "*":
                self._take()
                acc = acc * self._power()
            elif kind in ("int", "name") or (kind == "op" and value == "("):
                acc = acc * self._power()
            else:
                return acc

    def _power(self):
        base = self._atom()
        kind, value, col = self._peek()
        if kind == "op" and value in ("^", "**"):
            self._take()
            k2, v2, c2 = self._take()
            if k2 != "int":
                self._fail("exponent must be a nonnegative integer", c2)
            return base ** int(v2)
        return base

    def _atom(self):
        kind, value, col = self._take()
        if kind == "int":
            return self.ring.const(int(value))
        if kind == "name":
            if value not in self.ring.all_names:
                self._fail(f"unknown variable {value!r}", col)
            return self.ring.var(value)
        if kind == "op" and value == "(":
            inner = self._sum()
            k2, v2, c2 = self._take()
            if v2 != ")":
                self._fail("expected ')'", c2)
            return inner
        if kind == "op" and value == "-":
            return -self._atom()
        self._fail("unexpected end of input" if kind is None else f"unexpected token {value!r}", col)


def poly_derive(f: ModPoly, i: int) -> ModPoly:
    return f.derive(i)


def poly_frobenius(f: ModPoly) -> ModPoly:
    return f.frobenius()


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------


class PolyMatrix:
    """Rectangular matrix with ModPoly entries."""

    __slots__ = ("ring", "rows")

    def __init__(self, ring: PolyRing, rows):
        rows = tuple(tuple(ring.coerce(v) for v in r) for r in rows)
        if not rows or any(len(r) != len(rows[0]) for r in rows) or not rows[0]:
            raise DimensionMismatch("matrix must be rectangular and nonempty")
        self.ring = ring
        self.rows = rows

    @classmethod
    def _raw(cls, ring, rows):
        m = object.__new__(cls)
        m.ring = ring
        m.rows = rows
        return m

    @classmethod
    def identity(cls, ring: PolyRing, d: int) -> "PolyMatrix":
        one, zero = ring.one(), ring.zero()
        return cls._raw(ring, tuple(tuple(one if i == j else zero for j in range(d)) for i in range(d)))

    @classmethod
    def zeros(cls, ring: PolyRing, r: int, c: int | None = None) -> "PolyMatrix":
        c = r if c is None else c
        z = ring.zero()
        return cls._raw(ring, tuple((z,) * c for _ in range(r)))

    @classmethod
    def unit(cls, ring: PolyRing, d: int, i: int, j: int, value=1) -> "PolyMatrix":
        """value * E_ij (0-based)."""
        z = ring.zero()
        v = ring.coerce(value)
        return cls._raw(ring, tuple(tuple(v if (a, b) == (i, j) else z for b in range(d)) for a in range(d)))

    @classmethod
    def column(cls, ring: PolyRing, values) -> "PolyMatrix":
        return cls(ring, [[v] for v in values])

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]))

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def entries(self):
        return [v for r in self.rows for v in r]

    def col(self, j: int):
        return [r[j] for r in self.rows]

    def is_zero(self) -> bool:
        return all(v.is_zero() for r in self.rows for v in r)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.ring == other.ring and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def map(self, fn) -> "PolyMatrix":
        return PolyMatrix(self._target_ring(fn), [[fn(v) for v in r] for r in self.rows])

    def _target_ring(self, fn):
        return fn(self.rows[0][0]).ring

    def _check(self, other):
        if not isinstance(other, PolyMatrix):
            raise TypeError("expected PolyMatrix")
        if other.ring != self.ring:
            raise ContextError("ring mismatch")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        return PolyMatrix._raw(self.ring, tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    __radd__ = __add__

    def __neg__(self):
        return PolyMatrix._raw(self.ring, tuple(tuple(-a for a in r) for r in self.rows))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int) -> "PolyMatrix":
        return PolyMatrix._raw(self.ring, tuple(tuple(a.scale(c) for a in r) for r in self.rows))

    def scale_left(self, f: ModPoly) -> "PolyMatrix":
        return PolyMatrix._raw(self.ring, tuple(tuple(f * a for a in r) for r in self.rows))

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if isinstance(other, ModPoly):
            return self.scale_left(other)
        self._check(other)
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        zero = self.ring.zero()
        cols = [other.col(j) for j in range(m)]
        rows = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = zero
                for a, b in zip(r, c):
                    if a.terms and b.terms:
                        acc = acc + a * b
                row.append(acc)
            rows.append(tuple(row))
        return PolyMatrix._raw(self.ring, tuple(rows))

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        d = self.shape[0]
        out = PolyMatrix.identity(self.ring, d)
        for _ in range(n):
            out = out * self
        return out

    def commutator(self, other) -> "PolyMatrix":
        return self * other - other * self

    def derive(self, i: int) -> "PolyMatrix":
        return PolyMatrix._raw(self.ring, tuple(tuple(a.derive(i) for a in r) for r in self.rows))

    def derive_multi(self, alpha) -> "PolyMatrix":
        return PolyMatrix._raw(self.ring, tuple(tuple(a.derive_multi(alpha) for a in r) for r in self.rows))

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix._raw(self.ring, tuple(zip(*self.rows)))

    def eval_param(self, value: int) -> "PolyMatrix":
        return self.map(lambda f: f.eval_param(value))

    def embed(self, ring: PolyRing) -> "PolyMatrix":
        return self.map(lambda f: f.embed(ring))

    def untwist(self, ring: PolyRing) -> "PolyMatrix":
        return self.map(lambda f: f.untwist(ring))

    def det(self) -> ModPoly:
        n, m = self.shape
        if n != m:
            raise DimensionMismatch("determinant of a non-square matrix")
        return _det([list(r) for r in self.rows], self.ring)

    def inverse(self) -> "PolyMatrix":
        """Inverse of a matrix whose determinant is a nonzero constant."""
        d = self.det()
        if d.is_zero() or not d.is_constant():
            raise PreconditionError("matrix is not invertible over the polynomial ring")
        inv = pow(d.constant_value(), -1, self.ring.p)
        n = self.shape[0]
        if n == 1:
            return PolyMatrix._raw(self.ring, ((self.ring.const(inv),),))
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                minor = [
                    [self.rows[a][b] for b in range(n) if b != i]
                    for a in range(n) if a != j
                ]
                cof = _det(minor, self.ring)
                if (i + j) % 2:
                    cof = -cof
                row.append(cof.scale(inv))
            rows.append(tuple(row))
        return PolyMatrix._raw(self.ring, tuple(rows))

    def __str__(self):
        if self.shape == (1, 1):
            return str(self.rows[0][0])
        return "[" + ", ".join("[" + ", ".join(str(v) for v in r) + "]" for r in self.rows) + "]"

    def __repr__(self):
        return f"PolyMatrix({self})"


def _det(rows, ring):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    acc = ring.zero()
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det(minor, ring)
        acc = acc - term if j % 2 else acc + term
    return acc


# ---------------------------------------------------------------------------
# dense linear algebra over F_p
# ---------------------------------------------------------------------------


def _rref(rows, p, ncols):
    rows = [[v % p for v in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [v * inv % p for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def nullspace_mod_p(rows, ncols: int, p: int):
    """Basis of {v : A v = 0} for a dense integer matrix A (list of rows)."""
    red, pivots = _rref(rows, p, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(red, pivots):
            v[pc] = (-row[f]) % p
        basis.append(v)
    return basis


def solve_mod_p(rows, rhs, ncols: int, p: int):
    """One solution of A v = b, or None when the system is inconsistent."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = _rref(aug, p, ncols + 1)
    if ncols in pivots:
        return None
    v = [0] * ncols
    for row, pc in zip(red, pivots):
        v[pc] = row[ncols]
    return v


def rank_mod_p(rows, ncols: int, p: int) -> int:
    return len(_rref(rows, p, ncols)[1])
