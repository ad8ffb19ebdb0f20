"""Truncated divided-power algebra of the diagonal.

``PDElement`` represents  sum_k f_k(x) * tau^[k]  in  P^n = O<tau_1..tau_m> / J^[n+1],
with the left O-module structure.  Coefficients are ModPoly, or PolyMatrix
when an element carries a stratification.

``PDTensor`` is the normal form of  P^n (x)_{2,O,1} P^n : every coefficient is
pushed to the far left, using the PD Taylor series for whatever enters the
middle of the tensor.
"""

from __future__ import annotations

import itertools

from .arith import ModPoly, PolyMatrix, PolyRing, binom_mod_p
from .errors import ContextError, LevelMismatch

__all__ = [
    "PDElement",
    "PDTensor",
    "GammaElement",
    "GammaTensor",
    "pd_mul",
    "pd_taylor",
    "comultiply",
    "quotient_mod_I",
    "pd_basis",
]


def pd_basis(nvars: int, level: int):
    """Multi-indices k with |k| <= level, graded."""
    out = []
    for total in range(level + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), total):
            k = [0] * nvars
            for i in combo:
                k[i] += 1
            out.append(tuple(k))
    return out


def _coeff_zero(c) -> bool:
    return c.is_zero()


def _binom_multi(a, b, p) -> int:
    """prod_i C(a_i + b_i, a_i) mod p."""
    c = 1
    for x, y in zip(a, b):
        if x and y:
            c = c * binom_mod_p(x + y, x, p) % p
            if not c:
                return 0
    return c


def _render_pd_monomial(k, prefix="T"):
    return "".join(f"{prefix}{i + 1}^[{a}]" for i, a in enumerate(k) if a)


def _render_coeff(c):
    s = str(c)
    if isinstance(c, ModPoly) and c.n_terms() > 1:
        return f"({s})"
    if not isinstance(c, ModPoly) and c.shape == (1, 1) and c[0, 0].n_terms() > 1:
        return f"({s})"
    return s


def _render_terms(items, monomial):
    if not items:
        return "0"
    parts = []
    for key, c in items:
        mono = monomial(key)
        if not mono:
            parts.append(str(c) if not isinstance(c, ModPoly) or c.n_terms() == 1 else _render_coeff(c))
        elif str(c) == "1":
            parts.append(mono)
        else:
            parts.append(f"{_render_coeff(c)}*{mono}")
    return " + ".join(parts)


def _grlex_desc(keys):
    return sorted(keys, key=lambda k: (sum(k), k), reverse=True)


class PDElement:
    __slots__ = ("ring", "level", "terms")

    def __init__(self, ring: PolyRing, level: int, terms):
        if level < 0:
            raise LevelMismatch("level must be nonnegative")
        self.ring = ring
        self.level = level
        self.terms = {k: c for k, c in terms.items() if not _coeff_zero(c) and sum(k) <= level}

    # constructors -----------------------------------------------------------
    @classmethod
    def zero(cls, ring, level):
        return cls(ring, level, {})

    @classmethod
    def monomial(cls, ring: PolyRing, k, level: int, coeff=1) -> "PDElement":
        k = tuple(k)
        if len(k) != ring.nvars:
            raise LevelMismatch("PD multi-index has wrong arity")
        c = coeff if isinstance(coeff, PolyMatrix) else ring.coerce(coeff)
        return cls(ring, level, {k: c})

    @classmethod
    def tau(cls, ring: PolyRing, i: int, level: int, power: int = 1) -> "PDElement":
        k = [0] * ring.nvars
        k[i] = power
        return cls.monomial(ring, k, level)

    @classmethod
    def constant(cls, ring, level, coeff):
        return cls.monomial(ring, (0,) * ring.nvars, level, coeff)

    # structure --------------------------------------------------------------
    @property
    def nvars(self):
        return self.ring.nvars

    def coefficient(self, k):
        k = tuple(k)
        if k in self.terms:
            return self.terms[k]
        return None

    def constant_term(self):
        return self.terms.get((0,) * self.nvars)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, PDElement):
            return NotImplemented
        return self.ring == other.ring and self.level == other.level and self.terms == other.terms

    def __hash__(self):
        return hash((self.level, frozenset(self.terms.items())))

    def truncate(self, level: int) -> "PDElement":
        return PDElement(self.ring, level, self.terms)

    def _check(self, other):
        if not isinstance(other, PDElement):
            raise TypeError("expected PDElement")
        if other.ring != self.ring:
            raise ContextError("ring mismatch")
        if other.level != self.level:
            raise LevelMismatch(f"levels {self.level} and {other.level} differ")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return PDElement(self.ring, self.level, out)

    def __neg__(self):
        return PDElement(self.ring, self.level, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale_left(self, f) -> "PDElement":
        """Left O-action (f may also be a constant matrix or an int)."""
        return PDElement(self.ring, self.level, {k: f * c for k, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, PDElement):
            return pd_mul(self, other)
        return NotImplemented

    def map_coefficients(self, fn) -> "PDElement":
        ring = None
        out = {}
        for k, c in self.terms.items():
            out[k] = fn(c)
            ring = ring or getattr(out[k], "ring", None)
        return PDElement(ring or self.ring, self.level, out)

    def entry(self, i: int, j: int) -> "PDElement":
        """Scalar PD element sitting in entry (i, j) of a matrix-valued element."""
        return PDElement(self.ring, self.level, {k: c[i, j] for k, c in self.terms.items()})

    def sorted_terms(self):
        return [(k, self.terms[k]) for k in _grlex_desc(self.terms)]

    def __str__(self):
        return _render_terms(self.sorted_terms(), _render_pd_monomial)

    def __repr__(self):
        return f"PDElement({self}; level={self.level})"


def pd_mul(a: PDElement, b: PDElement) -> PDElement:
    """Product in P^n: tau^[a] tau^[b] = prod C(a_i+b_i, a_i) tau^[a+b], truncated."""
    a._check(b)
    p = a.ring.p
    n = a.level
    out: dict = {}
    for ka, ca in a.terms.items():
        da = sum(ka)
        for kb, cb in b.terms.items():
            if da + sum(kb) > n:
                continue
            c = _binom_multi(ka, kb, p)
            if not c:
                continue
            k = tuple(x + y for x, y in zip(ka, kb))
            term = (ca * cb).scale(c) if c != 1 else ca * cb
            out[k] = out[k] + term if k in out else term
    return PDElement(a.ring, n, out)


def pd_taylor(g, level: int) -> PDElement:
    """g(x + tau) = sum_{|k| <= level} d^k(g) tau^[k]  (iterated derivatives, no factorials)."""
    ring = g.ring
    m = ring.nvars
    out = {}
    # walk multi-indices breadth-first so each derivative reuses its parent
    derivs = {(0,) * m: g}
    for k in pd_basis(m, level):
        if k not in derivs:
            # parent: decrease the last nonzero slot
            i = max(j for j in range(m) if k[j])
            parent = k[:i] + (k[i] - 1,) + k[i + 1:]
            derivs[k] = derivs[parent].derive(i)
        d = derivs[k]
        if not d.is_zero():
            out[k] = d
    return PDElement(ring, level, out)


# ---------------------------------------------------------------------------
# tensor square
# ---------------------------------------------------------------------------


class PDTensor:
    """sum f(x) * tau^[i] (x) tau^[j] with coefficients on the far left."""

    __slots__ = ("ring", "level", "terms")

    def __init__(self, ring: PolyRing, level: int, terms):
        self.ring = ring
        self.level = level
        self.terms = {
            kl: c for kl, c in terms.items()
            if not _coeff_zero(c) and sum(kl[0]) + sum(kl[1]) <= level
        }

    def __eq__(self, other):
        if not isinstance(other, PDTensor):
            return NotImplemented
        return self.ring == other.ring and self.level == other.level and self.terms == other.terms

    def __hash__(self):
        return hash((self.level, frozenset(self.terms.items())))

    def __add__(self, other):
        if other.level != self.level:
            raise LevelMismatch("tensor levels differ")
        out = dict(self.terms)
        for kl, c in other.terms.items():
            out[kl] = out[kl] + c if kl in out else c
        return PDTensor(self.ring, self.level, out)

    def __sub__(self, other):
        return self + PDTensor(other.ring, other.level, {kl: -c for kl, c in other.terms.items()})

    def is_zero(self):
        return not self.terms

    @classmethod
    def from_factors(cls, left: PDElement, right_monomial, coeff_right=None) -> "PDTensor":
        """left (x) c * tau^[j]: the right coefficient c is moved across the middle."""
        if coeff_right is not None:
            left = left * pd_taylor(coeff_right, left.level)
        out = {}
        for k, c in left.terms.items():
            out[(k, tuple(right_monomial))] = c
        return cls(left.ring, left.level, out)

    def mul_right_coefficient(self, g) -> "PDTensor":
        """Act by g on the right factor, then rewrite to normal form.

        a (x) g*b  =  a * g(x + tau_(1)) (x) b.
        """
        taylor = pd_taylor(g, self.level)
        out: dict = {}
        for (k, l), c in self.terms.items():
            left = PDElement.monomial(self.ring, k, self.level, c) * taylor
            for k2, c2 in left.terms.items():
                key = (k2, l)
                out[key] = out[key] + c2 if key in out else c2
        return PDTensor(self.ring, self.level, out)

    def counit_left(self) -> PDElement:
        """Kill every tau in the left factor."""
        zero = (0,) * self.ring.nvars
        return PDElement(self.ring, self.level, {l: c for (k, l), c in self.terms.items() if k == zero})

    def counit_right(self) -> PDElement:
        zero = (0,) * self.ring.nvars
        return PDElement(self.ring, self.level, {k: c for (k, l), c in self.terms.items() if l == zero})

    def __str__(self):
        if not self.terms:
            return "0"
        keys = sorted(self.terms, key=lambda kl: (sum(kl[0]) + sum(kl[1]), kl), reverse=True)
        parts = []
        for k, l in keys:
            c = self.terms[(k, l)]
            left = _render_pd_monomial(k) or "1"
            right = _render_pd_monomial(l) or "1"
            if isinstance(c, ModPoly) and c == c.ring.one():
                parts.append(f"{left} (x) {right}")
            else:
                parts.append(f"{_render_coeff(c)}*{left} (x) {right}")
        return " + ".join(parts)

    def __repr__(self):
        return f"PDTensor({self})"


def _splits(k):
    """All (i, j) with i + j = k componentwise."""
    ranges = [range(a + 1) for a in k]
    for i in itertools.product(*ranges):
        yield i, tuple(a - b for a, b in zip(k, i))


def comultiply(a: PDElement) -> PDTensor:
    """Delta(f tau^[n]) = f * sum_{i+j=n} tau^[i] (x) tau^[j]."""
    out: dict = {}
    for k, c in a.terms.items():
        for i, j in _splits(k):
            key = (i, j)
            out[key] = out[key] + c if key in out else c
    return PDTensor(a.ring, a.level, out)


# ---------------------------------------------------------------------------
# the quotient P / I and its divided-power presentation
# ---------------------------------------------------------------------------


class GammaElement:
    """sum f(x) * g^[k] in a free divided-power algebra O<g_1..g_m>.

    ``label`` is a format string producing the name of generator i (1-based),
    e.g. ``"T{i}^[p]"`` for tau_i^[p] in P/I or ``"dx{i}'"`` on the Frobenius
    twist side.
    """

    __slots__ = ("ring", "level", "terms", "label")

    def __init__(self, ring: PolyRing, level: int, terms, label: str = "g{i}"):
        self.ring = ring
        self.level = level
        self.label = label
        self.terms = {k: c for k, c in terms.items() if not _coeff_zero(c) and sum(k) <= level}

    def __eq__(self, other):
        if not isinstance(other, GammaElement):
            return NotImplemented
        return (self.ring, self.level, self.terms) == (other.ring, other.level, other.terms)

    def __hash__(self):
        return hash((self.level, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms

    def weight(self):
        """Largest graded degree present, or None for zero."""
        return max((sum(k) for k in self.terms), default=None)

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return GammaElement(self.ring, self.level, out, self.label)

    def __mul__(self, other):
        p = self.ring.p
        out: dict = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                if sum(ka) + sum(kb) > self.level:
                    continue
                c = _binom_multi(ka, kb, p)
                if c:
                    k = tuple(x + y for x, y in zip(ka, kb))
                    term = (ca * cb).scale(c)
                    out[k] = out[k] + term if k in out else term
        return GammaElement(self.ring, self.level, out, self.label)

    def relabel(self, label: str) -> "GammaElement":
        return GammaElement(self.ring, self.level, self.terms, label)

    def comultiply(self) -> "GammaTensor":
        out: dict = {}
        for k, c in self.terms.items():
            for i, j in _splits(k):
                out[(i, j)] = out[(i, j)] + c if (i, j) in out else c
        return GammaTensor(self.ring, self.level, out, self.label)

    def counit(self):
        return self.terms.get((0,) * self.ring.nvars)

    def _mono(self, k):
        return "".join(
            f"{self.label.format(i=i + 1)}^[{a}]" if "^" not in self.label else f"({self.label.format(i=i + 1)})^[{a}]"
            for i, a in enumerate(k) if a
        )

    def __str__(self):
        return _render_terms([(k, self.terms[k]) for k in _grlex_desc(self.terms)], self._mono)

    def __repr__(self):
        return f"GammaElement({self})"


class GammaTensor:
    __slots__ = ("ring", "level", "terms", "label")

    def __init__(self, ring, level, terms, label="g{i}"):
        self.ring = ring
        self.level = level
        self.label = label
        self.terms = {kl: c for kl, c in terms.items() if not _coeff_zero(c)}

    def __eq__(self, other):
        if not isinstance(other, GammaTensor):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        g = GammaElement(self.ring, self.level, {}, self.label)
        parts = []
        for (k, l) in sorted(self.terms, reverse=True):
            c = self.terms[(k, l)]
            left, right = g._mono(k) or "1", g._mono(l) or "1"
            pre = "" if isinstance(c, ModPoly) and c == c.ring.one() else f"{_render_coeff(c)}*"
            parts.append(f"{pre}{left} (x) {right}")
        return " + ".join(parts) or "0"


def quotient_mod_I(a: PDElement, label: str | None = None) -> GammaElement:
    """Image in P/I = O<tau_1^[p], ..., tau_m^[p]>.

    tau^[k] survives only when every k_i is divisible by p; the survivor
    tau^[pk] is identified with (tau^[p])^[k], the two differing by
    prod pd_coefficient(k_i) which is 1 mod p.
    """
    p = a.ring.p
    if label is None:
        label = f"T{{i}}^[{p}]"
    out = {}
    for k, c in a.terms.items():
        if all(x % p == 0 for x in k):
            out[tuple(x // p for x in k)] = c
    return GammaElement(a.ring, a.level // p, out, label)
