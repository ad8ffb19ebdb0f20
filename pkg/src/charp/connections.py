"""Connections, lambda-connections and Higgs fields on an affine patch.

A connection of rank d on F_p[x_1..x_m] is given by matrices A_1..A_m with

    nabla_{d_i} = lam * d_i + A_i,       lam = 1 (DR), 0 (DOL) or t (HOD),

acting on columns of polynomials.  Column j of A_i is nabla_{d_i}(e_j) in the
standard frame e_1..e_d.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arith import ModPoly, PolyMatrix, PolyRing, nullspace_mod_p, rank_mod_p
from .diffops import DiffOp, op_apply
from .errors import (
    ContextError,
    DimensionMismatch,
    FlatSectionError,
    NonLinearPCurvature,
    NotIntegrableError,
    PreconditionError,
)
from .pd import PDElement, PDTensor, comultiply, pd_basis, pd_taylor, quotient_mod_I

__all__ = [
    "DR",
    "DOL",
    "HOD",
    "ConnectionData",
    "Stratification",
    "VectorField",
    "HorizontalField",
    "curvature",
    "is_integrable",
    "p_curvature",
    "taylor_stratification",
    "cocycle_check",
    "horizontal_fields",
    "bracket_closure",
    "p_power_closure",
    "flat_sections",
    "gauge_transform",
    "leibniz_check",
    "frame_matrix",
]

DR, DOL, HOD = "dr", "dol", "hod"
MODES = (DR, DOL, HOD)


@dataclass(frozen=True)
class ConnectionData:
    ring: PolyRing
    rank: int
    mode: str
    matrices: tuple

    def __post_init__(self):
        if self.mode not in MODES:
            raise ContextError(f"unknown mode {self.mode!r}")
        if self.mode == HOD and not self.ring.param:
            raise ContextError("a t-connection needs a ring with parameter t")
        mats = tuple(self.matrices)
        object.__setattr__(self, "matrices", mats)
        if len(mats) != self.ring.nvars:
            raise DimensionMismatch(f"expected {self.ring.nvars} matrices, got {len(mats)}")
        for a in mats:
            if a.shape != (self.rank, self.rank):
                raise DimensionMismatch(f"matrix of shape {a.shape} in a rank {self.rank} connection")
            if a.ring != self.ring:
                raise ContextError("matrix lives over another ring")

    @classmethod
    def trivial(cls, ring: PolyRing, rank: int, mode: str = DR) -> "ConnectionData":
        return cls(ring, rank, mode, [PolyMatrix.zeros(ring, rank)] * ring.nvars)

    @property
    def p(self) -> int:
        return self.ring.p

    def lam(self) -> ModPoly:
        if self.mode == DR:
            return self.ring.one()
        if self.mode == DOL:
            return self.ring.zero()
        return self.ring.t

    def nabla_op(self, i: int) -> DiffOp:
        """lam * d_i * I + A_i as an operator with matrix coefficients."""
        d = self.rank
        alpha = tuple(1 if j == i else 0 for j in range(self.ring.nvars))
        zero = (0,) * self.ring.nvars
        terms = {zero: self.matrices[i]}
        lam = self.lam()
        if not lam.is_zero():
            terms[alpha] = PolyMatrix.identity(self.ring, d).scale_left(lam)
        return DiffOp(self.ring, terms, d)

    def apply(self, i: int, v: PolyMatrix) -> PolyMatrix:
        return op_apply(self.nabla_op(i), v)

    def __str__(self):
        return "; ".join(f"A{i + 1} = {a}" for i, a in enumerate(self.matrices))


def leibniz_check(c: ConnectionData, f: ModPoly, v: PolyMatrix) -> bool:
    """nabla_i(f v) = lam d_i(f) v + f nabla_i(v) for every i."""
    lam = c.lam()
    for i in range(c.ring.nvars):
        lhs = c.apply(i, v.scale_left(f))
        rhs = v.scale_left(lam * f.derive(i)) + c.apply(i, v).scale_left(f)
        if lhs != rhs:
            return False
    return True


def curvature(c: ConnectionData, i: int, j: int) -> PolyMatrix:
    """K_ij = lam d_i(A_j) - lam d_j(A_i) + [A_i, A_j]."""
    if i == j:
        raise PreconditionError("curvature needs two distinct directions")
    ai, aj = c.matrices[i], c.matrices[j]
    lam = c.lam()
    return (aj.derive(i) - ai.derive(j)).scale_left(lam) + ai.commutator(aj)


def is_integrable(c: ConnectionData) -> bool:
    m = c.ring.nvars
    return all(curvature(c, i, j).is_zero() for i in range(m) for j in range(i + 1, m))


def p_curvature(c: ConnectionData):
    """psi(d_i) for each coordinate: the order-0 part of (lam d_i + A_i)^p.

    The expansion is exact; the only other surviving term is lam^p d_i^p,
    which is checked and then discarded since d_i^p kills polynomial sections.
    """
    if c.mode == DOL:
        raise PreconditionError("p-curvature is defined for connections and t-connections")
    p = c.p
    d = c.rank
    out = []
    lam_p = PolyMatrix.identity(c.ring, d).scale_left(c.lam() ** p)
    zero = (0,) * c.ring.nvars
    for i in range(c.ring.nvars):
        power = c.nabla_op(i) ** p
        top = tuple(p if j == i else 0 for j in range(c.ring.nvars))
        for alpha, coeff in power.terms.items():
            if alpha == zero:
                continue
            if alpha != top or coeff != lam_p:
                raise NonLinearPCurvature(f"(nabla_{i + 1})^p has a term {coeff} at d^{alpha}")
        out.append(power.coefficient(zero))
    return out


# ---------------------------------------------------------------------------
# Taylor stratifications
# ---------------------------------------------------------------------------


class Stratification:
    """epsilon(e) = sum_{|alpha| <= n} tau^[alpha] (x) M_alpha e.

    ``blocks`` maps alpha to the d x d matrix M_alpha; M_alpha is the matrix
    of nabla^alpha on the standard frame.
    """

    __slots__ = ("ring", "rank", "level", "blocks")

    def __init__(self, ring: PolyRing, rank: int, level: int, blocks):
        self.ring = ring
        self.rank = rank
        self.level = level
        zero = PolyMatrix.zeros(ring, rank)
        self.blocks = {}
        for k in pd_basis(ring.nvars, level):
            self.blocks[k] = blocks.get(k, zero)

    def epsilon(self) -> PDElement:
        return PDElement(self.ring, self.level, dict(self.blocks))

    def entry(self, i: int, j: int) -> PDElement:
        return self.epsilon().entry(i, j)

    def connection(self) -> ConnectionData:
        """Level-1 truncation read back as connection matrices."""
        m = self.ring.nvars
        if self.level < 1:
            raise PreconditionError("level-0 stratifications carry no connection")
        mats = [self.blocks[tuple(1 if j == i else 0 for j in range(m))] for i in range(m)]
        return ConnectionData(self.ring, self.rank, DR, mats)

    def replace(self, alpha, matrix: PolyMatrix) -> "Stratification":
        b = dict(self.blocks)
        b[tuple(alpha)] = matrix
        return Stratification(self.ring, self.rank, self.level, b)

    def quotient_is_identity(self) -> bool:
        """Whether every entry of epsilon maps to the identity matrix in P/I."""
        d = self.rank
        for i in range(d):
            for j in range(d):
                q = quotient_mod_I(self.entry(i, j))
                want = {(0,) * self.ring.nvars: self.ring.one()} if i == j else {}
                if q.terms != want:
                    return False
        return True

    def __eq__(self, other):
        return isinstance(other, Stratification) and self.level == other.level and self.blocks == other.blocks

    def __hash__(self):
        return hash((self.level, frozenset(self.blocks.items())))

    def __str__(self):
        return str(self.epsilon())


def taylor_stratification(c: ConnectionData, level: int) -> Stratification:
    if c.mode != DR:
        raise PreconditionError("Taylor stratifications are built for DR connections")
    if not is_integrable(c):
        raise NotIntegrableError("connection has nonzero curvature")
    m = c.ring.nvars
    blocks = {(0,) * m: PolyMatrix.identity(c.ring, c.rank)}
    for k in pd_basis(m, level):
        if k in blocks:
            continue
        i = max(j for j in range(m) if k[j])
        parent = k[:i] + (k[i] - 1,) + k[i + 1:]
        blocks[k] = c.apply(i, blocks[parent])
    return Stratification(c.ring, c.rank, level, blocks)


def cocycle_check(s: Stratification) -> bool:
    """epsilon mod tau = id and Delta(epsilon) = (id (x) epsilon) o epsilon.

    In the tensor normal form the right-hand side is
    sum_beta (epsilon * taylor(M_beta)) (x) tau^[beta]: the coefficient M_beta
    produced by the second application sits in the middle and moves left as
    its PD Taylor series.
    """
    zero = (0,) * s.ring.nvars
    if s.blocks[zero] != PolyMatrix.identity(s.ring, s.rank):
        return False
    eps = s.epsilon()
    lhs = comultiply(eps)
    rhs = PDTensor(s.ring, s.level, {})
    for beta, mb in s.blocks.items():
        if mb.is_zero():
            continue
        room = s.level - sum(beta)
        left = eps.truncate(room) * pd_taylor(mb, room)
        rhs = rhs + PDTensor.from_factors(PDElement(s.ring, s.level, left.terms), beta)
    return lhs == rhs


# ---------------------------------------------------------------------------
# horizontal vector fields on the total space
# ---------------------------------------------------------------------------


class VectorField:
    """sum_z c_z d/dz on a polynomial ring; coefficients keyed by variable index."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: PolyRing, coeffs):
        self.ring = ring
        self.coeffs = {i: c for i, c in coeffs.items() if not c.is_zero()}

    def apply(self, f: ModPoly) -> ModPoly:
        acc = self.ring.zero()
        for i, c in self.coeffs.items():
            df = f.derive(i)
            if not df.is_zero():
                acc = acc + c * df
        return acc

    def bracket(self, other: "VectorField") -> "VectorField":
        keys = set(self.coeffs) | set(other.coeffs)
        zero = self.ring.zero()
        return VectorField(
            self.ring,
            {k: self.apply(other.coeffs.get(k, zero)) - other.apply(self.coeffs.get(k, zero)) for k in keys},
        )

    def iterate(self, n: int) -> "VectorField":
        """The derivation whose value on each coordinate is self applied n times."""
        out = {}
        for k in range(self.ring.nvars):
            f = self.ring.gen(k)
            for _ in range(n):
                f = self.apply(f)
            out[k] = f
        return VectorField(self.ring, out)

    def is_zero(self):
        return not self.coeffs

    def __sub__(self, other):
        keys = set(self.coeffs) | set(other.coeffs)
        zero = self.ring.zero()
        return VectorField(self.ring, {k: self.coeffs.get(k, zero) - other.coeffs.get(k, zero) for k in keys})

    def scale_left(self, f):
        return VectorField(self.ring, {k: f * c for k, c in self.coeffs.items()})

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in sorted(self.coeffs):
            c = self.coeffs[k]
            name = self.ring.names[k]
            if c == self.ring.one():
                parts.append(f"d/d{name}")
            elif c.n_terms() > 1:
                parts.append(f"({c}) d/d{name}")
            else:
                parts.append(f"{c} d/d{name}")
        return " + ".join(parts)


def _fibre_names(ring: PolyRing, d: int):
    base = "e"
    while any(f"{base}{j + 1}" in ring.all_names for j in range(d)):
        base = "f" + base
    return [f"{base}{j + 1}" for j in range(d)]


@dataclass(frozen=True)
class HorizontalField:
    connection: ConnectionData
    total: PolyRing
    fields: tuple

    @property
    def base_vars(self) -> int:
        return self.connection.ring.nvars

    def vertical_part(self, v: VectorField) -> VectorField:
        """v minus its projection sum_k v(x_k) H_k: zero iff v lies in the span."""
        acc = v
        for k, h in enumerate(self.fields):
            coef = v.coeffs.get(k)
            if coef is not None:
                acc = acc - h.scale_left(coef)
        return acc

    def __str__(self):
        return "; ".join(f"H{k + 1} = {h}" for k, h in enumerate(self.fields))


def horizontal_fields(c: ConnectionData) -> HorizontalField:
    """H_k = d/dx_k - sum_{i,j} (A_k)_ij e_j d/de_i on the total space."""
    if c.mode != DR:
        raise PreconditionError("horizontal fields are built for DR connections")
    m, d = c.ring.nvars, c.rank
    total = c.ring.extend(_fibre_names(c.ring, d))
    es = [total.gen(m + j) for j in range(d)]
    fields = []
    for k, a in enumerate(c.matrices):
        coeffs = {k: total.one()}
        for i in range(d):
            acc = total.zero()
            for j in range(d):
                if not a[i, j].is_zero():
                    acc = acc + a[i, j].embed(total) * es[j]
            coeffs[m + i] = -acc
        fields.append(VectorField(total, coeffs))
    return HorizontalField(c, total, tuple(fields))


def bracket_closure(h: HorizontalField) -> bool:
    n = len(h.fields)
    for i in range(n):
        for j in range(i + 1, n):
            if not h.vertical_part(h.fields[i].bracket(h.fields[j])).is_zero():
                return False
    return True


def p_power_closure(h: HorizontalField) -> bool:
    p = h.total.p
    return all(h.vertical_part(f.iterate(p)).is_zero() for f in h.fields)


# ---------------------------------------------------------------------------
# gauge transformations and flat sections
# ---------------------------------------------------------------------------


def gauge_transform(c: ConnectionData, s: PolyMatrix) -> ConnectionData:
    """Change of frame e' = e S:  A_i -> S^-1 A_i S + lam S^-1 d_i(S)."""
    if s.shape != (c.rank, c.rank):
        raise DimensionMismatch("gauge matrix has the wrong size")
    sinv = s.inverse()
    lam = c.lam()
    mats = [sinv * a * s + (sinv * s.derive(i)).scale_left(lam) for i, a in enumerate(c.matrices)]
    return ConnectionData(c.ring, c.rank, c.mode, mats)


def _flat_space(c: ConnectionData, degree: int):
    """F_p-basis of the flat columns with entries of degree <= degree."""
    ring, d, p = c.ring, c.rank, c.p
    monos = ring.monomials_up_to(degree)
    index = {(r, mu): n for n, (r, mu) in enumerate((r, mu) for r in range(d) for mu in monos)}
    ncols = len(index)
    eqs = {}
    for (r, mu), col in index.items():
        unit = [ring.zero()] * d
        unit[r] = ring.monomial(mu)
        v = PolyMatrix.column(ring, unit)
        for i in range(ring.nvars):
            image = c.apply(i, v)
            for k in range(d):
                for e, val in image[k, 0].terms.items():
                    eqs.setdefault((i, k, e), {})[col] = val
    rows = []
    for row in eqs.values():
        dense = [0] * ncols
        for col, val in row.items():
            dense[col] = val
        rows.append(dense)
    basis = nullspace_mod_p(rows, ncols, p) if rows else [
        [1 if n == k else 0 for n in range(ncols)] for k in range(ncols)
    ]
    out = []
    for vec in basis:
        entries = []
        for r in range(d):
            entries.append(ModPoly.from_terms(ring, {mu: vec[index[(r, mu)]] for mu in monos}))
        out.append(PolyMatrix.column(ring, entries))
    return out


def _value_at_origin(v: PolyMatrix, p):
    zero = (0,) * v.ring.arity
    return [v[r, 0].terms.get(zero, 0) % p for r in range(v.shape[0])]


def _column_degree(v: PolyMatrix):
    return max((v[r, 0].degree() for r in range(v.shape[0])), default=-1)


def flat_sections(c: ConnectionData, degree_bound: int | None = None):
    """A frame of flat sections with polynomial entries of degree <= degree_bound.

    Degree by degree, a flat section is kept when its value at the origin is
    independent of those already kept; the resulting d x d matrix must have a
    nonzero constant determinant.  Default bound p * (max entry degree + 1).
    """
    if c.mode != DR:
        raise PreconditionError("flat sections are computed for DR connections")
    if not is_integrable(c):
        raise NotIntegrableError("connection has nonzero curvature")
    p, d = c.p, c.rank
    if degree_bound is None:
        top = max((f.degree() for a in c.matrices for f in a.entries()), default=0)
        degree_bound = p * (max(top, 0) + 1)
    chosen, values = [], []
    for deg in range(degree_bound + 1):
        for v in sorted(_flat_space(c, deg), key=_column_degree):
            val = _value_at_origin(v, p)
            if rank_mod_p(values + [val], d, p) > len(values):
                chosen.append(v)
                values.append(val)
            if len(chosen) == d:
                break
        if len(chosen) == d:
            break
    if len(chosen) < d:
        raise FlatSectionError(
            f"found {len(chosen)} independent flat sections of degree <= {degree_bound}, need {d}",
            found=len(chosen),
            rank=d,
        )
    frame = PolyMatrix(c.ring, [[chosen[j][r, 0] for j in range(d)] for r in range(d)])
    det = frame.det()
    if not det.is_constant() or det.is_zero():
        raise FlatSectionError(
            f"flat sections found up to degree {degree_bound} do not form a frame (det = {det})",
            found=d,
            rank=d,
        )
    # constant change of frame so that the frame is the identity at the origin
    at0 = PolyMatrix(c.ring, [_value_at_origin(PolyMatrix.column(c.ring, frame.col(j)), p) for j in range(d)])
    frame = frame * at0.transpose().inverse()
    return [frame.col(j) for j in range(d)]


def frame_matrix(ring: PolyRing, columns) -> PolyMatrix:
    d = len(columns)
    return PolyMatrix(ring, [[columns[j][r] for j in range(d)] for r in range(d)])

