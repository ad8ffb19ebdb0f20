"""Rees modules of filtered connections, Griffiths transversality, the
conjugate condition on triples (V, nabla, psi), the filtration compatibility
of theta, and the nilpotent Higgs deformation over F_p[x][t].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

from .arith import PolyMatrix, PolyRing, rank_mod_p
from .connections import DOL, DR, ConnectionData, is_integrable, p_curvature
from .errors import DimensionMismatch, NotIntegrableError, PreconditionError
from .frobenius import CartierSplitting, theta_map
from .pd import PDElement, pd_basis

__all__ = [
    "PRESERVES",
    "GRIFFITHS",
    "NEITHER",
    "FilteredModule",
    "ReesModule",
    "GradedHiggs",
    "ConjTriple",
    "DeformResult",
    "rees_build",
    "rees_fiber",
    "rees_connection",
    "griffiths_check",
    "associated_higgs",
    "mconj_member",
    "conj_deform",
    "conj_index",
    "theta_rees_compat",
]

PRESERVES, GRIFFITHS, NEITHER = "PRESERVES", "GRIFFITHS", "NEITHER"


# ---------------------------------------------------------------------------
# filtered modules and their Rees modules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FilteredModule:
    """F^0 = V ⊇ F^1 ⊇ ... by constant free summands, given by an adapted basis.

    ``basis[j]`` is a constant column and ``weights[j]`` the largest n with
    basis[j] in F^n, so F^n = span{basis[j] : weights[j] >= n}.
    """

    p: int
    basis: tuple
    weights: tuple

    def __post_init__(self):
        basis = tuple(tuple(v % self.p for v in col) for col in self.basis)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "weights", tuple(self.weights))
        d = len(basis)
        if len(self.weights) != d or any(len(v) != d for v in basis):
            raise DimensionMismatch("need d basis columns of length d and d weights")
        if any(w < 0 for w in self.weights):
            raise PreconditionError("filtration weights are nonnegative")
        if rank_mod_p([list(v) for v in basis], d, self.p) != d:
            raise PreconditionError("adapted basis is not a basis")

    @classmethod
    def trivial(cls, p: int, rank: int) -> "FilteredModule":
        return cls(p, [[1 if i == j else 0 for i in range(rank)] for j in range(rank)], [0] * rank)

    @classmethod
    def from_steps(cls, p: int, rank: int, steps) -> "FilteredModule":
        """steps[n] spans F^n (n >= 1); F^0 is everything and steps must be nested."""
        steps = [list(map(list, s)) for s in steps]
        basis, weights = [], []
        for n in range(len(steps), 0, -1):
            for v in steps[n - 1]:
                v = [a % p for a in v]
                if rank_mod_p([list(b) for b in basis] + [v], rank, p) > len(basis):
                    basis.append(v)
                    weights.append(n)
            # nestedness: everything chosen so far must lie in span(steps[n-1])
            span = rank_mod_p(steps[n - 1], rank, p) if steps[n - 1] else 0
            if rank_mod_p(steps[n - 1] + basis, rank, p) != span:
                raise PreconditionError(f"F^{n + 1} is not contained in F^{n}")
        for i in range(rank):
            e = [1 if k == i else 0 for k in range(rank)]
            if rank_mod_p(basis + [e], rank, p) > len(basis):
                basis.append(e)
                weights.append(0)
        return cls(p, basis, weights)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def step(self, n: int):
        return [list(v) for v, w in zip(self.basis, self.weights) if w >= n]

    def basis_matrix(self, ring: PolyRing) -> PolyMatrix:
        d = self.rank
        return PolyMatrix(ring, [[self.basis[j][i] for j in range(d)] for i in range(d)])


@dataclass(frozen=True)
class ReesModule:
    """Free F_p[t, t^-1]-lattice spanned by the generators t^(-w_j) v_j.

    Stored as the adapted basis and the shifts w_j; no negative powers are
    materialized.
    """

    filtered: FilteredModule

    @property
    def generators(self):
        return [(-w, v) for v, w in zip(self.filtered.basis, self.filtered.weights)]

    def is_free(self) -> bool:
        """The generators are independent over F_p[t] (no t-torsion relation)."""
        f = self.filtered
        return rank_mod_p([list(v) for v in f.basis], f.rank, f.p) == f.rank

    def __str__(self):
        return ", ".join(f"t^{e}*{list(v)}" if e else str(list(v)) for e, v in self.generators)


def rees_build(v: FilteredModule) -> ReesModule:
    return ReesModule(v)


def rees_fiber(r: ReesModule, t0: int):
    """t0 != 0: the basis of V (as columns); t0 = 0: {n: basis of gr^n}."""
    f = r.filtered
    if t0 % f.p:
        return [list(v) for v in f.basis]
    out = {}
    for v, w in zip(f.basis, f.weights):
        out.setdefault(w, []).append(list(v))
    return dict(sorted(out.items()))


def _adapted_matrices(v: FilteredModule, c: ConnectionData):
    if v.rank != c.rank or v.p != c.p:
        raise DimensionMismatch("filtration and connection disagree on rank or prime")
    pm = v.basis_matrix(c.ring)
    pinv = pm.inverse()
    return [pinv * a * pm for a in c.matrices]


def rees_connection(v: FilteredModule, c: ConnectionData, scale: int = 0):
    """Matrices of t^scale * nabla on the Rees generators g_j = t^(-w_j) v_j.

    t^scale nabla(g_j) = sum_k A'_kj t^(scale + w_k - w_j) g_k with A' the
    connection in the adapted basis.  Returns the matrices over F_p[x][t], or
    None if some exponent is negative (the generators leave the Rees module).
    """
    rt = c.ring.with_param() if not c.ring.param else c.ring
    out = []
    w = v.weights
    for a in _adapted_matrices(v, c):
        rows = []
        for k in range(v.rank):
            row = []
            for j in range(v.rank):
                entry = a[k, j]
                if entry.is_zero():
                    row.append(rt.zero())
                    continue
                e = scale + w[k] - w[j]
                if e < 0:
                    return None
                row.append(entry.embed(rt) * rt.t ** e)
            rows.append(row)
        out.append(PolyMatrix(rt, rows))
    return out


def griffiths_check(v: FilteredModule, c: ConnectionData) -> str:
    if c.mode != DR:
        raise PreconditionError("Griffiths transversality is checked for DR connections")
    if not is_integrable(c):
        raise NotIntegrableError("connection has nonzero curvature")
    worst = 0
    w = v.weights
    for a in _adapted_matrices(v, c):
        for k in range(v.rank):
            for j in range(v.rank):
                if not a[k, j].is_zero():
                    worst = max(worst, w[j] - w[k])
    if worst <= 0:
        return PRESERVES
    if worst == 1:
        return GRIFFITHS
    return NEITHER


@dataclass(frozen=True)
class GradedHiggs:
    """O-linear maps gr^n -> gr^(n-1) (x) Omega in the adapted basis."""

    weights: tuple
    matrices: tuple

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.matrices)

    def __str__(self):
        return "; ".join(f"theta{i + 1} = {m}" for i, m in enumerate(self.matrices))


def associated_higgs(v: FilteredModule, c: ConnectionData) -> GradedHiggs:
    """t * nabla on the Rees module, specialized at t = 0."""
    if c.mode == DOL:
        return GradedHiggs(v.weights, tuple(c.matrices))
    mats = rees_connection(v, c, scale=1)
    if mats is None:
        raise PreconditionError("connection is not Griffiths transverse to the filtration")
    return GradedHiggs(v.weights, tuple(m.eval_param(0) for m in mats))


# ---------------------------------------------------------------------------
# the conjugate condition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConjTriple:
    """(V, nabla, psi) over F_p[x][t]: nabla a connection, psi F-Higgs matrices."""

    connection: ConnectionData
    psi: tuple

    def __post_init__(self):
        object.__setattr__(self, "psi", tuple(self.psi))
        c = self.connection
        if not c.ring.param:
            raise PreconditionError("triples live over F_p[x][t]")
        if len(self.psi) != c.ring.nvars:
            raise DimensionMismatch("one psi matrix per coordinate")
        for a in self.psi:
            if a.ring != c.ring or a.shape != (c.rank, c.rank):
                raise DimensionMismatch("psi matrices must match the connection")

    def psi_commute(self) -> bool:
        return all(a.commutator(b).is_zero() for a in self.psi for b in self.psi)


def mconj_member(tr: ConjTriple) -> bool:
    """p-curvature of nabla equals t^p psi, as matrices over F_p[x][t]."""
    c = tr.connection
    if not is_integrable(c):
        raise NotIntegrableError("connection has nonzero curvature")
    if not tr.psi_commute():
        return False
    tp = c.ring.t ** c.p
    return all(got == want.scale_left(tp) for got, want in zip(p_curvature(c), tr.psi))


def _t_valuation(mats):
    vals = [f.param_valuation() for m in mats for f in m.entries() if not f.is_zero()]
    return min(vals) if vals else None


@dataclass(frozen=True)
class DeformResult:
    triple: ConjTriple
    exponent: int
    kappa: int
    pulled_higgs: tuple
    p_curvature: tuple
    measured_exponent: int | None
    integrable: bool
    raw_match: bool
    normalized_match: bool
    member: bool
    notes: tuple = field(default=())


def conj_deform(higgs, splitting: CartierSplitting, exponent: int | None = None, param: str = "t") -> DeformResult:
    """nabla = nabla_can + t^e zeta(F^* psi) on F^*E' over F_p[x][t].

    ``higgs`` are the matrices B_i' of psi' = sum B_i' dx_i' over the twist;
    they must commute pairwise and satisfy B_i'^p = 0.  The connection matrix
    in direction j is t^e sum_i B_i(x^p) zeta_ij with zeta(dx_i') = sum_j zeta_ij dx_j.
    Reports p-curvature compared with t^e F^*psi (raw) and with t^e kappa F^*psi
    (normalized), kappa = (p-1)! mod p, and the measured t-valuation.
    """
    ring = splitting.ring
    p, m = ring.p, ring.nvars
    e = p if exponent is None else exponent
    if e < 0:
        raise PreconditionError("t-exponent must be nonnegative")
    higgs = tuple(higgs)
    if len(higgs) != m:
        raise DimensionMismatch("one Higgs matrix per coordinate")
    d = higgs[0].shape[0]
    for a in higgs:
        for b in higgs:
            if not a.commutator(b).is_zero():
                raise PreconditionError("Higgs matrices do not commute")
        if not (a ** p).is_zero():
            raise PreconditionError("Higgs matrix is not nilpotent of exponent <= p-1")
    rt = ring.with_param(param)
    pulled = tuple(b.untwist(ring).embed(rt) for b in higgs)
    te = rt.t ** e
    mats = []
    for j in range(m):
        acc = PolyMatrix.zeros(rt, d)
        for i in range(m):
            z = splitting.images[i].coeffs[j]
            if not z.is_zero():
                acc = acc + pulled[i].scale_left(z.embed(rt))
        mats.append(acc.scale_left(te))
    conn = ConnectionData(rt, d, DR, mats)
    integrable = is_integrable(conn)
    if not integrable:
        raise NotIntegrableError("deformed connection is not integrable")
    kappa = factorial(p - 1) % p
    psi = p_curvature(conn)
    raw = all(a == b.scale_left(te) for a, b in zip(psi, pulled))
    normalized = all(a == b.scale_left(te).scale(kappa) for a, b in zip(psi, pulled))
    triple = ConjTriple(conn, tuple(b.scale(kappa) for b in pulled))
    member = mconj_member(triple)
    return DeformResult(
        triple=triple,
        exponent=e,
        kappa=kappa,
        pulled_higgs=pulled,
        p_curvature=tuple(psi),
        measured_exponent=_t_valuation(psi),
        integrable=integrable,
        raw_match=raw,
        normalized_match=normalized,
        member=member,
    )


# ---------------------------------------------------------------------------
# theta and the conjugate filtration on P
# ---------------------------------------------------------------------------


def conj_index(k, p: int) -> int:
    """sum floor(k_i / p): tau^[k] lies in P^{<pr} exactly when this is < r."""
    return sum(a // p for a in k)


@dataclass(frozen=True)
class ThetaReesReport:
    r_max: int
    level: int
    checked: int
    ok: bool
    failures: tuple = ()

    def __bool__(self):
        return self.ok


def theta_rees_compat(ring: PolyRing, r_max: int = 3, level: int | None = None) -> ThetaReesReport:
    """theta(P^{<pr}) lies in F_r (graded weight < r) for r <= r_max.

    Every PD monomial in some P^{<pr}, r <= r_max, has degree at most
    (r_max - 1) p + m (p - 1), which is the default level.
    """
    p, m = ring.p, ring.nvars
    if level is None:
        level = (r_max - 1) * p + m * (p - 1)
    failures = []
    checked = 0
    for k in pd_basis(m, level):
        idx = conj_index(k, p)
        if idx >= r_max:
            continue
        img = theta_map(PDElement.monomial(ring, k, level))
        wt = img.weight()
        for r in range(idx + 1, r_max + 1):
            checked += 1
            if wt is not None and wt >= r:
                failures.append((k, r))
    return ThetaReesReport(r_max, level, checked, not failures, tuple(failures))
