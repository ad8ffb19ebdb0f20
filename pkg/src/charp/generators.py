"""Seeded random instances: connections of several kinds, filtrations,
Frobenius lifts and nilpotent Higgs data.  Every function takes a
``random.Random`` so that corpora are reproducible from one seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .arith import ModPoly, PolyMatrix, PolyRing
from .connections import DR, ConnectionData, gauge_transform
from .diffops import DiffOp, Derivation, HodgeElement
from .rees import FilteredModule

__all__ = [
    "Instance",
    "random_poly",
    "random_derivation",
    "random_operator",
    "elementary_gauge",
    "gauge_flat",
    "twisted_flat",
    "separable",
    "unstructured",
    "connection_corpus",
    "random_filtration",
    "filtered_connection",
    "random_lift",
    "nilpotent_higgs",
    "random_hodge_element",
]


@dataclass(frozen=True)
class Instance:
    kind: str
    connection: ConnectionData
    gauge: PolyMatrix | None = None


def random_poly(ring: PolyRing, rng: random.Random, degree: int = 3, terms: int = 3, zero_ok: bool = True) -> ModPoly:
    monos = ring.monomials_up_to(degree)
    out = {}
    for _ in range(rng.randint(0 if zero_ok else 1, terms)):
        e = rng.choice(monos)
        out[e] = (out.get(e, 0) + rng.randrange(1, ring.p)) % ring.p
    f = ModPoly.from_terms(ring, out)
    if not zero_ok and f.is_zero():
        return ring.monomial(rng.choice(monos))
    return f


def random_derivation(ring, rng, degree=2) -> Derivation:
    return Derivation(ring, [random_poly(ring, rng, degree) for _ in range(ring.nvars)])


def random_operator(ring, rng, order=3, degree=2, terms=3) -> DiffOp:
    alphas = [e[: ring.nvars] for e in ring.without_param().monomials_up_to(order)]
    out = {}
    for _ in range(rng.randint(1, terms)):
        a = rng.choice(alphas)
        out[a] = random_poly(ring, rng, degree, zero_ok=False)
    return DiffOp(ring, out)


def elementary_gauge(ring: PolyRing, rank: int, rng: random.Random, factors: int = 2, degree: int = 2) -> PolyMatrix:
    """Product of elementary matrices I + f E_ij (i != j); determinant 1."""
    s = PolyMatrix.identity(ring, rank)
    if rank == 1:
        return s
    for _ in range(factors):
        i, j = rng.sample(range(rank), 2)
        f = random_poly(ring, rng, degree, terms=2)
        s = s * (PolyMatrix.identity(ring, rank) + PolyMatrix.unit(ring, rank, i, j, f))
    return s


def _max_degree(c: ConnectionData) -> int:
    return max((f.degree() for a in c.matrices for f in a.entries()), default=-1)


def gauge_flat(ring, rank, rng, max_degree=3, factors=2) -> Instance:
    """Gauge transform of the trivial connection: flat, zero p-curvature."""
    triv = ConnectionData.trivial(ring, rank, DR)
    for _ in range(50):
        s = elementary_gauge(ring, rank, rng, factors)
        c = gauge_transform(triv, s)
        if _max_degree(c) <= max_degree:
            return Instance("gauge", c, s)
    s = elementary_gauge(ring, rank, rng, 1)
    return Instance("gauge", gauge_transform(triv, s), s)


def twisted_flat(ring, rank, rng, max_degree=3) -> Instance:
    """Gauge-flat plus df * I: still integrable, p-curvature (d_i f)^p * I."""
    base = gauge_flat(ring, rank, rng, max_degree)
    f = random_poly(ring, rng, 2, zero_ok=False)
    mats = [a + PolyMatrix.identity(ring, rank).scale_left(f.derive(i)) for i, a in enumerate(base.connection.matrices)]
    return Instance("twisted", ConnectionData(ring, rank, DR, mats), base.gauge)


def separable(ring, rank, rng, max_degree=3) -> Instance:
    """Diagonal, entry (k, k) of A_i a polynomial in x_i alone: integrable."""
    mats = []
    for i in range(ring.nvars):
        diag = []
        for _ in range(rank):
            f = ModPoly.from_terms(
                ring,
                {tuple(d if j == i else 0 for j in range(ring.arity)): rng.randrange(ring.p) for d in range(max_degree + 1)},
            )
            diag.append(f)
        mats.append(PolyMatrix(ring, [[diag[r] if r == c else 0 for c in range(rank)] for r in range(rank)]))
    return Instance("separable", ConnectionData(ring, rank, DR, mats))


def unstructured(ring, rank, rng, max_degree=3) -> Instance:
    mats = [
        PolyMatrix(ring, [[random_poly(ring, rng, max_degree, terms=2) for _ in range(rank)] for _ in range(rank)])
        for _ in range(ring.nvars)
    ]
    return Instance("unstructured", ConnectionData(ring, rank, DR, mats))


def connection_corpus(ring: PolyRing, rng: random.Random, size: int = 50, max_rank: int = 2):
    """Half gauge-flat, the rest split between integrable non-flat kinds and noise."""
    out = []
    makers = [twisted_flat, separable, unstructured]
    for n in range(size):
        rank = rng.randint(1, max_rank)
        if n % 2 == 0:
            out.append(gauge_flat(ring, rank, rng))
        else:
            out.append(makers[(n // 2) % 3](ring, rank, rng))
    return out


def random_filtration(p: int, rank: int, rng: random.Random, depth: int = 2) -> FilteredModule:
    while True:
        basis = [[rng.randrange(p) for _ in range(rank)] for _ in range(rank)]
        weights = [rng.randint(0, depth) for _ in range(rank)]
        try:
            return FilteredModule(p, basis, weights)
        except ValueError:
            continue


def filtered_connection(ring: PolyRing, rank: int, rng: random.Random, target: str, depth: int = 2):
    """(filtration, integrable connection) with a prescribed shape in the adapted basis.

    target = "preserve": entries (k, j) only where w_k >= w_j;
    "griffiths": additionally w_k = w_j - 1 (at least one such entry present);
    "neither": an entry with w_k <= w_j - 2.  The connection is
    A_i = P (d_i(g) N + d_i(h) N^2) P^-1, integrable because N and N^2 commute.
    """
    if rank < 2 and target != "preserve":
        raise ValueError("a rank-1 filtration is preserved by every connection")
    for _ in range(200):
        v = random_filtration(ring.p, rank, rng, depth)
        w = v.weights
        allowed = []
        special = []
        for k in range(rank):
            for j in range(rank):
                gap = w[j] - w[k]
                if gap <= 0:
                    allowed.append((k, j))
                elif gap == 1 and target in ("griffiths", "neither"):
                    (special if target == "griffiths" else allowed).append((k, j))
                elif gap >= 2 and target == "neither":
                    special.append((k, j))
        if target != "preserve" and not special:
            continue
        n = PolyMatrix.zeros(ring, rank)
        picks = rng.sample(allowed, min(len(allowed), rng.randint(0, 2))) + (special[:1] if special else [])
        if target == "griffiths":
            picks += [s for s in special[1:] if rng.random() < 0.5]
        for k, j in picks:
            n = n + PolyMatrix.unit(ring, rank, k, j, rng.randrange(1, ring.p))
        g = random_poly(ring, rng, 3, zero_ok=False)
        h = random_poly(ring, rng, 2)
        pm = v.basis_matrix(ring)
        pinv = pm.inverse()
        n2 = n * n
        mats = [pm * (n.scale_left(g.derive(i)) + n2.scale_left(h.derive(i))) * pinv for i in range(ring.nvars)]
        return v, ConnectionData(ring, rank, DR, mats)
    raise RuntimeError("could not build a filtered connection of the requested shape")


def random_lift(ring: PolyRing, rng: random.Random, degree: int = 3):
    return [random_poly(ring, rng, degree) for _ in range(ring.nvars)]


def nilpotent_higgs(ring: PolyRing, rank: int, rng: random.Random | None = None):
    """Commuting matrices B_i' = g_i(x') N + h_i(x') N^2 over the twist with N^p = 0.

    Rank 2 uses N = E_12.  Rank 3 uses N = E_12 + E_23 when p >= 3 and
    N = E_12 + E_13 (square zero) when p = 2.
    """
    tw = ring.twisted()
    rng = rng or random.Random(0)
    if rank == 2:
        n = PolyMatrix.unit(tw, 2, 0, 1)
    elif rank == 3:
        second = (1, 2) if ring.p > 2 else (0, 2)
        n = PolyMatrix.unit(tw, 3, 0, 1) + PolyMatrix.unit(tw, 3, *second)
    else:
        raise ValueError("fixtures exist for ranks 2 and 3")
    n2 = n * n
    out = []
    for _ in range(ring.nvars):
        g = random_poly(tw, rng, 2, zero_ok=False)
        h = random_poly(tw, rng, 1)
        out.append(n.scale_left(g) + n2.scale_left(h))
    return out


def random_hodge_element(ring: PolyRing, rng: random.Random, order: int = 3) -> HodgeElement:
    """Random sum of t^j f d^alpha with j >= |alpha|; ring must carry the parameter."""
    out = {}
    base = ring.without_param()
    for a in [e[: ring.nvars] for e in base.monomials_up_to(order)]:
        if rng.random() < 0.5:
            continue
        f = random_poly(base, rng, 2, zero_ok=False).embed(ring)
        j = sum(a) + rng.randint(0, 1)
        out[a] = f * ring.t ** j
    return HodgeElement(DiffOp(ring, out))
