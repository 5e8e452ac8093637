"""Orbit bases of Hom spaces between projective monomial representations.

A matrix T indexed by M x M' is G-invariant when
``T[π(i), π'(k)] = s_i s'_k T[i, k]`` for every g (π, s from [g]_M and
π', s' from [g]_{M'}).  The unsigned action splits M x M' into orbits; an
orbit carries an invariant {0,±1} matrix exactly when propagating signs
around it never conflicts.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .groups import conjugate_subgroup, intersect
from .induced import InducedRep, forget_signs


class HomError(ValueError):
    pass


class InconsistencyError(RuntimeError):
    """Internal results disagree; signals a sign-convention bug."""


@dataclass(frozen=True)
class SignMatrix:
    rows: int
    cols: int
    entries: Mapping[tuple[int, int], int]

    def __post_init__(self) -> None:
        for (i, j), v in self.entries.items():
            if v not in (1, -1) or not (0 <= i < self.rows and 0 <= j < self.cols):
                raise ValueError(f"bad sign-matrix entry {(i, j)} -> {v}")

    @classmethod
    def from_dense(cls, a: np.ndarray) -> SignMatrix:
        a = np.asarray(a)
        if not np.isin(a, (-1, 0, 1)).all():
            raise ValueError("dense matrix has entries outside {0, ±1}")
        idx = np.argwhere(a != 0)
        return cls(a.shape[0], a.shape[1], {(int(i), int(j)): int(a[i, j]) for i, j in idx})

    def dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.int64)
        for (i, j), v in self.entries.items():
            out[i, j] = v
        return out

    def triples(self) -> list[tuple[int, int, int]]:
        return [(i, j, v) for (i, j), v in sorted(self.entries.items())]

    @property
    def support(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.entries)

    def transpose(self) -> SignMatrix:
        return SignMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})


@dataclass(frozen=True)
class PairOrbit:
    cells: tuple[tuple[int, int], ...]
    representative: tuple[int, int]
    orientable: bool
    signs: Mapping[tuple[int, int], int] | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.cells)


@dataclass(frozen=True, eq=False)
class HomBasis:
    source: InducedRep
    target: InducedRep
    orbits: tuple[PairOrbit, ...]
    basis: tuple[SignMatrix, ...]

    @property
    def orientable_orbits(self) -> tuple[PairOrbit, ...]:
        return tuple(o for o in self.orbits if o.orientable)

    def __len__(self) -> int:
        return len(self.basis)


def _check_compatible(V: InducedRep, W: InducedRep) -> None:
    if V.group is not W.group:
        raise HomError("representations of different groups")
    if not V.cocycle.same_as(W.cocycle):
        raise HomError("representations carry different cocycles")


def propagate(V: InducedRep, W: InducedRep, start: tuple[int, int], gens: Sequence[int] | None = None):
    """Breadth-first sign propagation from ``start``.

    Returns (cells in discovery order, orientable, sign per cell).
    """
    if gens is None:
        gens = V.group.generators
    P1, S1, P2, S2 = V.perms, V.signs, W.perms, W.signs
    sign = {start: 1}
    order = [start]
    queue = deque([start])
    ok = True
    while queue:
        i, k = queue.popleft()
        s = sign[(i, k)]
        for g in gens:
            nxt = (int(P1[g, i]), int(P2[g, k]))
            t = s * int(S1[g, i]) * int(S2[g, k])
            old = sign.get(nxt)
            if old is None:
                sign[nxt] = t
                order.append(nxt)
                queue.append(nxt)
            elif old != t:
                ok = False
    return order, ok, sign


def pair_orbits(V: InducedRep, W: InducedRep) -> list[PairOrbit]:
    """Orbits on M x M' in order of their least cell (row-major)."""
    _check_compatible(V, W)
    seen = np.zeros((V.dim, W.dim), dtype=bool)
    out = []
    for i in range(V.dim):
        for k in range(W.dim):
            if seen[i, k]:
                continue
            cells, ok, sign = propagate(V, W, (i, k))
            for c in cells:
                seen[c] = True
            out.append(PairOrbit(tuple(sorted(cells)), (i, k), ok, sign if ok else None))
    return out


def stabilizer_sign(V: InducedRep, i: int, t: int) -> int:
    """Sign by which t scales m_i, for t in g_i H g_i^-1."""
    G = V.group
    g = V.cosets.reps[i]
    h = G.mul(G.mul(G.inv(g), t), g)
    omega = V.cocycle
    return omega(t, g) * omega(g, h) * V.character(h)


def orientable_by_stabilizer(V: InducedRep, W: InducedRep, orbit: PairOrbit | tuple[int, int]) -> bool:
    """Compare the conjugated characters on g_i H g_i^-1 ∩ g'_j H' g'_j^-1.

    For trivial ω this is χ(g_i^-1 t g_i) = χ'(g'_j^-1 t g'_j); in general the
    conjugated character picks up the factor ω(t, g) ω(g, g^-1 t g).
    """
    _check_compatible(V, W)
    i, k = orbit.representative if isinstance(orbit, PairOrbit) else orbit
    S1 = conjugate_subgroup(V.cosets.reps[i], V.subgroup)
    S2 = conjugate_subgroup(W.cosets.reps[k], W.subgroup)
    return all(stabilizer_sign(V, i, t) == stabilizer_sign(W, k, t) for t in intersect(S1, S2).members)


def hom_basis(V: InducedRep, W: InducedRep) -> HomBasis:
    orbits = tuple(pair_orbits(V, W))
    basis = []
    for o in orbits:
        if o.orientable:
            basis.append(SignMatrix(V.dim, W.dim, dict(o.signs)))
    return HomBasis(V, W, orbits, tuple(basis))


# -- exact rational oracle --


def rational_rank(rows: Iterable[Mapping[int, Fraction]]) -> int:
    """Rank of a sparse rational matrix (rows as {column: value})."""
    pivots: dict[int, dict[int, Fraction]] = {}
    for row in rows:
        r = {c: Fraction(v) for c, v in row.items() if v != 0}
        while r:
            c = min(r)
            p = pivots.get(c)
            if p is None:
                lead = r[c]
                pivots[c] = {k: v / lead for k, v in r.items()}
                break
            f = r[c]
            for k, v in p.items():
                nv = r.get(k, 0) - f * v
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
    return len(pivots)


ORACLE_ALL_ELEMENTS_LIMIT = 50_000


def hom_dim_oracle(V: InducedRep, W: InducedRep) -> int:
    """dim of {T : [g]_M T = T [g]_M'} by exact elimination over Q.

    Uses every group element when |G| * dim V * dim W is small, otherwise a
    generating set (invariance under generators implies invariance under G).
    """
    _check_compatible(V, W)
    G = V.group
    n1, n2 = V.dim, W.dim
    if G.order * n1 * n2 <= ORACLE_ALL_ELEMENTS_LIMIT:
        elements: Sequence[int] = range(G.order)
    else:
        elements = G.generators
    A1 = [V.dense(g) for g in elements]
    A2 = [W.dense(g) for g in elements]

    def equations():
        # ([g] T)[a, b] - (T [g'])[a, b] = 0 for every cell (a, b)
        for M1, M2 in zip(A1, A2):
            for a in range(n1):
                nz1 = np.flatnonzero(M1[a])
                for b in range(n2):
                    row: dict[int, int] = {}
                    for c in nz1:
                        key = int(c) * n2 + b
                        row[key] = row.get(key, 0) + int(M1[a, c])
                    for d in np.flatnonzero(M2[:, b]):
                        key = a * n2 + int(d)
                        row[key] = row.get(key, 0) - int(M2[d, b])
                    yield row

    return n1 * n2 - rational_rank(equations())


# -- algebra structure of End_M(V) --


def _dense_basis(B: HomBasis) -> list[np.ndarray]:
    return [E.dense() for E in B.basis]


def structure_constants(B: HomBasis) -> np.ndarray:
    """λ[i, j, k] with E_i E_j = Σ_k λ[i, j, k] E_k, residual checked to be zero."""
    if B.source is not B.target:
        raise HomError("structure constants need an endomorphism basis")
    Es = _dense_basis(B)
    reps = [o.representative for o in B.orientable_orbits]
    m = len(Es)
    lam = np.zeros((m, m, m), dtype=np.int64)
    for i in range(m):
        for j in range(m):
            prod = Es[i] @ Es[j]
            resid = prod.copy()
            for k, r in enumerate(reps):
                c = prod[r]
                lam[i, j, k] = c
                resid -= c * Es[k]
            if resid.any():
                raise InconsistencyError(f"E_{i} E_{j} is not in the span of the orbit basis")
    return lam


def transpose_map(B: HomBasis) -> list[tuple[int, int]]:
    """For each i the pair (j, ε) with E_i^T = ε E_j."""
    if B.source is not B.target:
        raise HomError("transpose map needs an endomorphism basis")
    supports = {E.support: j for j, E in enumerate(B.basis)}
    out = []
    for i, E in enumerate(B.basis):
        Et = E.transpose()
        j = supports.get(Et.support)
        if j is None:
            raise InconsistencyError(f"E_{i}^T is not supported on a basis orbit")
        Ej = B.basis[j].entries
        cell = next(iter(Ej))
        eps = Et.entries[cell] * Ej[cell]
        if Et.entries != {c: eps * v for c, v in Ej.items()}:
            raise InconsistencyError(f"E_{i}^T is not ± E_{j}")
        out.append((j, eps))
    return out


def weight_matrix(V: InducedRep, B: HomBasis | None = None) -> SignMatrix:
    """W = Σ E_i over the orientable orbits of End_M(V)."""
    if B is None:
        B = hom_basis(V, V)
    W = np.zeros((V.dim, V.dim), dtype=np.int64)
    for E in B.basis:
        W += E.dense()
    return SignMatrix.from_dense(W)


def unsigned_orbit_basis(V: InducedRep) -> list[SignMatrix]:
    """The {0,1} orbit matrices F_i of End_M(|V|), in orbit order."""
    U = forget_signs(V)
    return [SignMatrix(V.dim, V.dim, {c: 1 for c in o.cells}) for o in pair_orbits(U, U)]


def check_weight_matrix(V: InducedRep) -> bool:
    """F_i ∘ W is E_i on orientable orbits, 0 elsewhere, and every E_i is hit."""
    B = hom_basis(V, V)
    W = weight_matrix(V, B).dense()
    signed = {E.support: E.dense() for E in B.basis}
    hit = set()
    for F in unsigned_orbit_basis(V):
        image = F.dense() * W
        if F.support in signed:
            if not np.array_equal(image, signed[F.support]):
                return False
            hit.add(F.support)
        elif image.any():
            return False
    return hit == set(signed)


# -- cohomology developed matrices --


def rep_action(V: InducedRep, elements: Sequence[int] | None = None) -> list[np.ndarray]:
    """Unsigned permutations of the basis, one per element (generators by default)."""
    if elements is None:
        elements = V.group.generators
    return [np.asarray(V.perms[g]) for g in elements]


def is_cdm(A, x_action: Sequence[Sequence[int]], y_action: Sequence[Sequence[int]]) -> bool:
    """gA ~_D A for every g, where (gA)[π(x), π'(y)] = A[x, y].

    ``x_action[k]``/``y_action[k]`` are the permutations of X and Y by the k-th
    group element.  D-equivalence is decided by ±1 propagation on the
    bipartite support graph.
    """
    A = A.dense() if isinstance(A, SignMatrix) else np.asarray(A, dtype=np.int64)
    nx, ny = A.shape
    support = np.argwhere(A != 0)
    for px, py in zip(x_action, y_action):
        px = np.asarray(px)
        py = np.asarray(py)
        gA = np.zeros_like(A)
        gA[np.ix_(px, py)] = A
        if not np.array_equal(gA != 0, A != 0):
            return False
        # need d1[x] d2[y] = gA[x, y] A[x, y] on the support
        want = gA * A
        adj: dict[tuple[str, int], list[tuple[tuple[str, int], int]]] = {}
        for x, y in support:
            w = int(want[x, y])
            adj.setdefault(("x", int(x)), []).append((("y", int(y)), w))
            adj.setdefault(("y", int(y)), []).append((("x", int(x)), w))
        value: dict[tuple[str, int], int] = {}
        for start in adj:
            if start in value:
                continue
            value[start] = 1
            queue = deque([start])
            while queue:
                u = queue.popleft()
                for v, w in adj[u]:
                    t = value[u] * w
                    if v not in value:
                        value[v] = t
                        queue.append(v)
                    elif value[v] != t:
                        return False
    return True
