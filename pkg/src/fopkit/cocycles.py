"""{±1}-valued 2-cocycles and their trivializations on subgroups."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .groups import FiniteGroup, GroupError, Subgroup, vector_of

EXHAUSTIVE_LIMIT = 256
SAMPLED_TRIPLES = 10**6


class CocycleError(ValueError):
    pass


class InvalidTrivialization(CocycleError):
    """A sign function fails the coboundary condition; ``witness`` is a bad pair."""

    def __init__(self, message: str, witness: tuple[int, int] | None = None) -> None:
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True, eq=False)
class TwoCocycle:
    """Dense sign table ``table[g, h] = ω(g, h)``, normalized so ω(e, e) = +1."""

    group: FiniteGroup
    table: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.table, dtype=np.int8)
        n = self.group.order
        if t.shape != (n, n):
            raise CocycleError(f"cocycle table must be {n}x{n}, got {t.shape}")
        if not np.isin(t, (-1, 1)).all():
            raise CocycleError("cocycle values must be ±1")
        if t[0, 0] == -1:
            t = -t
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def __call__(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def is_trivial(self) -> bool:
        return bool((self.table == 1).all())

    def same_as(self, other: TwoCocycle) -> bool:
        return other.group is self.group and np.array_equal(other.table, self.table)


def verify_cocycle(omega: TwoCocycle, seed: int = 0, exhaustive: bool | None = None) -> bool:
    """Check ω(g',g'')ω(g,g'g'') = ω(gg',g'')ω(g,g') on all triples.

    By default groups above EXHAUSTIVE_LIMIT are checked on SAMPLED_TRIPLES
    random triples; ``exhaustive=True`` forces the full |G|^3 check.
    """
    G = omega.group
    T = omega.table
    M = G.table
    n = G.order
    if exhaustive is None:
        exhaustive = n <= EXHAUSTIVE_LIMIT
    if exhaustive:
        for g in range(n):
            lhs = T * T[g][M]
            rhs = T[M[g]] * T[g][:, None]
            if not np.array_equal(lhs, rhs):
                return False
        return True
    rng = np.random.default_rng(seed)
    a, b, c = rng.integers(0, n, size=(3, SAMPLED_TRIPLES))
    lhs = T[b, c] * T[a, M[b, c]]
    rhs = T[M[a, b], c] * T[a, b]
    return bool(np.array_equal(lhs, rhs))


def trivial_cocycle(G: FiniteGroup) -> TwoCocycle:
    return TwoCocycle(G, np.ones((G.order, G.order), dtype=np.int8))


def cocycle_from_table(G: FiniteGroup, table) -> TwoCocycle:
    omega = TwoCocycle(G, np.asarray(table))
    if not verify_cocycle(omega):
        raise CocycleError("table does not satisfy the cocycle identity")
    return omega


def cocycle_from_bilinear_form(G: FiniteGroup, form: Sequence[Sequence[int]]) -> TwoCocycle:
    """ω(v, w) = (-1)^(v^T F w) on an elementary abelian group of sign flips."""
    F = np.asarray(form, dtype=np.int64) % 2
    try:
        vecs = np.array([vector_of(G, g) for g in G.ids()], dtype=np.int64)
    except GroupError as exc:
        raise CocycleError("bilinear-form cocycles need an elementary abelian group of sign flips") from exc
    n = G.degree
    if G.order != 2**n or F.shape != (n, n):
        raise CocycleError(f"form must be {n}x{n} on (Z/2)^{n}")
    exps = (vecs @ F @ vecs.T) % 2
    return TwoCocycle(G, (1 - 2 * exps).astype(np.int8))


# -- characters --


@dataclass(frozen=True, eq=False)
class SignCharacter:
    """χ: H -> {±1} with ω(h1, h2) = χ(h1 h2) χ(h1) χ(h2) on H."""

    subgroup: Subgroup
    values: Mapping[int, int]
    cocycle: TwoCocycle = field(repr=False)

    def __call__(self, h: int) -> int:
        return self.values[h]

    def as_array(self) -> np.ndarray:
        """Length-|G| array holding χ on H and 0 elsewhere."""
        out = np.zeros(self.subgroup.parent.order, dtype=np.int64)
        for h, v in self.values.items():
            out[h] = v
        return out

    def is_trivial(self) -> bool:
        return all(v == 1 for v in self.values.values())


def coboundary_witness(omega: TwoCocycle, H: Subgroup, values: Mapping[int, int]) -> tuple[int, int] | None:
    G = H.parent
    for h1 in H.members:
        for h2 in H.members:
            if omega(h1, h2) != values[G.mul(h1, h2)] * values[h1] * values[h2]:
                return (h1, h2)
    return None


def character_from_values(omega: TwoCocycle, H: Subgroup, values: Mapping[int, int]) -> SignCharacter:
    if H.parent is not omega.group:
        raise CocycleError("subgroup and cocycle live on different groups")
    vals = {int(h): int(v) for h, v in values.items()}
    if set(vals) != set(H.members):
        raise InvalidTrivialization("character values must cover exactly the subgroup")
    if any(v not in (1, -1) for v in vals.values()):
        raise InvalidTrivialization("character values must be ±1")
    bad = coboundary_witness(omega, H, vals)
    if bad is not None:
        raise InvalidTrivialization(f"coboundary condition fails at pair {bad}", witness=bad)
    return SignCharacter(H, vals, omega)


def character_from_generator_values(
    omega: TwoCocycle, H: Subgroup, gens: Sequence[int], gen_values: Sequence[int]
) -> SignCharacter:
    """Extend χ from generators by χ(h s) = ω(h, s) χ(h) χ(s), then validate."""
    G = H.parent
    if len(gens) != len(gen_values):
        raise InvalidTrivialization("one value per generator is required")
    given = {}
    for s, v in zip(gens, gen_values):
        if s not in H:
            raise InvalidTrivialization(f"generator {s} is not in the subgroup")
        if given.get(s, v) != v:
            raise InvalidTrivialization(f"conflicting values for generator {s}")
        given[s] = int(v)
    # χ(e) is forced: ω(e,e) = χ(e)^3 = χ(e)
    vals = {0: omega(0, 0)}
    if 0 in given and given[0] != vals[0]:
        raise InvalidTrivialization("value at the identity must equal ω(e, e)", witness=(0, 0))
    frontier = [0]
    while frontier:
        nxt = []
        for h in frontier:
            for s, v in given.items():
                x = G.mul(h, s)
                val = omega(h, s) * vals[h] * v
                if x not in vals:
                    vals[x] = val
                    nxt.append(x)
                elif vals[x] != val:
                    raise InvalidTrivialization(f"generator values are inconsistent at pair {(h, s)}", witness=(h, s))
        frontier = nxt
    if set(vals) != set(H.members):
        raise InvalidTrivialization("generators do not generate the subgroup")
    return character_from_values(omega, H, vals)


def trivial_character(omega: TwoCocycle, H: Subgroup) -> SignCharacter:
    return character_from_values(omega, H, {h: 1 for h in H.members})


# -- linear algebra over GF(2), rows as int bitmasks --


def _gf2_solve(rows: list[int], nvars: int) -> list[int] | None:
    """Solve rows (bit j = coefficient of x_j, bit nvars = rhs); free vars = 0."""
    rhs_bit = 1 << nvars
    pivots: dict[int, int] = {}
    for row in rows:
        for col, prow in pivots.items():
            if row >> col & 1:
                row ^= prow
        low = row & (rhs_bit - 1)
        if not low:
            if row & rhs_bit:
                return None
            continue
        col = (low & -low).bit_length() - 1
        for c, prow in list(pivots.items()):
            if prow >> col & 1:
                pivots[c] = prow ^ row
        pivots[col] = row
    x = [0] * nvars
    for col, prow in pivots.items():
        x[col] = 1 if prow & rhs_bit else 0
    return x


def _gf2_nullspace(rows: list[int], nvars: int) -> list[list[int]]:
    pivots: dict[int, int] = {}
    for row in rows:
        for col, prow in pivots.items():
            if row >> col & 1:
                row ^= prow
        if not row:
            continue
        col = (row & -row).bit_length() - 1
        for c, prow in list(pivots.items()):
            if prow >> col & 1:
                pivots[c] = prow ^ row
        pivots[col] = row
    basis = []
    for free in range(nvars):
        if free in pivots:
            continue
        x = [0] * nvars
        x[free] = 1
        for col, prow in pivots.items():
            x[col] = prow >> free & 1
        basis.append(x)
    return basis


def solve_trivialization(omega: TwoCocycle, H: Subgroup) -> SignCharacter | None:
    """Canonical χ trivializing ω on H, or None when ω|H is not a coboundary.

    χ = (-1)^x with x_{h1 h2} + x_{h1} + x_{h2} = [ω(h1, h2) = -1] over GF(2)
    and x_e = 0; free variables are set to 0 in member-id order.
    """
    G = H.parent
    members = H.members
    pos = {h: i for i, h in enumerate(members)}
    nv = len(members)
    rows = [1 << pos[0]]
    for h1 in members:
        for h2 in members:
            row = (1 << pos[G.mul(h1, h2)]) ^ (1 << pos[h1]) ^ (1 << pos[h2])
            if omega(h1, h2) == -1:
                row ^= 1 << nv
            rows.append(row)
    x = _gf2_solve(rows, nv)
    if x is None:
        return None
    return character_from_values(omega, H, {h: (-1) ** x[pos[h]] for h in members})


def is_homomorphism(H: Subgroup, psi: Mapping[int, int]) -> bool:
    G = H.parent
    return all(psi[G.mul(a, b)] == psi[a] * psi[b] for a in H.members for b in H.members)


def sign_homomorphisms(H: Subgroup) -> list[dict[int, int]]:
    """All homomorphisms H -> {±1}, the trivial one first."""
    G = H.parent
    members = H.members
    pos = {h: i for i, h in enumerate(members)}
    rows = []
    for a in members:
        for b in members:
            rows.append((1 << pos[G.mul(a, b)]) ^ (1 << pos[a]) ^ (1 << pos[b]))
    basis = _gf2_nullspace(rows, len(members))
    out = []
    for mask in range(2 ** len(basis)):
        x = [0] * len(members)
        for k, vec in enumerate(basis):
            if mask >> k & 1:
                x = [u ^ v for u, v in zip(x, vec)]
        out.append({h: (-1) ** x[pos[h]] for h in members})
    return out


def twist_character(chi: SignCharacter, psi: Mapping[int, int]) -> SignCharacter:
    """χψ for a homomorphism ψ: H -> {±1}."""
    H = chi.subgroup
    psi = {int(h): int(v) for h, v in psi.items()}
    if set(psi) != set(H.members) or not is_homomorphism(H, psi):
        raise CocycleError("ψ must be a homomorphism H -> {±1}")
    return character_from_values(chi.cocycle, H, {h: chi(h) * psi[h] for h in H.members})
