"""Projective monomial representations induced from 1-dimensional characters."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cocycles import (
    SignCharacter,
    TwoCocycle,
    character_from_values,
    trivial_character,
    trivial_cocycle,
)
from .groups import CosetSpace, FiniteGroup, SignedPermutation, Subgroup, right_cosets, trivial_subgroup

EXHAUSTIVE_LIMIT = 256
SAMPLED_PAIRS = 10**5


@dataclass(frozen=True, eq=False)
class InducedRep:
    """Ind_H^G(χ) on the basis m_i = [g_i] ⊗ u_0, g_i the coset representatives.

    ``perms[g, i] = j`` and ``signs[g, i] = s`` mean g·m_i = s·m_j.
    """

    group: FiniteGroup
    subgroup: Subgroup
    character: SignCharacter
    cocycle: TwoCocycle
    cosets: CosetSpace
    perms: np.ndarray = field(repr=False)
    signs: np.ndarray = field(repr=False)
    name: str = ""

    @property
    def dim(self) -> int:
        return len(self.cosets.reps)

    def rep_matrix(self, g: int) -> SignedPermutation:
        return SignedPermutation(tuple(self.perms[g]), tuple(self.signs[g]))

    def dense(self, g: int) -> np.ndarray:
        m = np.zeros((self.dim, self.dim), dtype=np.int64)
        m[self.perms[g], np.arange(self.dim)] = self.signs[g]
        return m

    def __repr__(self) -> str:
        label = self.name or f"Ind(|H|={self.subgroup.order})"
        return f"InducedRep({label}, dim={self.dim})"


def induce(
    G: FiniteGroup, omega: TwoCocycle, H: Subgroup, chi: SignCharacter, name: str = ""
) -> InducedRep:
    """g·m_i = ω(g, g_i) ω(g_j, h) χ(h) m_j where g g_i = g_j h."""
    if omega.group is not G or H.parent is not G:
        raise ValueError("group, cocycle and subgroup must match")
    if chi.subgroup != H:
        raise ValueError("character is defined on a different subgroup")
    # revalidate against this ω, in case χ came from another cocycle
    chi = character_from_values(omega, H, chi.values)
    cosets = right_cosets(G, H)
    reps = np.array(cosets.reps, dtype=np.int64)
    T = omega.table.astype(np.int64)
    X = G.table[:, reps]
    J = cosets.rep_index[X]
    Hh = cosets.h_part[X]
    chi_arr = chi.as_array()
    signs = T[:, reps] * T[reps[J], Hh] * chi_arr[Hh]
    perms = np.ascontiguousarray(J)
    signs = np.ascontiguousarray(signs)
    perms.setflags(write=False)
    signs.setflags(write=False)
    return InducedRep(G, H, chi, omega, cosets, perms, signs, name)


def rep_matrix(V: InducedRep, g: int) -> SignedPermutation:
    return V.rep_matrix(g)


def cocyclic_regular_rep(G: FiniteGroup, omega: TwoCocycle) -> InducedRep:
    """g·[g'] = ω(g, g')[g g'] on F[G]."""
    E = trivial_subgroup(G)
    return induce(G, omega, E, trivial_character(omega, E), name="regular")


def forget_signs(V: InducedRep) -> InducedRep:
    """|V|: the same permutation action with every sign +1 and ω trivial."""
    omega = trivial_cocycle(V.group)
    chi = trivial_character(omega, V.subgroup)
    signs = np.ones_like(V.signs)
    signs.setflags(write=False)
    return InducedRep(V.group, V.subgroup, chi, omega, V.cosets, V.perms, signs, f"|{V.name}|")


def check_projectivity(V: InducedRep, seed: int = 0) -> bool:
    """[g][g'] = ω(g, g')[g g'], exhaustive up to EXHAUSTIVE_LIMIT elements."""
    G = V.group
    n = G.order
    P, S = V.perms, V.signs
    T = V.cocycle.table
    if n <= EXHAUSTIVE_LIMIT:
        everything = np.arange(n)
        return all(_check_pairs(P, S, T, G.table, np.full(n, g), everything) for g in range(n))
    rng = np.random.default_rng(seed)
    a = rng.integers(0, n, SAMPLED_PAIRS)
    b = rng.integers(0, n, SAMPLED_PAIRS)
    return all(
        _check_pairs(P, S, T, G.table, a[k : k + 4096], b[k : k + 4096]) for k in range(0, SAMPLED_PAIRS, 4096)
    )


def _check_pairs(P, S, T, M, ga, gb) -> bool:
    # e_i -> S[h,i] e_{P[h,i]} -> S[h,i] S[g, P[h,i]] e_{P[g, P[h,i]]}
    rows = np.arange(len(ga))[:, None]
    ph = P[gb]
    comp_perm = P[ga][rows, ph]
    comp_sign = S[gb] * S[ga][rows, ph]
    gh = M[ga, gb]
    w = T[ga, gb].astype(np.int64)[:, None]
    return bool(np.array_equal(comp_perm, P[gh]) and np.array_equal(comp_sign, w * S[gh]))
