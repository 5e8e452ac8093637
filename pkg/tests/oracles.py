"""Brute-force reference computations used by several test modules."""

from __future__ import annotations

import itertools

import numpy as np

from fopkit.cocycles import (
    TwoCocycle,
    cocycle_from_bilinear_form,
    sign_homomorphisms,
    solve_trivialization,
    trivial_cocycle,
    twist_character,
)
from fopkit.groups import (
    FiniteGroup,
    Subgroup,
    dihedral_affine,
    elementary_abelian,
    subgroup_generated,
    wreath_z2_zn,
)


def all_trivializations(omega: TwoCocycle, H: Subgroup) -> list[dict[int, int]]:
    """Every χ: H -> ±1 with ω(a, b) = χ(ab) χ(a) χ(b), by enumerating all 2^|H| tables."""
    G = H.parent
    mem = list(H.members)
    pos = {h: i for i, h in enumerate(mem)}
    m = len(mem)
    A = np.array([[pos[a] for a in mem] for _ in mem]).T  # A[i, j] = i
    B = A.T
    AB = np.array([[pos[G.mul(a, b)] for b in mem] for a in mem])
    W = np.array([[omega(a, b) for b in mem] for a in mem])
    masks = np.arange(2**m, dtype=np.int64)
    X = 1 - 2 * ((masks[:, None] >> np.arange(m)) & 1)  # candidate × member values
    ok = np.ones(len(masks), dtype=bool)
    for i in range(m):
        for j in range(m):
            ok &= X[:, AB[i, j]] * X[:, A[i, j]] * X[:, B[i, j]] == W[i, j]
    return [{h: int(X[k, pos[h]]) for h in mem} for k in np.flatnonzero(ok)]


def brute_cocycle_ok(omega: TwoCocycle) -> bool:
    G = omega.group
    return all(
        omega(b, c) * omega(a, G.mul(b, c)) == omega(G.mul(a, b), c) * omega(a, b)
        for a, b, c in itertools.product(G.ids(), repeat=3)
    )


def random_group(rng: np.random.Generator) -> tuple[FiniteGroup, TwoCocycle]:
    """A group of order <= 64 with either the trivial or a random bilinear-form cocycle."""
    kind = rng.integers(3)
    if kind == 0:
        n = int(rng.integers(2, 7))
        G = elementary_abelian(n)
        form = rng.integers(0, 2, size=(n, n))
        return G, cocycle_from_bilinear_form(G, form)
    if kind == 1:
        G = dihedral_affine(int(rng.integers(2, 17)))
    else:
        G = wreath_z2_zn(int(rng.integers(2, 5)))
    return G, trivial_cocycle(G)


def random_character(G, omega, rng, max_gens=3):
    """A random subgroup with a random trivialization, or None when ω|H is not a coboundary."""
    k = int(rng.integers(0, max_gens + 1))
    H = subgroup_generated(G, [int(x) for x in rng.integers(0, G.order, size=k)])
    chi = solve_trivialization(omega, H)
    if chi is None:
        return None
    homs = sign_homomorphisms(H)
    return twist_character(chi, homs[int(rng.integers(len(homs)))])


def all_subgroups_small(G, limit=16):
    """Every subgroup of order <= limit, by closing under one extra element at a time."""
    found = {subgroup_generated(G, []).members: subgroup_generated(G, [])}
    frontier = list(found.values())
    while frontier:
        nxt = []
        for S in frontier:
            for g in G.ids():
                if g in S:
                    continue
                T = subgroup_generated(G, list(S.members) + [g])
                if len(T) <= limit and T.members not in found:
                    found[T.members] = T
                    nxt.append(T)
        frontier = nxt
    return list(found.values())
