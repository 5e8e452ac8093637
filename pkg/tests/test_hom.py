import itertools
import random

import numpy as np
import pytest

from fopkit.cocycles import cocycle_from_bilinear_form, trivial_character, trivial_cocycle
from fopkit.constructions import scenario_dihedral_amicable, scenario_wreath, scenario_z2_4
from fopkit.formal import assemble, substitute
from fopkit.groups import dihedral_affine, elementary_abelian, whole_group
from fopkit.hom import (
    HomError,
    InconsistencyError,
    SignMatrix,
    check_weight_matrix,
    hom_basis,
    hom_dim_oracle,
    is_cdm,
    orientable_by_stabilizer,
    pair_orbits,
    propagate,
    rational_rank,
    rep_action,
    structure_constants,
    transpose_map,
    unsigned_orbit_basis,
    weight_matrix,
)
from fopkit.induced import cocyclic_regular_rep, induce

from oracles import random_character, random_group


def reps_of(s):
    out = {
        "X": induce(s.group, s.cocycle, s.H, s.chi),
        "X'": induce(s.group, s.cocycle, s.H_prime, s.chi_prime),
    }
    if hasattr(s, "K"):
        out["Z"] = induce(s.group, s.cocycle, s.K, s.chi_K)
    return out


@pytest.fixture(scope="module")
def z2_4():
    return reps_of(scenario_z2_4())


def trivial_rep(G):
    omega = trivial_cocycle(G)
    H = whole_group(G)
    return induce(G, omega, H, trivial_character(omega, H))


def test_trivial_one_dim():
    V = trivial_rep(dihedral_affine(3))
    orbits = pair_orbits(V, V)
    assert len(orbits) == 1 and orbits[0].orientable
    B = hom_basis(V, V)
    assert [E.dense().tolist() for E in B.basis] == [[[1]]]
    assert hom_dim_oracle(V, V) == 1
    assert structure_constants(B).tolist() == [[[1]]]
    assert weight_matrix(V).dense().tolist() == [[1]]


def test_z2_4_counts(z2_4):
    X, Xp, Z = z2_4["X"], z2_4["X'"], z2_4["Z"]
    A = hom_basis(X, Z)
    assert len(A) == 2 == hom_dim_oracle(X, Z)
    assert sum(len(o) for o in A.orientable_orbits) == 32  # full support
    assert len(hom_basis(X, Xp)) == 0 == hom_dim_oracle(X, Xp)
    assert all(orientable_by_stabilizer(X, Z, o) for o in A.orbits)
    assert not any(orientable_by_stabilizer(X, Xp, o) for o in pair_orbits(X, Xp))


def test_dihedral_count():
    r = reps_of(scenario_dihedral_amicable(6))
    assert len(hom_basis(r["X"], r["X'"])) == 3 == hom_dim_oracle(r["X"], r["X'"])


def three_way(V, W):
    orbits = pair_orbits(V, W)
    prop = sum(o.orientable for o in orbits)
    for o in orbits:
        assert o.orientable == orientable_by_stabilizer(V, W, o)
    return prop, hom_dim_oracle(V, W)


def test_three_way_on_fixtures(z2_4):
    for V in z2_4.values():
        for W in z2_4.values():
            p, d = three_way(V, W)
            assert p == d


def test_three_way_random_small():
    rng = np.random.default_rng(11)
    done = 0
    while done < 12:
        G, omega = random_group(rng)
        c1 = random_character(G, omega, rng)
        c2 = random_character(G, omega, rng)
        if c1 is None or c2 is None:
            continue
        V = induce(G, omega, c1.subgroup, c1)
        W = induce(G, omega, c2.subgroup, c2)
        if V.dim * W.dim > 600:
            continue
        p, d = three_way(V, W)
        assert p == d
        done += 1


def test_representative_independence():
    rnd = random.Random(5)
    for V, W in [
        (lambda r: (r["X"], r["Z"]))(reps_of(scenario_z2_4())),
        (lambda r: (r["X"], r["X'"]))(reps_of(scenario_z2_4())),
        (lambda r: (r["X"], r["X'"]))(reps_of(scenario_dihedral_amicable(6))),
        (lambda r: (r["X"], r["Z"]))(reps_of(scenario_wreath(5))),
    ]:
        for o in pair_orbits(V, W):
            for start in rnd.sample(o.cells, min(3, len(o.cells))):
                cells, ok, sign = propagate(V, W, start)
                assert set(cells) == set(o.cells) and ok == o.orientable
                if ok:
                    # signs agree up to the global sign fixed at the representative
                    eps = sign[o.representative]
                    assert all(sign[c] == eps * o.signs[c] for c in o.cells)
                assert orientable_by_stabilizer(V, W, start) == o.orientable


@pytest.mark.parametrize("which", ["z2_4", "dihedral", "wreath"])
def test_equivariance_and_disjointness(which):
    s = {"z2_4": scenario_z2_4, "dihedral": lambda: scenario_dihedral_amicable(8), "wreath": lambda: scenario_wreath(5)}[which]()
    r = reps_of(s)
    V, W = r["X"], r["Z"] if "Z" in r else r["X'"]
    B = hom_basis(V, W)
    covered = set()
    for E in B.basis:
        T = E.dense()
        for g in s.group.ids():
            assert np.array_equal(V.dense(g) @ T @ np.linalg.inv(W.dense(g)).round().astype(int), T)
        assert not covered & E.support
        covered |= E.support
    assert covered == {c for o in B.orientable_orbits for c in o.cells}


def test_partition_of_cells(z2_4):
    orbits = pair_orbits(z2_4["X"], z2_4["Z"])
    cells = [c for o in orbits for c in o.cells]
    assert len(cells) == len(set(cells)) == 32
    assert [o.representative for o in orbits] == sorted(o.representative for o in orbits)
    assert all(o.representative == min(o.cells) for o in orbits)


def test_cocycle_mismatch():
    G = elementary_abelian(2)
    omega = cocycle_from_bilinear_form(G, [[0, 1], [0, 0]])
    V = cocyclic_regular_rep(G, omega)
    W = cocyclic_regular_rep(G, trivial_cocycle(G))
    with pytest.raises(HomError):
        pair_orbits(V, W)


def test_rational_rank():
    assert rational_rank([{0: 1, 1: 2}, {0: 2, 1: 4}, {2: 3}]) == 2
    assert rational_rank([]) == 0


def test_regular_rep_structure_constants_are_group_algebra():
    G = elementary_abelian(2)
    V = cocyclic_regular_rep(G, trivial_cocycle(G))
    B = hom_basis(V, V)
    assert len(B) == 4
    # E_d[a, b] = 1 iff b = a d; the representative of E_d is (0, d)
    d = [o.representative[1] for o in B.orientable_orbits]
    for E, x in zip(B.basis, d):
        assert np.array_equal(E.dense(), np.array([[1 if b == G.mul(a, x) else 0 for b in G.ids()] for a in G.ids()]))
    lam = structure_constants(B)
    for i in range(4):
        for j in range(4):
            for k in range(4):
                assert lam[i, j, k] == (1 if G.mul(d[i], d[j]) == d[k] else 0)


def test_cocyclic_regular_rep_structure():
    G = elementary_abelian(2)
    omega = cocycle_from_bilinear_form(G, [[0, 1], [0, 0]])
    V = cocyclic_regular_rep(G, omega)
    B = hom_basis(V, V)
    assert len(B) == 4 == hom_dim_oracle(V, V)
    lam = structure_constants(B)
    assert set(np.unique(lam)) <= {-1, 0, 1}
    assert all(np.count_nonzero(lam[i, j]) == 1 for i in range(4) for j in range(4))


def test_structure_constants_reject_bad_basis():
    G = elementary_abelian(1)
    V = cocyclic_regular_rep(G, trivial_cocycle(G))
    B = hom_basis(V, V)
    broken = type(B)(B.source, B.target, B.orbits, (SignMatrix(2, 2, {(0, 1): 1, (1, 0): -1}), B.basis[1]))
    with pytest.raises(InconsistencyError):
        structure_constants(broken)


def test_transpose_and_weight_matrix(z2_4):
    for V in z2_4.values():
        B = hom_basis(V, V)
        tm = transpose_map(B)
        assert sorted(j for j, _ in tm) == list(range(len(B)))
        for i, (j, eps) in enumerate(tm):
            assert np.array_equal(B.basis[i].dense().T, eps * B.basis[j].dense())
        assert check_weight_matrix(V)
        W = weight_matrix(V, B)
        assert W.support == frozenset(c for o in B.orientable_orbits for c in o.cells)
        # every F_i ∘ W is in the span of the signed basis
        for F in unsigned_orbit_basis(V):
            img = F.dense() * W.dense()
            assert not img.any() or any(np.array_equal(img, E.dense()) for E in B.basis)


def test_transpose_map_needs_endomorphisms(z2_4):
    with pytest.raises(HomError):
        transpose_map(hom_basis(z2_4["X"], z2_4["Z"]))


def test_cdm_cases(z2_4):
    s = scenario_z2_4()
    X, Z = z2_4["X"], z2_4["Z"]
    B = hom_basis(X, Z)
    gx, gy = rep_action(X, s.group.ids()), rep_action(Z, s.group.ids())
    assert is_cdm(B.basis[0], gx, gy)
    A = assemble(B, ("a", "b"))
    ones = substitute(A, {"a": [[1]], "b": [[1]]})
    assert is_cdm(ones, gx, gy)
    # half an orbit is not G-stable
    cells = sorted(B.orientable_orbits[0].cells)
    half = SignMatrix(X.dim, Z.dim, {c: 1 for c in cells[: len(cells) // 2]})
    assert not is_cdm(half, gx, gy)


def brute_d_equivalent(A, px, py):
    gA = np.zeros_like(A)
    gA[np.ix_(px, py)] = A
    n, m = A.shape
    return any(
        np.array_equal(gA, np.diag(d1) @ A @ np.diag(d2))
        for d1 in itertools.product((1, -1), repeat=n)
        for d2 in itertools.product((1, -1), repeat=m)
    )


def test_cdm_sign_conflict():
    # swapped Hadamard rows are fixed by a column sign flip
    H2 = np.array([[1, 1], [1, -1]])
    assert is_cdm(H2, [[1, 0]], [[0, 1]]) and brute_d_equivalent(H2, [1, 0], [0, 1])
    # stable support, but no diagonal pair realizes the reversal
    A = np.array([[-1, -1, 1], [0, 0, 0], [-1, 1, -1]])
    rev = [2, 1, 0]
    assert not is_cdm(A, [rev], [rev]) and not brute_d_equivalent(A, rev, rev)


def test_cdm_matches_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(200):
        A = rng.integers(-1, 2, size=(3, 3))
        px, py = list(rng.permutation(3)), list(rng.permutation(3))
        assert is_cdm(A, [px], [py]) == brute_d_equivalent(A, px, py)


def test_antisymmetric_endomorphism_exists():
    # X' of the z2_4 scenario carries an invariant E with E^T = -E, so E^T is not
    # a member of any ±1-normalized orbit basis
    s = scenario_z2_4()
    V = induce(s.group, s.cocycle, s.H_prime, s.chi_prime)
    B = hom_basis(V, V)
    anti = [E.dense() for E in B.basis if np.array_equal(E.dense().T, -E.dense())]
    assert len(anti) == 1
    E = anti[0]
    for g in s.group.ids():
        M = V.dense(g)
        assert np.array_equal(M @ E @ M.T, E)
