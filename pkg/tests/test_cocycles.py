import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fopkit.cocycles import (
    CocycleError,
    InvalidTrivialization,
    TwoCocycle,
    character_from_generator_values,
    character_from_values,
    cocycle_from_bilinear_form,
    cocycle_from_table,
    is_homomorphism,
    sign_homomorphisms,
    solve_trivialization,
    trivial_character,
    trivial_cocycle,
    twist_character,
    verify_cocycle,
)
from fopkit.constructions import Z2_4_FORM
from fopkit.groups import (
    dihedral_affine,
    element_from_vector,
    elementary_abelian,
    subgroup_generated,
    whole_group,
    wreath_z2_zn,
)

from oracles import all_subgroups_small, all_trivializations, brute_cocycle_ok


@pytest.fixture(scope="module")
def z2_4():
    G = elementary_abelian(4)
    return G, cocycle_from_bilinear_form(G, Z2_4_FORM)


def vec(G, *bits):
    return element_from_vector(G, bits)


def test_bilinear_cocycle_valid(z2_4):
    G, omega = z2_4
    assert verify_cocycle(omega) and brute_cocycle_ok(omega)
    v, w = vec(G, 1, 1, 0, 0), vec(G, 0, 1, 1, 0)
    assert omega(v, w) == (-1) ** (1 * 1 + 1 * 1)  # v0 w1 + v1 w2


def test_flipped_entry_breaks_cocycle():
    G = elementary_abelian(2)
    t = np.ones((4, 4), dtype=np.int8)
    t[1, 2] = -1
    omega = TwoCocycle(G, t)
    assert not verify_cocycle(omega)
    assert not brute_cocycle_ok(omega)
    with pytest.raises(CocycleError):
        cocycle_from_table(G, t)


def test_normalization():
    G = elementary_abelian(1)
    omega = TwoCocycle(G, -np.ones((2, 2), dtype=np.int8))
    assert omega(0, 0) == 1 and omega.is_trivial()


def test_zero_and_identity_forms():
    G = elementary_abelian(2)
    assert cocycle_from_bilinear_form(G, np.zeros((2, 2))).is_trivial()
    omega = cocycle_from_bilinear_form(G, np.eye(2))
    assert omega(vec(G, 1, 0), vec(G, 1, 0)) == -1
    assert omega(vec(G, 1, 0), vec(G, 0, 1)) == 1


def test_bilinear_form_needs_elementary_abelian():
    with pytest.raises(CocycleError):
        cocycle_from_bilinear_form(dihedral_affine(3), np.eye(1))


@pytest.mark.parametrize("G", [dihedral_affine(6), wreath_z2_zn(4), elementary_abelian(3)], ids=str)
def test_trivial_cocycles(G):
    assert verify_cocycle(trivial_cocycle(G))


def test_sampled_verification_on_large_group():
    G = wreath_z2_zn(6)  # order 384, above the exhaustive limit
    assert verify_cocycle(trivial_cocycle(G))
    t = np.ones((G.order, G.order), dtype=np.int8)
    t[1:, 1:] = -1
    assert not verify_cocycle(TwoCocycle(G, t))


def test_z2_4_characters(z2_4):
    G, omega = z2_4
    H = subgroup_generated(G, [vec(G, 1, 1, 1, 1), vec(G, 0, 1, 1, 1)])
    chi = character_from_values(omega, H, {h: 1 if h == 0 else -1 for h in H})
    assert chi(vec(G, 1, 0, 0, 0)) == -1
    K = subgroup_generated(G, [vec(G, 0, 0, 0, 1)])
    assert trivial_character(omega, K).is_trivial()


def test_z2_4_single_flip_rejected_with_witness(z2_4):
    G, omega = z2_4
    Hp = subgroup_generated(G, [vec(G, 1, 1, 1, 1), vec(G, 0, 1, 0, 1)])
    a = vec(G, 0, 1, 0, 1)
    with pytest.raises(InvalidTrivialization) as err:
        character_from_values(omega, Hp, {h: -1 if h == a else 1 for h in Hp})
    h1, h2 = err.value.witness
    assert omega(h1, h2) != (-1 if G.mul(h1, h2) == a else 1) * (-1 if h1 == a else 1) * (-1 if h2 == a else 1)


def test_values_must_cover_subgroup(z2_4):
    G, omega = z2_4
    H = subgroup_generated(G, [vec(G, 0, 0, 0, 1)])
    with pytest.raises(InvalidTrivialization):
        character_from_values(omega, H, {0: 1})


def test_solver_finds_isotropic_and_rejects_anisotropic(z2_4):
    G, omega = z2_4
    H = subgroup_generated(G, [vec(G, 1, 1, 1, 1), vec(G, 0, 1, 1, 1)])
    assert solve_trivialization(omega, H) is not None
    v = vec(G, 1, 1, 0, 0)
    assert omega(v, v) == -1
    bad = subgroup_generated(G, [v, vec(G, 0, 0, 1, 0)])
    assert solve_trivialization(omega, bad) is None
    assert all_trivializations(omega, bad) == []


def test_solver_trivial_cocycle_gives_trivial_character():
    G = dihedral_affine(5)
    chi = solve_trivialization(trivial_cocycle(G), whole_group(G))
    assert chi.is_trivial()


@pytest.mark.parametrize(
    "name",
    ["z2_4", "z2_4_identity_form", "d6", "wreath3"],
)
def test_solver_matches_exhaustive_search(name):
    if name.startswith("z2_4"):
        G = elementary_abelian(4)
        omega = cocycle_from_bilinear_form(G, Z2_4_FORM if name == "z2_4" else np.eye(4))
    elif name == "d6":
        G = dihedral_affine(6)
        omega = trivial_cocycle(G)
    else:
        G = wreath_z2_zn(3)
        omega = trivial_cocycle(G)
    subgroups = all_subgroups_small(G)
    if G.order == 16:
        assert max(len(H) for H in subgroups) == 16
    for H in subgroups:
        chi = solve_trivialization(omega, H)
        brute = all_trivializations(omega, H)
        assert (chi is None) == (not brute)
        if chi is not None:
            assert dict(chi.values) in brute
            # solutions form a coset of Hom(H, ±1)
            assert len(brute) == len(sign_homomorphisms(H))


def test_twist_preserves_trivializations(z2_4):
    G, omega = z2_4
    for H in all_subgroups_small(G):
        chi = solve_trivialization(omega, H)
        if chi is None:
            continue
        for psi in sign_homomorphisms(H):
            twisted = twist_character(chi, psi)
            assert dict(twisted.values) in all_trivializations(omega, H)


def test_sign_homomorphisms_trivial_first():
    G = elementary_abelian(3)
    homs = sign_homomorphisms(whole_group(G))
    assert len(homs) == 8 and all(v == 1 for v in homs[0].values())
    assert all(is_homomorphism(whole_group(G), h) for h in homs)


def test_twist_rejects_non_homomorphism(z2_4):
    G, omega = z2_4
    H = subgroup_generated(G, [vec(G, 1, 1, 1, 1), vec(G, 0, 1, 1, 1)])
    chi = character_from_values(omega, H, {h: 1 if h == 0 else -1 for h in H})
    with pytest.raises(CocycleError):
        twist_character(chi, {h: 1 if h == 0 else -1 for h in H})


def test_twist_order_two():
    G = dihedral_affine(4)
    omega = trivial_cocycle(G)
    H = subgroup_generated(G, [G.generators[1]])
    chi = trivial_character(omega, H)
    flipped = twist_character(chi, {0: 1, G.generators[1]: -1})
    assert flipped(G.generators[1]) == -1


def test_generator_values_extend(z2_4):
    G, omega = z2_4
    gens = [vec(G, 1, 1, 1, 1), vec(G, 0, 1, 1, 1)]
    H = subgroup_generated(G, gens)
    chi = character_from_generator_values(omega, H, gens, [-1, -1])
    assert dict(chi.values) in all_trivializations(omega, H)


def test_generator_values_inconsistent():
    G = dihedral_affine(4)
    omega = trivial_cocycle(G)
    r = G.generators[0]
    H = subgroup_generated(G, [r])
    # a -1 on a generator of order 4 is fine; on its square it conflicts with r*r
    with pytest.raises(InvalidTrivialization):
        character_from_generator_values(omega, H, [r, G.mul(r, r)], [-1, -1])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=9, max_size=9))
def test_bilinear_forms_are_cocycles(bits):
    G = elementary_abelian(3)
    omega = cocycle_from_bilinear_form(G, np.array(bits).reshape(3, 3))
    assert verify_cocycle(omega)
    for H in [subgroup_generated(G, [1, 2]), subgroup_generated(G, [7])]:
        chi = solve_trivialization(omega, H)
        assert (chi is None) == (not all_trivializations(omega, H))
