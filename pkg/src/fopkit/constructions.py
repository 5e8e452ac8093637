"""End-to-end builders for formal orthogonal and amicable pairs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cocycles import (
    SignCharacter,
    TwoCocycle,
    character_from_generator_values,
    character_from_values,
    cocycle_from_bilinear_form,
    trivial_cocycle,
)
from .formal import (
    FormalMatrix,
    diagonal_profile,
    gram,
    is_symmetric,
    is_zero,
    mul_transpose,
    orthogonality_transfer_check,
    substitute,
    sylvester_hadamard,
    assemble,
)
from .groups import (
    FiniteGroup,
    Subgroup,
    affine_element,
    dihedral_affine,
    element_from_vector,
    elementary_abelian,
    rotation_of,
    subgroup_generated,
    wreath_element,
    wreath_z2_zn,
)
from .hom import HomBasis, hom_basis, hom_dim_oracle, orientable_by_stabilizer, pair_orbits
from .induced import InducedRep, induce


class ConstructionError(RuntimeError):
    """A construction step failed; ``step`` names it."""

    def __init__(self, step: str, message: str) -> None:
        super().__init__(f"{step}: {message}")
        self.step = step


class DegenerateScenario(ConstructionError):
    pass


@dataclass(frozen=True, eq=False)
class FopScenario:
    name: str
    group: FiniteGroup
    cocycle: TwoCocycle
    H: Subgroup
    chi: SignCharacter
    H_prime: Subgroup
    chi_prime: SignCharacter
    K: Subgroup
    chi_K: SignCharacter
    symbols_a: tuple[str, ...] | None = None
    symbols_b: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        for H, chi in ((self.H, self.chi), (self.H_prime, self.chi_prime), (self.K, self.chi_K)):
            # raises InvalidTrivialization on failure
            character_from_values(self.cocycle, H, chi.values)
        if self.symbols_a and self.symbols_b and set(self.symbols_a) & set(self.symbols_b):
            raise ValueError("the two factors need disjoint symbol sets")


@dataclass
class OrbitCensus:
    total: int
    orientable: int
    oracle_dim: int
    stabilizer_orientable: int

    @property
    def agree(self) -> bool:
        return self.orientable == self.oracle_dim == self.stabilizer_orientable


@dataclass
class FopResult:
    scenario: FopScenario
    A: FormalMatrix
    B: FormalMatrix
    reps: dict[str, InducedRep]
    bases: dict[str, HomBasis]
    census: dict[str, OrbitCensus]
    orthogonal: bool
    formal_zero: bool
    transfer_ok: bool | None

    @property
    def report(self) -> dict:
        return {
            "census": {k: vars(v) | {"agree": v.agree} for k, v in self.census.items()},
            "orthogonal": self.orthogonal,
            "formal_zero": self.formal_zero,
            "transfer_ok": self.transfer_ok,
        }


def census(V: InducedRep, W: InducedRep, B: HomBasis | None = None) -> OrbitCensus:
    orbits = B.orbits if B is not None else tuple(pair_orbits(V, W))
    return OrbitCensus(
        total=len(orbits),
        orientable=sum(o.orientable for o in orbits),
        oracle_dim=hom_dim_oracle(V, W),
        stabilizer_orientable=sum(orientable_by_stabilizer(V, W, o) for o in orbits),
    )


def default_symbols(start: str, count: int) -> tuple[str, ...]:
    if count > 26 - (ord(start) - ord("a")):
        return tuple(f"{start}{k}" for k in range(count))
    return tuple(chr(ord(start) + k) for k in range(count))


def build_fop(s: FopScenario, transfer_trials: int = 20, seed: int = 0) -> FopResult:
    """A from Hom(V_H, V_K), B from Hom(V_H', V_K); orthogonal when Hom(V_H, V_H') = 0."""
    G, omega = s.group, s.cocycle
    V = induce(G, omega, s.H, s.chi, name="X")
    Vp = induce(G, omega, s.H_prime, s.chi_prime, name="X'")
    Z = induce(G, omega, s.K, s.chi_K, name="Z")
    bA = hom_basis(V, Z)
    bB = hom_basis(Vp, Z)
    bX = hom_basis(V, Vp)
    if not bA.basis or not bB.basis:
        raise DegenerateScenario("build_fop", "one of the factors has an empty orbit basis")
    syms_a = s.symbols_a or default_symbols("a", len(bA))
    syms_b = s.symbols_b or default_symbols(chr(ord("a") + len(syms_a)), len(bB))
    if len(syms_a) != len(bA) or len(syms_b) != len(bB):
        raise ConstructionError(
            "build_fop", f"scenario names {len(syms_a)}+{len(syms_b)} symbols, bases need {len(bA)}+{len(bB)}"
        )
    if set(syms_a) & set(syms_b):
        raise ConstructionError("build_fop", "symbol reuse across the two factors")
    A = assemble(bA, syms_a)
    B = assemble(bB, syms_b)
    orthogonal = len(bX.basis) == 0
    formal_zero = is_zero(mul_transpose(A, B))
    if orthogonal and not formal_zero:
        raise ConstructionError("build_fop", "Hom(X, X') = 0 but A B^T is not formally zero")
    transfer = orthogonality_transfer_check(A, B, transfer_trials, seed) if orthogonal else None
    if transfer is False:
        raise ConstructionError("build_fop", "block substitution broke orthogonality")
    return FopResult(
        scenario=s,
        A=A,
        B=B,
        reps={"X": V, "X'": Vp, "Z": Z},
        bases={"XxZ": bA, "X'xZ": bB, "XxX'": bX},
        census={"XxZ": census(V, Z, bA), "X'xZ": census(Vp, Z, bB), "XxX'": census(V, Vp, bX)},
        orthogonal=orthogonal,
        formal_zero=formal_zero,
        transfer_ok=transfer,
    )


# -- (Z/2)^4 --

Z2_4_FORM = ((0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (1, 0, 0, 0))


def scenario_z2_4() -> FopScenario:
    """ω(v, w) = (-1)^(Σ_i v_i w_{i+1 mod 4}) on (Z/2)^4.

    χ' is -1 on (0,1,0,1) and (1,0,1,0): ω is identically +1 on H', so χ'
    must be a homomorphism, and this is the one with χ'(1,1,1,1) = +1.
    """
    G = elementary_abelian(4)
    omega = cocycle_from_bilinear_form(G, Z2_4_FORM)
    v = lambda *bits: element_from_vector(G, bits)  # noqa: E731
    H = subgroup_generated(G, [v(1, 1, 1, 1), v(0, 1, 1, 1)])
    Hp = subgroup_generated(G, [v(1, 1, 1, 1), v(0, 1, 0, 1)])
    K = subgroup_generated(G, [v(0, 0, 0, 1)])
    chi = character_from_values(omega, H, {h: 1 if h == 0 else -1 for h in H})
    flipped = {v(0, 1, 0, 1), v(1, 0, 1, 0)}
    chi_p = character_from_values(omega, Hp, {h: -1 if h in flipped else 1 for h in Hp})
    chi_k = character_from_values(omega, K, {h: 1 for h in K})
    return FopScenario("z2_4", G, omega, H, chi, Hp, chi_p, K, chi_k, ("a", "b"), ("c", "d"))


# -- wreath family --


def circulant(rho: Sequence[int]) -> np.ndarray:
    """C[i, j] = rho[j - i mod n]; row i is rho shifted right by i."""
    rho = np.asarray(rho, dtype=np.int64)
    n = len(rho)
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return rho[idx]


def circulant_condition(rho1: Sequence[int], rho2: Sequence[int], off_diagonal_only: bool = False) -> bool:
    """(C1 C2^T)[i, j] < (|C1| |C2|^T)[i, j] for all (i, j), or all i != j."""
    C1, C2 = circulant(rho1), circulant(rho2)
    lhs = C1 @ C2.T
    rhs = np.abs(C1) @ np.abs(C2).T
    strict = lhs < rhs
    if off_diagonal_only:
        strict |= np.eye(len(strict), dtype=bool)
    return bool(strict.all())


def circulant_check(rho1: Sequence[int], rho2: Sequence[int], rho3: Sequence[int]) -> tuple[bool, bool]:
    """(orthogonality condition on (ρ1, ρ2), off-diagonal condition on ρ1).

    ρ3 only fixes the common length; the conditions involve the row factors.
    """
    n = len(rho1)
    if len(rho2) != n or len(rho3) != n:
        raise ValueError("profiles must share one length")
    for rho in (rho1, rho2, rho3):
        if any(x not in (-1, 0, 1) for x in rho):
            raise ValueError("profile entries must lie in {0, ±1}")
    return circulant_condition(rho1, rho2), circulant_condition(rho1, rho1, off_diagonal_only=True)


def wreath_profiles(n: int) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    rho1 = (-1,) + (1,) * (n - 1)
    rho2 = (1, -1, -1) + (1,) * (n - 3)
    rho3 = (0, 0, 0) + (1,) * (n - 3)
    return rho1, rho2, rho3


def profile_subgroup(G: FiniteGroup, omega: TwoCocycle, rho: Sequence[int]) -> tuple[Subgroup, SignCharacter]:
    """H spanned by the flips e_k with ρ[k] != 0, χ(e_k) = ρ[k]."""
    n = len(rho)
    gens, vals = [], []
    for k, r in enumerate(rho):
        if r:
            gens.append(wreath_element(G, 0, [1 if i == k else 0 for i in range(n)]))
            vals.append(r)
    H = subgroup_generated(G, gens)
    return H, character_from_generator_values(omega, H, gens, vals)


def scenario_wreath(n: int, profiles=None) -> FopScenario:
    if n < 4:
        raise ValueError(f"the wreath family needs n >= 4, got {n}")
    rho1, rho2, rho3 = profiles or wreath_profiles(n)
    G = wreath_z2_zn(n)
    omega = trivial_cocycle(G)
    H1, chi1 = profile_subgroup(G, omega, rho1)
    H2, chi2 = profile_subgroup(G, omega, rho2)
    H3, chi3 = profile_subgroup(G, omega, rho3)
    return FopScenario(f"wreath{n}", G, omega, H1, chi1, H2, chi2, H3, chi3, ("a", "b", "c"), ("d", "e"))


@dataclass
class PartialWeighing:
    n: int
    fop: FopResult
    row_shift: int
    zeroed_symbol: str
    C: FormalMatrix
    P: np.ndarray
    profile_a: str
    profile_b: str
    checks: dict[str, bool] = field(default_factory=dict)


def _row_rotations(V: InducedRep) -> list[int]:
    return [rotation_of(V.group, g) for g in V.cosets.reps]


def build_partial_weighing(n: int, hadamard: np.ndarray | None = None) -> PartialWeighing:
    """P of size 4n x 8n with P P^T = 32 I from the wreath FOP.

    Rows of B are re-indexed by a rotation x V -> x r^s V (a G-equivariant
    bijection X' -> X) chosen so that A and B have disjoint supports; the
    first shift s = 0, 1, ... that works is used.
    """
    step = "scenario"
    try:
        s = scenario_wreath(n)
        res = build_fop(s)
    except ValueError as exc:
        raise ConstructionError(step, str(exc)) from exc
    checks: dict[str, bool] = {}
    rho1, rho2, rho3 = wreath_profiles(n)
    checks["circulant_conditions"] = all(circulant_check(rho1, rho2, rho3))
    checks["orthogonal"] = res.orthogonal and res.formal_zero
    if not checks["orthogonal"]:
        raise ConstructionError("orthogonality", "A B^T is not formally zero")
    A, B = res.A, res.B
    bA, bB = res.bases["XxZ"], res.bases["X'xZ"]
    checks["orbit_counts"] = len(bA) == 3 and len(bB) == 2
    if not checks["orbit_counts"]:
        raise ConstructionError("orbit counts", f"A has {len(bA)} orientable orbits, B has {len(bB)}")
    per_row = [
        sorted({sum(1 for (i, _) in E.entries if i == r) for r in range(A.rows)}) for E in bA.basis + bB.basis
    ]
    checks["row_weight_8"] = all(w == [8] for w in per_row)
    if not checks["row_weight_8"]:
        raise ConstructionError("row weights", f"orbit row weights {per_row}")
    prof_a = diagonal_profile(mul_transpose(A, A))
    prof_b = diagonal_profile(mul_transpose(B, B))
    checks["gram_a_24"] = prof_a is not None and prof_a.mass() == 24
    checks["gram_b_16"] = prof_b is not None and prof_b.mass() == 16
    if not (checks["gram_a_24"] and checks["gram_b_16"]):
        raise ConstructionError("formal Gram", f"AA^T profile {prof_a}, BB^T profile {prof_b}")

    rot_a = _row_rotations(res.reps["X"])
    rot_b = _row_rotations(res.reps["X'"])
    row_of_a = {k: i for i, k in enumerate(rot_a)}
    shift = None
    for cand in range(n):
        order = [0] * len(rot_b)
        # row of A with rotation k receives B's row with rotation k - cand
        for j, k in enumerate(rot_b):
            order[row_of_a[(k + cand) % n]] = j
        Bs = B.permute_rows(order)
        if not (A.support() & Bs.support()):
            shift = cand
            break
    checks["disjoint_supports"] = shift is not None
    if shift is None:
        raise ConstructionError("disjoint supports", f"no row alignment separates A and B for n = {n}")
    C = A + Bs
    prof_c = diagonal_profile(mul_transpose(C, C))
    checks["gram_c_40"] = prof_c is not None and prof_c.mass() == 40
    if not checks["gram_c_40"]:
        raise ConstructionError("combined Gram", f"CC^T profile {prof_c}")

    H4 = sylvester_hadamard(4) if hadamard is None else np.asarray(hadamard, dtype=np.int64)
    symbols = list(res.scenario.symbols_a) + list(res.scenario.symbols_b)
    counts = C.symbol_counts()
    target = 32 * C.rows
    for zero in symbols:
        if sum(c for s_, c in counts.items() if s_ != zero) != target:
            continue
        live = [s_ for s_ in symbols if s_ != zero]
        blocks = {s_: H4[:, [k]] for k, s_ in enumerate(live)}
        blocks[zero] = np.zeros((4, 1), dtype=np.int64)
        P = substitute(C, blocks)
        row_ok = bool(((P != 0).sum(axis=1) == 32).all())
        gram_ok = bool(np.array_equal(gram(P), 32 * np.eye(4 * n, dtype=np.int64)))
        if row_ok and gram_ok:
            checks["row_weight_32"] = True
            checks["gram_32"] = True
            return PartialWeighing(n, res, shift, zero, C, P, str(prof_a), str(prof_b), checks)
    raise ConstructionError("substitution", "no choice of zeroed symbol gives P P^T = 32 I")


def partial_weighing(n: int) -> np.ndarray:
    if n < 5:
        raise ConstructionError("range", f"partial_weighing is supported for n >= 5, got {n}")
    return build_partial_weighing(n).P


# -- amicable pairs --


@dataclass(frozen=True, eq=False)
class AmicableScenario:
    name: str
    group: FiniteGroup
    cocycle: TwoCocycle
    H: Subgroup
    chi: SignCharacter
    H_prime: Subgroup
    chi_prime: SignCharacter
    symbols_a: tuple[str, ...] | None = None
    symbols_b: tuple[str, ...] | None = None


@dataclass
class AmicableResult:
    A: FormalMatrix
    B: FormalMatrix
    basis: HomBasis
    census: dict[str, OrbitCensus]
    symmetric: bool
    transfer_ok: bool

    @property
    def report(self) -> dict:
        return {
            "census": {k: vars(v) | {"agree": v.agree} for k, v in self.census.items()},
            "symmetric": self.symmetric,
            "transfer_ok": self.transfer_ok,
        }


def symmetric_orbit_violation(V: InducedRep) -> tuple[int, int] | None:
    """A cell (x, y) of X x X whose orbit misses (y, x), or None."""
    for o in pair_orbits(V, V):
        cells = set(o.cells)
        for x, y in o.cells:
            if (y, x) not in cells:
                return (x, y)
    return None


def build_amicable(
    G: FiniteGroup,
    omega: TwoCocycle,
    H: Subgroup,
    chi: SignCharacter,
    H_prime: Subgroup,
    chi_prime: SignCharacter,
    symbols_a: Sequence[str] | None = None,
    symbols_b: Sequence[str] | None = None,
    transfer_trials: int = 20,
    seed: int = 0,
) -> AmicableResult:
    """Two assemblies of one Hom(V_H, V_H') basis with disjoint symbols."""
    V = induce(G, omega, H, chi, name="X")
    bad = symmetric_orbit_violation(V)
    if bad is not None:
        raise ConstructionError("precondition", f"the orbit of cell {bad} on X x X is not symmetric")
    Vp = induce(G, omega, H_prime, chi_prime, name="Y")
    basis = hom_basis(V, Vp)
    if not basis.basis:
        raise DegenerateScenario("build_amicable", "Hom(X, Y) has an empty orbit basis")
    syms_a = tuple(symbols_a) if symbols_a else default_symbols("a", len(basis))
    syms_b = tuple(symbols_b) if symbols_b else default_symbols(chr(ord("a") + len(syms_a)), len(basis))
    if len(syms_a) != len(basis) or len(syms_b) != len(basis):
        raise ConstructionError("build_amicable", f"need {len(basis)} symbols per factor")
    if set(syms_a) & set(syms_b):
        raise ConstructionError("build_amicable", "symbol reuse across the two factors")
    A = assemble(basis, syms_a)
    B = assemble(basis, syms_b)
    symmetric = is_symmetric(mul_transpose(A, B))
    transfer = orthogonality_transfer_check(A, B, transfer_trials, seed, mode="amicable")
    return AmicableResult(
        A, B, basis, {"XxY": census(V, Vp, basis), "XxX": census(V, V)}, symmetric, transfer
    )


def scenario_dihedral_amicable(n: int) -> AmicableScenario:
    """H = {x -> ±x}, H' = {id, x -> x + n/2}, ω = 1, both characters nontrivial."""
    if n % 2:
        raise ValueError(f"the dihedral amicable scenario needs even n, got {n}")
    G = dihedral_affine(n)
    omega = trivial_cocycle(G)
    refl = affine_element(n, -1, 0)
    half = affine_element(n, 1, n // 2)
    H = subgroup_generated(G, [refl])
    Hp = subgroup_generated(G, [half])
    chi = character_from_generator_values(omega, H, [refl], [-1])
    chi_p = character_from_generator_values(omega, Hp, [half], [-1])
    return AmicableScenario(f"dihedral{n}", G, omega, H, chi, Hp, chi_p)


def run_amicable(s: AmicableScenario, **kw) -> AmicableResult:
    return build_amicable(s.group, s.cocycle, s.H, s.chi, s.H_prime, s.chi_prime, s.symbols_a, s.symbols_b, **kw)
