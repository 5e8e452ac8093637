"""Enumerated finite groups whose elements are signed permutations.

Every element carries a faithful datum, a signed permutation of a fixed
finite set, and an integer id in ``0..|G|-1``.  The identity always has
id 0.  Multiplication tables are built lazily with numpy.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

DEFAULT_MAX_ORDER = 2**20


class GroupError(ValueError):
    """Bad group input (inconsistent generators, non-subgroups, ...)."""


class GroupSizeError(GroupError):
    """Closure enumeration exceeded the configured bound."""


@dataclass(frozen=True)
class SignedPermutation:
    """Monomial {0,±1} matrix sending basis vector i to ``signs[i] * e[perm[i]]``."""

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        perm = tuple(int(p) for p in self.perm)
        signs = tuple(int(s) for s in self.signs)
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "signs", signs)
        if len(perm) != len(signs):
            raise GroupError(f"perm and signs differ in length: {len(perm)} != {len(signs)}")
        if sorted(perm) != list(range(len(perm))):
            raise GroupError(f"{perm} is not a permutation")
        if any(s not in (1, -1) for s in signs):
            raise GroupError(f"signs must be ±1, got {signs}")

    @classmethod
    def identity(cls, size: int) -> SignedPermutation:
        return cls(tuple(range(size)), (1,) * size)

    @classmethod
    def plain(cls, perm: Sequence[int]) -> SignedPermutation:
        return cls(tuple(perm), (1,) * len(perm))

    @property
    def size(self) -> int:
        return len(self.perm)

    def __mul__(self, other: SignedPermutation) -> SignedPermutation:
        # matrix product self @ other: apply other first
        if self.size != other.size:
            raise GroupError("cannot compose signed permutations of different sizes")
        perm = tuple(self.perm[j] for j in other.perm)
        signs = tuple(other.signs[i] * self.signs[other.perm[i]] for i in range(self.size))
        return SignedPermutation(perm, signs)

    def inverse(self) -> SignedPermutation:
        perm = [0] * self.size
        signs = [1] * self.size
        for i, j in enumerate(self.perm):
            perm[j] = i
            signs[j] = self.signs[i]
        return SignedPermutation(tuple(perm), tuple(signs))

    def scaled(self, c: int) -> SignedPermutation:
        return SignedPermutation(self.perm, tuple(c * s for s in self.signs))

    def is_plain(self) -> bool:
        return all(s == 1 for s in self.signs)

    def to_matrix(self) -> np.ndarray:
        m = np.zeros((self.size, self.size), dtype=np.int64)
        m[list(self.perm), list(range(self.size))] = self.signs
        return m

    def sort_key(self) -> tuple:
        return (self.perm, self.signs)

    def to_json(self) -> dict:
        return {"perm": list(self.perm), "signs": list(self.signs)}


@dataclass(frozen=True)
class GroupElement:
    id: int
    datum: SignedPermutation


class FiniteGroup:
    """A fully enumerated group.  ``data[0]`` must be the identity."""

    def __init__(
        self,
        data: Sequence[SignedPermutation],
        generators: Iterable[int] = (),
        name: str = "",
    ) -> None:
        if not data:
            raise GroupError("a group needs at least the identity")
        self._data = tuple(data)
        degree = self._data[0].size
        if any(d.size != degree for d in self._data):
            raise GroupError("group elements act on sets of different sizes")
        if self._data[0] != SignedPermutation.identity(degree):
            raise GroupError("element 0 must be the identity")
        self._index = {d: i for i, d in enumerate(self._data)}
        if len(self._index) != len(self._data):
            raise GroupError("duplicate group elements")
        self.degree = degree
        self.name = name
        gens = tuple(dict.fromkeys(int(g) for g in generators))
        self._generators = gens or None

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name or '?'}, order={self.order})"

    def __len__(self) -> int:
        return len(self._data)

    @property
    def order(self) -> int:
        return len(self._data)

    @property
    def identity(self) -> int:
        return 0

    def ids(self) -> range:
        return range(self.order)

    def datum(self, g: int) -> SignedPermutation:
        return self._data[g]

    def element(self, g: int) -> GroupElement:
        return GroupElement(g, self._data[g])

    @property
    def elements(self) -> list[GroupElement]:
        return [GroupElement(i, d) for i, d in enumerate(self._data)]

    def index_of(self, datum: SignedPermutation) -> int:
        try:
            return self._index[datum]
        except KeyError:
            raise GroupError(f"{datum} is not an element of {self!r}") from None

    @property
    def generators(self) -> tuple[int, ...]:
        """Generator ids; a greedy generating set is computed when none was given."""
        if self._generators is None:
            self._generators = self._greedy_generators()
        return self._generators

    def _greedy_generators(self) -> tuple[int, ...]:
        gens: list[int] = []
        span = {0}
        for g in self.ids():
            if g not in span:
                gens.append(g)
                span = set(_closure(self, gens))
        return tuple(gens)

    # -- tables --

    @cached_property
    def _perm_array(self) -> np.ndarray:
        return np.array([d.perm for d in self._data], dtype=np.int64).reshape(self.order, self.degree)

    @cached_property
    def _sign_array(self) -> np.ndarray:
        return np.array([d.signs for d in self._data], dtype=np.int64).reshape(self.order, self.degree)

    def _codes(self, perms: np.ndarray, signs: np.ndarray) -> np.ndarray:
        d = self.degree
        bits = max(1, (d - 1).bit_length())
        code = np.zeros(perms.shape[:-1], dtype=np.int64)
        for i in range(d):
            code = (code << bits) | perms[..., i]
        for i in range(d):
            code = (code << 1) | (signs[..., i] < 0)
        return code

    @cached_property
    def table(self) -> np.ndarray:
        """``table[a, b]`` is the id of ``a*b``."""
        n, d = self.order, self.degree
        P, S = self._perm_array, self._sign_array
        out = np.empty((n, n), dtype=np.int64)
        bits = max(1, (d - 1).bit_length())
        if d * bits + d <= 62:
            codes = self._codes(P, S)
            order = np.argsort(codes)
            sorted_codes = codes[order]
            for a in range(n):
                prod_p = P[a][P]
                prod_s = S * S[a][P]
                c = self._codes(prod_p, prod_s)
                pos = np.searchsorted(sorted_codes, c)
                if np.any(pos >= n) or np.any(sorted_codes[np.minimum(pos, n - 1)] != c):
                    raise GroupError("element set is not closed under multiplication")
                out[a] = order[pos]
        else:
            for a in range(n):
                da = self._data[a]
                for b in range(n):
                    out[a, b] = self.index_of(da * self._data[b])
        out.setflags(write=False)
        return out

    @cached_property
    def inverses(self) -> np.ndarray:
        inv = np.array([self.index_of(d.inverse()) for d in self._data], dtype=np.int64)
        inv.setflags(write=False)
        return inv

    def mul(self, a: int, b: int) -> int:
        if "table" in self.__dict__:
            return int(self.table[a, b])
        return self._index[self._data[a] * self._data[b]]

    def inv(self, a: int) -> int:
        return int(self.inverses[a])

    def conj(self, g: int, x: int) -> int:
        """g x g^-1"""
        return self.mul(self.mul(g, x), self.inv(g))

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != 0:
            x = self.mul(x, g)
            k += 1
        return k

    def is_abelian(self) -> bool:
        t = self.table
        return bool(np.array_equal(t, t.T))


def _closure(G: FiniteGroup, gens: Sequence[int]) -> list[int]:
    seen = {0}
    out = [0]
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = G.mul(x, s)
            if y not in seen:
                seen.add(y)
                out.append(y)
                queue.append(y)
    return out


def group_from_generators(
    gens: Sequence[SignedPermutation],
    degree: int | None = None,
    max_order: int = DEFAULT_MAX_ORDER,
    name: str = "",
) -> FiniteGroup:
    """Enumerate the group generated by ``gens``.

    Elements are ordered breadth-first from the identity; each new layer is
    sorted lexicographically on (perm, signs).
    """
    gens = list(gens)
    sizes = {g.size for g in gens}
    if degree is not None:
        sizes.add(degree)
    if len(sizes) > 1:
        raise GroupError(f"generators act on sets of different sizes: {sorted(sizes)}")
    d = sizes.pop() if sizes else 0
    ident = SignedPermutation.identity(d)
    data = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        layer = set()
        for x in frontier:
            for s in gens:
                y = s * x
                if y not in seen:
                    layer.add(y)
        new = sorted(layer, key=SignedPermutation.sort_key)
        seen.update(new)
        data.extend(new)
        if len(data) > max_order:
            raise GroupSizeError(f"group order exceeds the bound {max_order}")
        frontier = new
    index = {x: i for i, x in enumerate(data)}
    return FiniteGroup(data, [index[g] for g in gens if g != ident], name=name)


# -- bundled groups --


def bits_of(value: int, n: int) -> tuple[int, ...]:
    """Bit vector (v_0, ..., v_{n-1}) with v_0 the most significant bit."""
    return tuple((value >> (n - 1 - i)) & 1 for i in range(n))


def flips(bits: Sequence[int]) -> tuple[int, ...]:
    return tuple(-1 if b else 1 for b in bits)


def elementary_abelian(n: int) -> FiniteGroup:
    """(Z/2)^n as diagonal sign matrices; id = the bit vector read as a binary number."""
    if not 1 <= n <= 16:
        raise GroupError(f"elementary_abelian needs 1 <= n <= 16, got {n}")
    ident = tuple(range(n))
    data = [SignedPermutation(ident, flips(bits_of(v, n))) for v in range(2**n)]
    gens = [1 << (n - 1 - i) for i in range(n)]
    return FiniteGroup(data, gens, name=f"Z2^{n}")


def vector_of(G: FiniteGroup, g: int) -> tuple[int, ...]:
    """Bit vector of a diagonal (pure sign-flip) element."""
    d = G.datum(g)
    if d.perm != tuple(range(d.size)):
        raise GroupError(f"element {g} is not a pure sign flip")
    return tuple(1 if s < 0 else 0 for s in d.signs)


def element_from_vector(G: FiniteGroup, bits: Sequence[int]) -> int:
    return G.index_of(SignedPermutation(tuple(range(len(bits))), flips(bits)))


def dihedral_affine(n: int) -> FiniteGroup:
    """The maps x -> a*x + b on Z/n, a = ±1, ordered by (a = +1 first, b).

    The datum is the permutation of Z/n with every sign equal to a, which
    keeps x -> -x distinct from the identity when n = 2.
    """
    if n < 2:
        raise GroupError(f"dihedral_affine needs n >= 2, got {n}")
    data = [
        SignedPermutation(tuple((a * x + b) % n for x in range(n)), (a,) * n)
        for a in (1, -1)
        for b in range(n)
    ]
    return FiniteGroup(data, [1, n], name=f"D{n}")


def affine_element(n: int, a: int, b: int) -> int:
    """Id of x -> a*x + b in ``dihedral_affine(n)``."""
    if a not in (1, -1):
        raise GroupError(f"affine multiplier must be ±1, got {a}")
    return (b % n) + (0 if a == 1 else n)


def wreath_z2_zn(n: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Z/2 wr Z/n as signed cyclic shifts of n positions.

    Element (k, v) rotates position i to i+k and flips the signs picked by v;
    ids are k * 2^n + (v read as a binary number), so ids below 2^n form the
    normal subgroup V = (Z/2)^n.
    """
    if n < 2:
        raise GroupError(f"wreath_z2_zn needs n >= 2, got {n}")
    if n * 2**n > max_order:
        raise GroupSizeError(f"order {n * 2**n} exceeds the bound {max_order}")
    data = [
        SignedPermutation(tuple((i + k) % n for i in range(n)), flips(bits_of(v, n)))
        for k in range(n)
        for v in range(2**n)
    ]
    return FiniteGroup(data, [2**n, 1 << (n - 1)], name=f"Z2wrZ{n}")


def rotation_of(G: FiniteGroup, g: int) -> int:
    """Rotation amount k of a signed cyclic shift."""
    perm = G.datum(g).perm
    k = perm[0] if perm else 0
    if any(perm[i] != (i + k) % len(perm) for i in range(len(perm))):
        raise GroupError(f"element {g} is not a cyclic shift")
    return k


def wreath_element(G: FiniteGroup, k: int, bits: Sequence[int]) -> int:
    n = len(bits)
    return G.index_of(SignedPermutation(tuple((i + k) % n for i in range(n)), flips(bits)))


def base_subgroup(G: FiniteGroup) -> Subgroup:
    """The elements acting as pure sign flips (V in a wreath product)."""
    ident = tuple(range(G.degree))
    return Subgroup(G, tuple(g for g in G.ids() if G.datum(g).perm == ident))


# -- subgroups and cosets --


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: FiniteGroup
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", tuple(sorted(set(int(m) for m in self.members))))
        object.__setattr__(self, "_set", frozenset(self.members))
        G = self.parent
        if 0 not in self._set:
            raise GroupError("subgroup must contain the identity")
        m = np.array(self.members, dtype=np.int64)
        if m.min() < 0 or m.max() >= G.order:
            raise GroupError("subgroup member id out of range")
        if not np.isin(G.inverses[m], m).all():
            raise GroupError("subgroup not closed under inverses")
        closed = np.isin(G.table[np.ix_(m, m)], m)
        if not closed.all():
            a, b = np.argwhere(~closed)[0]
            raise GroupError(f"subgroup not closed under multiplication at ({m[a]}, {m[b]})")

    def __contains__(self, g: int) -> bool:
        return g in self._set

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Subgroup) and other.parent is self.parent and other.members == self.members

    def __hash__(self) -> int:
        return hash((id(self.parent), self.members))

    @property
    def order(self) -> int:
        return len(self.members)

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, members={self.members})"


def subgroup_generated(G: FiniteGroup, gen_ids: Iterable[int]) -> Subgroup:
    gens = [int(g) for g in gen_ids]
    for g in gens:
        if not 0 <= g < G.order:
            raise GroupError(f"element id {g} out of range")
    return Subgroup(G, tuple(_closure(G, gens)))


def whole_group(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, tuple(G.ids()))


def trivial_subgroup(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, (0,))


def conjugate_subgroup(g: int, H: Subgroup) -> Subgroup:
    """g H g^-1"""
    G = H.parent
    return Subgroup(G, tuple(G.conj(g, h) for h in H.members))


def intersect(H1: Subgroup, H2: Subgroup) -> Subgroup:
    if H1.parent is not H2.parent:
        raise GroupError("subgroups of different groups")
    return Subgroup(H1.parent, tuple(h for h in H1.members if h in H2))


@dataclass(frozen=True, eq=False)
class CosetSpace:
    """Cosets g_i H with g = reps[rep_index[g]] * h_part[g]."""

    parent: FiniteGroup
    subgroup: Subgroup
    reps: tuple[int, ...]
    rep_index: np.ndarray
    h_part: np.ndarray

    def coset_of(self, g: int) -> tuple[int, int]:
        return int(self.rep_index[g]), int(self.h_part[g])

    def __len__(self) -> int:
        return len(self.reps)


def right_cosets(G: FiniteGroup, H: Subgroup) -> CosetSpace:
    """Cosets g_i H; each representative is the least id in its coset."""
    if H.parent is not G:
        raise GroupError("H is not a subgroup of G")
    rep_index = np.full(G.order, -1, dtype=np.int64)
    h_part = np.full(G.order, -1, dtype=np.int64)
    reps: list[int] = []
    for g in G.ids():
        if rep_index[g] >= 0:
            continue
        j = len(reps)
        reps.append(g)
        for h in H.members:
            x = G.mul(g, h)
            rep_index[x] = j
            h_part[x] = h
    rep_index.setflags(write=False)
    h_part.setflags(write=False)
    return CosetSpace(G, H, tuple(reps), rep_index, h_part)
