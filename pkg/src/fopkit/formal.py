"""Matrices over the free noncommutative ring Z{symbols}.

Products of the shape X Y^T concatenate words in order: entry (i, j) of
``mul_transpose(X, Y)`` is Σ_t X[i,t] Y[j,t].  Under block substitution a
word s1 s2 stands for block(s1) @ block(s2).T, and ``formal_transpose``
reverses every word, which matches transposing that block product.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .hom import HomBasis

Word = tuple[str, ...]

SYMBOL_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class FormalError(ValueError):
    pass


class FreePoly:
    """Sparse Z-linear combination of words; the empty word is the unit."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, int] | None = None) -> None:
        self.terms: dict[Word, int] = {}
        if terms:
            for w, c in terms.items():
                if c:
                    self.terms[tuple(w)] = int(c)

    @classmethod
    def symbol(cls, name: str, coeff: int = 1) -> FreePoly:
        return cls({(name,): coeff})

    @classmethod
    def const(cls, c: int) -> FreePoly:
        return cls({(): c})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = FreePoly.const(other)
        return isinstance(other, FreePoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __neg__(self) -> FreePoly:
        return FreePoly({w: -c for w, c in self.terms.items()})

    def __add__(self, other: FreePoly) -> FreePoly:
        out = dict(self.terms)
        for w, c in other.terms.items():
            v = out.get(w, 0) + c
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        return FreePoly(out)

    def __sub__(self, other: FreePoly) -> FreePoly:
        return self + (-other)

    def __mul__(self, other: FreePoly | int) -> FreePoly:
        if isinstance(other, int):
            return FreePoly({w: c * other for w, c in self.terms.items()})
        out: dict[Word, int] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                out[w] = out.get(w, 0) + c1 * c2
        return FreePoly(out)

    __rmul__ = __mul__

    def reversed(self) -> FreePoly:
        return FreePoly({w[::-1]: c for w, c in self.terms.items()})

    def mass(self) -> int:
        return sum(self.terms.values())

    def symbols(self) -> set[str]:
        return {s for w in self.terms for s in w}

    def as_signed_symbol(self) -> tuple[int, str] | None:
        """(±1, name) when the polynomial is ± a single symbol."""
        if len(self.terms) != 1:
            return None
        (w, c), = self.terms.items()
        if len(w) == 1 and c in (1, -1):
            return c, w[0]
        return None

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in sorted(self.terms.items()):
            body = "*".join(w) if w else ""
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"FreePoly({self})"


ZERO = FreePoly()


@dataclass(frozen=True, eq=False)
class FormalMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[FreePoly, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[FreePoly]]) -> FormalMatrix:
        entries = tuple(tuple(r) for r in rows)
        ncols = len(entries[0]) if entries else 0
        if any(len(r) != ncols for r in entries):
            raise FormalError("ragged formal matrix")
        return cls(len(entries), ncols, entries)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> FormalMatrix:
        return cls(rows, cols, tuple(tuple(ZERO for _ in range(cols)) for _ in range(rows)))

    @classmethod
    def from_tokens(cls, grid: Sequence[Sequence[str]]) -> FormalMatrix:
        """Tokens are ``0``, ``name`` or ``-name``."""
        return cls.from_rows([[_parse_token(t) for t in row] for row in grid])

    def __getitem__(self, ij: tuple[int, int]) -> FreePoly:
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FormalMatrix) and self.entries == other.entries

    def __add__(self, other: FormalMatrix) -> FormalMatrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise FormalError("shape mismatch in addition")
        return FormalMatrix.from_rows(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)]
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def symbols(self) -> set[str]:
        return {s for row in self.entries for p in row for s in p.symbols()}

    def symbol_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for row in self.entries:
            for p in row:
                for w, c in p.terms.items():
                    for s in w:
                        counts[s] = counts.get(s, 0) + abs(c)
        return dict(sorted(counts.items()))

    def is_signed_symbol_matrix(self) -> bool:
        """Every entry is 0 or ± a single symbol."""
        return all(p.is_zero() or p.as_signed_symbol() is not None for row in self.entries for p in row)

    def support(self) -> set[tuple[int, int]]:
        return {(i, j) for i, row in enumerate(self.entries) for j, p in enumerate(row) if p}

    def row_weights(self) -> list[int]:
        return [sum(1 for p in row if p) for row in self.entries]

    def permute_rows(self, order: Sequence[int]) -> FormalMatrix:
        """Row r of the result is row order[r] of self."""
        return FormalMatrix.from_rows([self.entries[k] for k in order])

    def to_tokens(self) -> list[list[str]]:
        out = []
        for row in self.entries:
            toks = []
            for p in row:
                if p.is_zero():
                    toks.append("0")
                    continue
                ss = p.as_signed_symbol()
                if ss is None:
                    raise FormalError(f"entry {p} is not 0 or ± a symbol")
                toks.append(ss[1] if ss[0] == 1 else "-" + ss[1])
            out.append(toks)
        return out

    def to_text(self) -> str:
        toks = self.to_tokens()
        width = max((len(t) for row in toks for t in row), default=1)
        lines = [f"{self.rows} {self.cols}"]
        lines += [" ".join(t.rjust(width) for t in row) for row in toks]
        return "\n".join(lines) + "\n"

    def __str__(self) -> str:
        return "\n".join("[" + ", ".join(str(p) for p in row) + "]" for row in self.entries)


def _parse_token(tok: str) -> FreePoly:
    if tok == "0":
        return ZERO
    sign = 1
    name = tok
    if tok.startswith("-"):
        sign, name = -1, tok[1:]
    elif tok.startswith("+"):
        name = tok[1:]
    if not SYMBOL_RE.match(name):
        raise FormalError(f"bad matrix token {tok!r}")
    return FreePoly.symbol(name, sign)


def parse_formal_text(text: str) -> FormalMatrix:
    """Read the grid format: header ``rows cols`` then whitespace-separated tokens."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise FormalError("empty matrix file")
    head = lines[0].split()
    try:
        rows, cols = int(head[0]), int(head[1])
    except (IndexError, ValueError):
        raise FormalError("line 1: header must be 'rows cols'") from None
    if len(head) != 2:
        raise FormalError("line 1: header must be 'rows cols'")
    body = [ln.split() for ln in lines[1:]]
    if len(body) != rows:
        raise FormalError(f"expected {rows} rows, found {len(body)}")
    for k, row in enumerate(body, start=2):
        if len(row) != cols:
            raise FormalError(f"row {k - 1}: expected {cols} entries, found {len(row)}")
    return FormalMatrix.from_tokens(body)


def assemble(basis: HomBasis, symbols: Sequence[str]) -> FormalMatrix:
    """Σ symbol_i E_i over a disjoint-support orbit basis."""
    if len(symbols) != len(basis.basis):
        raise FormalError(f"need {len(basis.basis)} symbols, got {len(symbols)}")
    if len(set(symbols)) != len(symbols):
        raise FormalError("symbols must be distinct")
    for s in symbols:
        if not SYMBOL_RE.match(s):
            raise FormalError(f"bad symbol name {s!r}")
    rows, cols = basis.source.dim, basis.target.dim
    grid = [[ZERO] * cols for _ in range(rows)]
    for s, E in zip(symbols, basis.basis):
        for (i, j), v in E.entries.items():
            if grid[i][j]:
                raise FormalError("basis supports overlap")
            grid[i][j] = FreePoly.symbol(s, v)
    return FormalMatrix.from_rows(grid)


def mul_transpose(A: FormalMatrix, B: FormalMatrix) -> FormalMatrix:
    """A B^T with words concatenated as (A entry)(B entry)."""
    if A.cols != B.cols:
        raise FormalError(f"shape mismatch: {A.shape} vs {B.shape}")
    rows = []
    for ra in A.entries:
        nz = [(t, p) for t, p in enumerate(ra) if p]
        row = []
        for rb in B.entries:
            acc: dict[Word, int] = {}
            for t, p in nz:
                q = rb[t]
                if not q:
                    continue
                for w1, c1 in p.terms.items():
                    for w2, c2 in q.terms.items():
                        w = w1 + w2
                        acc[w] = acc.get(w, 0) + c1 * c2
            row.append(FreePoly(acc))
        rows.append(row)
    return FormalMatrix.from_rows(rows)


def formal_transpose(P: FormalMatrix) -> FormalMatrix:
    return FormalMatrix.from_rows([[P.entries[i][j].reversed() for i in range(P.rows)] for j in range(P.cols)])


def is_zero(P: FormalMatrix) -> bool:
    return all(p.is_zero() for row in P.entries for p in row)


def is_symmetric(P: FormalMatrix) -> bool:
    """P[i, j] == P[j, i] as ring elements (no word reversal)."""
    if P.rows != P.cols:
        return False
    return all(P.entries[i][j] == P.entries[j][i] for i in range(P.rows) for j in range(i + 1, P.rows))


def diagonal_profile(P: FormalMatrix) -> FreePoly | None:
    """The common diagonal entry if P = p·I, else None."""
    if P.rows != P.cols:
        raise FormalError("diagonal profile needs a square matrix")
    if P.rows == 0:
        return ZERO
    d = P.entries[0][0]
    for i in range(P.rows):
        for j in range(P.cols):
            p = P.entries[i][j]
            if i == j:
                if p != d:
                    return None
            elif p:
                return None
    return d


# -- numeric side --


def _blocks_shape(blocks: Mapping[str, np.ndarray]) -> tuple[int, int]:
    shapes = {np.asarray(b).shape for b in blocks.values()}
    if len(shapes) != 1:
        raise FormalError(f"blocks must share one shape, got {sorted(shapes)}")
    shape = shapes.pop()
    if len(shape) != 2:
        raise FormalError("blocks must be 2-dimensional")
    return shape


def substitute(P: FormalMatrix, blocks: Mapping[str, np.ndarray]) -> np.ndarray:
    """Replace each symbol by an integer block; 0 becomes the zero block."""
    blocks = {k: np.asarray(v, dtype=np.int64) for k, v in blocks.items()}
    r, c = _blocks_shape(blocks)
    missing = P.symbols() - set(blocks)
    if missing:
        raise FormalError(f"unmapped symbols: {sorted(missing)}")
    out = np.zeros((P.rows * r, P.cols * c), dtype=np.int64)
    for i, row in enumerate(P.entries):
        for j, p in enumerate(row):
            for w, coeff in p.terms.items():
                if len(w) != 1:
                    raise FormalError("substitute handles linear entries only; use substitute_quadratic")
                out[i * r : (i + 1) * r, j * c : (j + 1) * c] += coeff * blocks[w[0]]
    return out


def substitute_quadratic(P: FormalMatrix, blocks: Mapping[str, np.ndarray]) -> np.ndarray:
    """Evaluate words s1 s2 as block(s1) @ block(s2).T."""
    blocks = {k: np.asarray(v, dtype=np.int64) for k, v in blocks.items()}
    r, _ = _blocks_shape(blocks)
    out = np.zeros((P.rows * r, P.cols * r), dtype=np.int64)
    for i, row in enumerate(P.entries):
        for j, p in enumerate(row):
            for w, coeff in p.terms.items():
                if len(w) != 2:
                    raise FormalError("substitute_quadratic handles words of length 2 only")
                out[i * r : (i + 1) * r, j * r : (j + 1) * r] += coeff * (blocks[w[0]] @ blocks[w[1]].T)
    return out


def gram(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64)
    return M @ M.T


def sylvester_hadamard(order: int) -> np.ndarray:
    """Sylvester H(2^k); H(4) rows are ++++, +-+-, ++--, +--+."""
    if order < 1 or order & (order - 1):
        raise FormalError("Sylvester construction needs a power of two")
    H = np.ones((1, 1), dtype=np.int64)
    while H.shape[0] < order:
        H = np.block([[H, H], [H, -H]])
    return H


def is_block_symmetric(M: np.ndarray, r: int) -> bool:
    """Block (i, j) equals block (j, i) for an (n r) x (n r) matrix of r x r blocks."""
    n = M.shape[0] // r
    if M.shape != (n * r, n * r):
        return False
    B = M.reshape(n, r, n, r)
    return bool(np.array_equal(B, B.transpose(2, 1, 0, 3)))


def random_blocks(symbols: Iterable[str], shape: tuple[int, int], rng: np.random.Generator) -> dict[str, np.ndarray]:
    return {s: rng.integers(-3, 4, size=shape) for s in sorted(symbols)}


def orthogonality_transfer_check(
    A: FormalMatrix,
    B: FormalMatrix,
    trials: int = 20,
    seed: int = 0,
    mode: str = "orthogonal",
) -> bool:
    """Substitute random integer blocks (entries in [-3, 3]) and test the numeric product.

    ``orthogonal``: A_s B_s^T = 0 for random rectangular block shapes.
    ``amicable``: A_s B_s^T is block-symmetric (block (i,j) = block (j,i)).
    """
    if mode not in ("orthogonal", "amicable"):
        raise FormalError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    syms = A.symbols() | B.symbols()
    if not syms:
        return True  # both matrices are zero
    for _ in range(trials):
        shape = (int(rng.integers(1, 4)), int(rng.integers(1, 4)))
        blocks = random_blocks(syms, shape, rng)
        prod = substitute(A, blocks) @ substitute(B, blocks).T
        if mode == "orthogonal":
            if prod.any():
                return False
        elif not is_block_symmetric(prod, shape[0]):
            return False
    return True
