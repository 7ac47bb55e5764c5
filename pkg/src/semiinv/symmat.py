"""Matrices with polynomial entries and division-free determinants."""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import permutations
from typing import Callable, Sequence

from .poly import Polynomial, parse, serialize
from .ring import ZZ, CoefficientRing, t_var, w_var, x_var, z_var

MAX_DET_SIZE = 16


class GenericMatrix:
    """Dense grid of polynomials over one coefficient ring (immutable)."""

    __slots__ = ("rows", "cols", "entries", "ring")

    def __init__(self, entries: Sequence[Sequence[Polynomial]], ring: CoefficientRing | None = None):
        grid = tuple(tuple(row) for row in entries)
        if not grid or not grid[0]:
            raise ValueError("matrix must have at least one row and column")
        if any(len(row) != len(grid[0]) for row in grid):
            raise ValueError("ragged matrix")
        ring = ring or grid[0][0].ring
        for row in grid:
            for e in row:
                if e.ring != ring:
                    raise ValueError(f"ring mismatch: {e.ring} vs {ring}")
        self.entries = grid
        self.rows = len(grid)
        self.cols = len(grid[0])
        self.ring = ring

    @classmethod
    def from_ints(cls, rows, ring: CoefficientRing = ZZ) -> "GenericMatrix":
        return cls([[Polynomial.constant(v, ring) for v in row] for row in rows], ring)

    @classmethod
    def zeros(cls, rows: int, cols: int, ring: CoefficientRing = ZZ) -> "GenericMatrix":
        z = Polynomial.zero(ring)
        return cls([[z] * cols for _ in range(rows)], ring)

    @classmethod
    def identity(cls, n: int, ring: CoefficientRing = ZZ) -> "GenericMatrix":
        one, zero = Polynomial.one(ring), Polynomial.zero(ring)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)], ring)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __eq__(self, other):
        if not isinstance(other, GenericMatrix):
            return NotImplemented
        return self.ring == other.ring and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"GenericMatrix({self.to_json()})"

    def _same_shape(self, other: "GenericMatrix"):
        if self.ring != other.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def __add__(self, other: "GenericMatrix") -> "GenericMatrix":
        self._same_shape(other)
        return GenericMatrix(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)],
            self.ring,
        )

    def __sub__(self, other: "GenericMatrix") -> "GenericMatrix":
        self._same_shape(other)
        return GenericMatrix(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)],
            self.ring,
        )

    def __matmul__(self, other: "GenericMatrix") -> "GenericMatrix":
        if self.ring != other.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        zero = Polynomial.zero(self.ring)
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = zero
                for l in range(self.cols):
                    a = self.entries[i][l]
                    if a:
                        b = other.entries[l][j]
                        if b:
                            acc = acc + a * b
                row.append(acc)
            out.append(row)
        return GenericMatrix(out, self.ring)

    def scale(self, c) -> "GenericMatrix":
        return GenericMatrix([[c * e for e in row] for row in self.entries], self.ring)

    def transpose(self) -> "GenericMatrix":
        return GenericMatrix(list(zip(*self.entries)), self.ring)

    def trace(self) -> Polynomial:
        if not self.is_square:
            raise ValueError("trace of a non-square matrix")
        acc = Polynomial.zero(self.ring)
        for i in range(self.rows):
            acc = acc + self.entries[i][i]
        return acc

    def map(self, fn: Callable[[Polynomial], Polynomial]) -> "GenericMatrix":
        return GenericMatrix([[fn(e) for e in row] for row in self.entries])

    def change_ring(self, ring: CoefficientRing) -> "GenericMatrix":
        return GenericMatrix([[e.change_ring(ring) for e in row] for row in self.entries], ring)

    def to_json(self) -> list:
        return [[serialize(e) for e in row] for row in self.entries]

    @classmethod
    def from_json(cls, data: list, ring: CoefficientRing = ZZ) -> "GenericMatrix":
        return cls([[parse(e, ring) for e in row] for row in data], ring)

    def dumps(self) -> str:
        return json.dumps(self.to_json())


# ---------------------------------------------------------------------------
# Constructors


def generic_x(k: int, ring: CoefficientRing = ZZ, m: int | None = None) -> GenericMatrix:
    """The 2x2 generic matrix ``x_k`` with entries ``x[i,j,k]``."""
    if k < 1 or (m is not None and k > m):
        raise ValueError(f"slot {k} out of range")
    return GenericMatrix(
        [[Polynomial.var(x_var(i, j, k), ring) for j in (1, 2)] for i in (1, 2)], ring
    )


def generic_t(k: int, q: int, ring: CoefficientRing = ZZ) -> GenericMatrix:
    """The q x q matrix ``t_k`` with entries ``t[r,s,k]``."""
    if k < 1 or q < 1:
        raise ValueError("slot and size must be positive")
    return GenericMatrix(
        [[Polynomial.var(t_var(r, s, k), ring) for s in range(1, q + 1)] for r in range(1, q + 1)],
        ring,
    )


def kronecker(a: GenericMatrix, b: GenericMatrix) -> GenericMatrix:
    """Block matrix whose (r, s) block is ``b[r, s] * a``."""
    if a.ring != b.ring:
        raise ValueError(f"ring mismatch: {a.ring} vs {b.ring}")
    if not (a.is_square and b.is_square):
        raise ValueError("kronecker expects square matrices")
    n, q = a.rows, b.rows
    out = [[None] * (n * q) for _ in range(n * q)]
    for r in range(q):
        for s in range(q):
            c = b.entries[r][s]
            for i in range(n):
                for j in range(n):
                    out[r * n + i][s * n + j] = c * a.entries[i][j]
    return GenericMatrix(out, a.ring)


def x_otimes_t(m: int, q: int, ring: CoefficientRing = ZZ) -> GenericMatrix:
    """``x_1 (x) t_1 + ... + x_m (x) t_m`` as a 2q x 2q matrix."""
    if m < 1 or q < 1:
        raise ValueError("m and q must be positive")
    acc = kronecker(generic_x(1, ring), generic_t(1, q, ring))
    for k in range(2, m + 1):
        acc = acc + kronecker(generic_x(k, ring), generic_t(k, q, ring))
    return acc


@dataclass(frozen=True)
class BlockSpec:
    """Layout of a q x q block matrix of 2x2 blocks.

    Each placement is ``(r, s, tag, k)``: block (r, s) holds ``tag * x_k`` where
    tag is ``("z", i)``, ``("w", i)`` or ``None`` (no scalar).  Unlisted blocks are zero.
    """

    q: int
    placements: tuple = ()

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be positive")
        seen = set()
        for r, s, tag, k in self.placements:
            if not (1 <= r <= self.q and 1 <= s <= self.q):
                raise ValueError(f"block ({r},{s}) outside 1..{self.q}")
            if (r, s) in seen:
                raise ValueError(f"block ({r},{s}) placed twice")
            seen.add((r, s))
            if tag is not None and (tag[0] not in ("z", "w") or tag[1] < 1):
                raise ValueError(f"bad scalar tag {tag!r}")
            if k < 1:
                raise ValueError(f"bad slot {k}")


def xi_block_spec(slots: Sequence[int]) -> BlockSpec:
    """Cyclic layout with ``z_r x_{k_r}`` on the diagonal and ``w_r x_{k_{q+r}}`` above it."""
    q = len(slots) // 2
    placements = [(r, r, ("z", r), slots[r - 1]) for r in range(1, q + 1)]
    placements += [(r, r + 1, ("w", r), slots[q + r - 1]) for r in range(1, q)]
    placements.append((q, 1, ("w", q), slots[2 * q - 1]))
    return BlockSpec(q, tuple(placements))


def assemble_block(spec: BlockSpec, ring: CoefficientRing = ZZ) -> GenericMatrix:
    zero = GenericMatrix.zeros(2 * spec.q, 2 * spec.q, ring)
    grid = [list(row) for row in zero.entries]
    for r, s, tag, k in spec.placements:
        block = generic_x(k, ring)
        if tag is not None:
            code = z_var(tag[1]) if tag[0] == "z" else w_var(tag[1])
            block = block.scale(Polynomial.var(code, ring))
        for i in range(2):
            for j in range(2):
                grid[2 * (r - 1) + i][2 * (s - 1) + j] = block.entries[i][j]
    return GenericMatrix(grid, ring)


# ---------------------------------------------------------------------------
# Determinants


def determinant(
    a: GenericMatrix,
    reduce: Callable[[int, Polynomial], Polynomial] | None = None,
) -> Polynomial:
    """Division-free determinant by dynamic programming over column subsets.

    Rows are consumed in order; the state after row ``i`` maps each set of
    ``i + 1`` used columns to the signed sum of partial products.  ``reduce``,
    if given, is applied to every state polynomial after row ``i`` has been
    processed -- it must be a linear map that commutes with multiplication by
    the entries of later rows (e.g. truncation or coefficient extraction in
    variables that only occur in earlier rows).
    """
    if not a.is_square:
        raise ValueError(f"determinant of a non-square {a.rows}x{a.cols} matrix")
    n = a.rows
    if n > MAX_DET_SIZE:
        raise ValueError(f"determinant size {n} exceeds the ceiling {MAX_DET_SIZE}")
    ring = a.ring
    states: dict[int, Polynomial] = {0: Polynomial.one(ring)}
    for i, row in enumerate(a.entries):
        nonzero = [(j, e) for j, e in enumerate(row) if e]
        nxt: dict[int, list] = {}
        for used, val in states.items():
            for j, e in nonzero:
                bit = 1 << j
                if used & bit:
                    continue
                # inversions: earlier rows already sitting in columns right of j
                sign = bin(used >> (j + 1)).count("1") & 1
                term = val * e
                nxt.setdefault(used | bit, []).append(-term if sign else term)
        states = {}
        for used, parts in nxt.items():
            acc = parts[0]
            for p in parts[1:]:
                acc = acc + p
            if reduce is not None:
                acc = reduce(i, acc)
            if acc:
                states[used] = acc
        if not states:
            return Polynomial.zero(ring)
    return states.get((1 << n) - 1, Polynomial.zero(ring))


def determinant_cofactor(a: GenericMatrix) -> Polynomial:
    """Leibniz expansion; slow reference used to validate :func:`determinant`."""
    if not a.is_square:
        raise ValueError("determinant of a non-square matrix")
    n = a.rows
    if n > 7:
        raise ValueError("cofactor reference limited to n <= 7")
    acc = Polynomial.zero(a.ring)
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Polynomial.one(a.ring)
        for i, j in enumerate(perm):
            term = term * a.entries[i][j]
            if not term:
                break
        acc = acc - term if inversions & 1 else acc + term
    return acc
