"""Constructions of semi-invariants of tuples of 2x2 matrices.

The three generator families are ``det(x_k)``, the polarization ``<x_l|x_r>``
and the block-determinant invariants ``xi(x_{k_1}, ..., x_{k_{2q}})``.  The
general spanning elements ``Coef(t^alpha, det(x (x) t))`` are built here too,
together with the reduction of an exponent pattern to a product of those
generators.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, permutations
from typing import Iterator, Sequence

from .poly import Polynomial, coeff_extract, substitute
from .ring import ZZ, CoefficientRing, t_var, w_var, x_var, z_var
from .symmat import (
    GenericMatrix,
    assemble_block,
    determinant,
    generic_x,
    xi_block_spec,
)

# ---------------------------------------------------------------------------
# Generator descriptors


@dataclass(frozen=True)
class GeneratorDescriptor:
    """``det(k)``, ``br(l,r)`` with l < r, or ``xi(k_1,...,k_2q)`` strictly increasing."""

    kind: str
    slots: tuple
    m: int

    def __post_init__(self):
        slots = tuple(self.slots)
        object.__setattr__(self, "slots", slots)
        if any(not 1 <= k <= self.m for k in slots):
            raise ValueError(f"slots {slots} outside 1..{self.m}")
        if any(a >= b for a, b in zip(slots, slots[1:])):
            raise ValueError(f"slots {slots} must be strictly increasing")
        expected = {"det": lambda n: n == 1, "br": lambda n: n == 2, "xi": lambda n: n >= 4 and n % 2 == 0}
        if self.kind not in expected or not expected[self.kind](len(slots)):
            raise ValueError(f"bad descriptor {self.kind}{slots}")

    @property
    def degree(self) -> int:
        return 2 if self.kind in ("det", "br") else len(self.slots)

    @property
    def multidegree(self) -> tuple:
        deg = [0] * self.m
        for k in self.slots:
            deg[k - 1] += 2 if self.kind == "det" else 1
        return tuple(deg)

    @property
    def token(self) -> str:
        return f"{self.kind}({','.join(map(str, self.slots))})"

    def __str__(self) -> str:
        return self.token

    def polynomial(self, ring: CoefficientRing = ZZ) -> Polynomial:
        if self.kind == "det":
            return det_generator(self.slots[0], ring)
        if self.kind == "br":
            return bracket(*self.slots, ring=ring)
        return xi(self.slots, ring)


_TOKEN = re.compile(r"\s*(det|br|xi)\(\s*(\d+(?:\s*,\s*\d+)*)\s*\)\s*")


def parse_descriptor(token: str, m: int) -> GeneratorDescriptor:
    match = _TOKEN.fullmatch(token)
    if not match:
        raise ValueError(f"malformed generator token {token!r}")
    slots = tuple(int(v) for v in match.group(2).split(","))
    return GeneratorDescriptor(match.group(1), slots, m)


# ---------------------------------------------------------------------------
# Generators


def det_generator(k: int, ring: CoefficientRing = ZZ) -> Polynomial:
    x = lambda i, j: Polynomial.var(x_var(i, j, k), ring)
    return x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)


def bracket(l: int, r: int, ring: CoefficientRing = ZZ) -> Polynomial:
    """``x_11l x_22r + x_11r x_22l - x_12l x_21r - x_12r x_21l``."""
    if l < 1 or r < 1:
        raise ValueError("slots must be positive")
    x = lambda i, j, k: Polynomial.var(x_var(i, j, k), ring)
    return (
        x(1, 1, l) * x(2, 2, r)
        + x(1, 1, r) * x(2, 2, l)
        - x(1, 2, l) * x(2, 1, r)
        - x(1, 2, r) * x(2, 1, l)
    )


def _block_row_extractor(q: int, row_vars, exact_pattern):
    """Build a ``determinant`` reduce hook that clears block row r's tag variables.

    ``row_vars[r]`` are the tag variables living only in block row r and
    ``exact_pattern[r]`` their required exponents.  After the first scalar row
    of a block, exponents above the target are discarded; after the second
    one, the exact coefficient is extracted.
    """

    def hook(i: int, poly: Polynomial) -> Polynomial:
        r = i // 2 + 1
        if i % 2 == 0:
            return poly.truncate(exact_pattern[r])
        return coeff_extract(poly, exact_pattern[r], variables=row_vars[r])

    return hook


@lru_cache(maxsize=4096)
def _xi_integral(slots: tuple) -> Polynomial:
    q = len(slots) // 2
    a = assemble_block(xi_block_spec(slots), ZZ)
    row_vars = {r: {z_var(r), w_var(r)} for r in range(1, q + 1)}
    pattern = {r: {z_var(r): 1, w_var(r): 1} for r in range(1, q + 1)}
    return determinant(a, reduce=_block_row_extractor(q, row_vars, pattern))


def xi(slots: Sequence[int], ring: CoefficientRing = ZZ) -> Polynomial:
    """Coefficient of ``z_1...z_q w_1...w_q`` in the cyclic block determinant.

    ``slots`` may repeat and need not be sorted; no sign normalization happens.
    """
    slots = tuple(slots)
    if len(slots) < 4 or len(slots) % 2:
        raise ValueError(f"xi needs an even number >= 4 of slots, got {len(slots)}")
    if any(k < 1 for k in slots):
        raise ValueError("slots must be positive")
    return _xi_integral(slots).change_ring(ring)


def trace_poly(word: Sequence[int], ring: CoefficientRing = ZZ) -> Polynomial:
    """Trace of the product of generic matrices in word order."""
    if not word:
        raise ValueError("empty word")
    acc = generic_x(word[0], ring)
    for k in word[1:]:
        acc = acc @ generic_x(k, ring)
    return acc.trace()


def sigma_star(f: Polynomial, m: int) -> Polynomial:
    """Substitute the identity matrix into slot ``m``."""
    return substitute(
        f, {x_var(1, 1, m): 1, x_var(2, 2, m): 1, x_var(1, 2, m): 0, x_var(2, 1, m): 0}
    )


def identity_substitution(m: int) -> dict:
    return {x_var(1, 1, m): 1, x_var(2, 2, m): 1, x_var(1, 2, m): 0, x_var(2, 1, m): 0}


def enumerate_generators(m: int, characteristic) -> list[GeneratorDescriptor]:
    """Catalog generators for ``m`` slots.

    ``characteristic`` is ``"two"`` / ``2`` for the characteristic 2 regime and
    ``"zero-or-odd"`` / ``0`` / an odd prime otherwise.
    """
    if m < 1:
        raise ValueError("m must be positive")
    two = _is_char_two(characteristic)
    out = [GeneratorDescriptor("det", (k,), m) for k in range(1, m + 1)]
    out += [GeneratorDescriptor("br", lr, m) for lr in combinations(range(1, m + 1), 2)]
    sizes = range(4, m + 1, 2) if two else [4]
    for size in sizes:
        out += [GeneratorDescriptor("xi", ks, m) for ks in combinations(range(1, m + 1), size)]
    return out


def _is_char_two(characteristic) -> bool:
    if characteristic in ("two", 2):
        return True
    if characteristic == "zero-or-odd" or (isinstance(characteristic, int) and characteristic % 2 == 1):
        return False
    if characteristic == 0:
        return False
    raise ValueError(f"unsupported characteristic {characteristic!r}")


def regime_of(ring: CoefficientRing) -> str:
    return "two" if ring.characteristic == 2 else "zero-or-odd"


# ---------------------------------------------------------------------------
# Exponent patterns and spanning elements


@dataclass(frozen=True)
class ExponentPattern:
    """A monomial ``t^alpha``: sparse map ``(r, s, k) -> exponent`` on q x q blocks."""

    q: int
    alpha: tuple  # sorted ((r, s, k), n) with n > 0

    @classmethod
    def from_dict(cls, q: int, alpha: dict) -> "ExponentPattern":
        items = []
        for (r, s, k), n in alpha.items():
            if n < 0:
                raise ValueError("negative exponent in pattern")
            if not (1 <= r <= q and 1 <= s <= q) or k < 1:
                raise ValueError(f"index {(r, s, k)} outside the q={q} pattern")
            if n:
                items.append(((r, s, k), n))
        return cls(q, tuple(sorted(items)))

    def as_dict(self) -> dict:
        return dict(self.alpha)

    @property
    def total(self) -> int:
        return sum(n for _, n in self.alpha)

    def cell_sums(self) -> dict:
        out: dict = {}
        for (r, s, _), n in self.alpha:
            out[(r, s)] = out.get((r, s), 0) + n
        return out

    def line_sums(self) -> tuple[list, list]:
        rows, cols = [0] * self.q, [0] * self.q
        for (r, s, _), n in self.alpha:
            rows[r - 1] += n
            cols[s - 1] += n
        return rows, cols

    def multidegree(self, m: int) -> tuple:
        deg = [0] * m
        for (_, _, k), n in self.alpha:
            deg[k - 1] += n
        return tuple(deg)

    def relabel(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "ExponentPattern":
        """Rename block row r to row_perm[r-1] and block column s to col_perm[s-1]."""
        return ExponentPattern(
            self.q,
            tuple(sorted(((row_perm[r - 1], col_perm[s - 1], k), n) for (r, s, k), n in self.alpha)),
        )

    def __str__(self) -> str:
        return " ".join(f"t[{r},{s},{k}]^{n}" for (r, s, k), n in self.alpha) or "1"


def cycle_pattern(slots: Sequence[int]) -> ExponentPattern:
    """The pattern whose spanning element is ``xi(slots)``."""
    q = len(slots) // 2
    alpha: dict = {}
    for r in range(1, q + 1):
        alpha[(r, r, slots[r - 1])] = 1
    for r in range(1, q):
        alpha[(r, r + 1, slots[q + r - 1])] = 1
    alpha[(q, 1, slots[2 * q - 1])] = 1
    return ExponentPattern.from_dict(q, alpha)


@lru_cache(maxsize=None)
def _spanning_integral(alpha: ExponentPattern) -> Polynomial:
    q = alpha.q
    if alpha.total != 2 * q:
        return Polynomial.zero(ZZ)
    n = 2 * q
    grid = [[Polynomial.zero(ZZ)] * n for _ in range(n)]
    row_vars: dict = {r: set() for r in range(1, q + 1)}
    pattern: dict = {r: {} for r in range(1, q + 1)}
    for (r, s, k), e in alpha.alpha:
        t = Polynomial.var(t_var(r, s, k), ZZ)
        row_vars[r].add(t_var(r, s, k))
        pattern[r][t_var(r, s, k)] = e
        for i in range(2):
            for j in range(2):
                cell = grid[2 * (r - 1) + i][2 * (s - 1) + j]
                grid[2 * (r - 1) + i][2 * (s - 1) + j] = cell + t * Polynomial.var(
                    x_var(i + 1, j + 1, k), ZZ
                )
    # t variables outside the support cannot occur in Coef(t^alpha, .)
    return determinant(GenericMatrix(grid, ZZ), reduce=_block_row_extractor(q, row_vars, pattern))


def spanning_element(alpha: ExponentPattern, m: int | None = None, ring: CoefficientRing = ZZ) -> Polynomial:
    """``Coef(t^alpha, det(x (x) t))``; may be zero."""
    if m is not None and any(k > m for (_, _, k), _ in alpha.alpha):
        raise ValueError(f"pattern uses slots beyond m={m}")
    return _spanning_integral(alpha).change_ring(ring)


def _line_sum_two_matrices(q: int) -> list[tuple]:
    """All q x q non-negative integer matrices with every row and column sum 2."""
    out = []

    def rows_with_sum_two():
        for a in range(q):
            for b in range(a, q):
                row = [0] * q
                row[a] += 1
                row[b] += 1
                yield tuple(row)

    all_rows = list(rows_with_sum_two())

    def rec(prefix, cols):
        if len(prefix) == q:
            if all(c == 2 for c in cols):
                out.append(tuple(prefix))
            return
        for row in all_rows:
            new = [c + v for c, v in zip(cols, row)]
            if max(new) <= 2:
                rec(prefix + [row], new)

    rec([], [0] * q)
    return out


def _relabel_matrix(S: tuple, rp, cp) -> tuple:
    q = len(S)
    out = [[0] * q for _ in range(q)]
    for r in range(q):
        for s in range(q):
            out[rp[r]][cp[s]] = S[r][s]
    return tuple(tuple(row) for row in out)


@lru_cache(maxsize=None)
def _support_orbits(q: int) -> tuple:
    """Orbit representatives of line-sum-2 matrices with their stabilizers."""
    perms = list(permutations(range(q)))
    reps = []
    seen = set()
    for S in _line_sum_two_matrices(q):
        if S in seen:
            continue
        stab = []
        for rp in perms:
            for cp in perms:
                img = _relabel_matrix(S, rp, cp)
                seen.add(img)
                if img == S:
                    stab.append((tuple(i + 1 for i in rp), tuple(i + 1 for i in cp)))
        reps.append((S, tuple(stab)))
    return tuple(reps)


def _cell_fillings(S: tuple, m: int, target: tuple | None) -> Iterator[dict]:
    cells = [(r + 1, s + 1, S[r][s]) for r in range(len(S)) for s in range(len(S)) if S[r][s]]
    remaining = list(target) if target is not None else None

    def rec(i, acc):
        if i == len(cells):
            if remaining is None or not any(remaining):
                yield dict(acc)
            return
        r, s, v = cells[i]
        for ks in combinations_with_replacement(range(1, m + 1), v):
            if remaining is not None:
                ok = True
                for k in ks:
                    remaining[k - 1] -= 1
                    ok = ok and remaining[k - 1] >= 0
                if ok:
                    for k in ks:
                        acc[(r, s, k)] = acc.get((r, s, k), 0) + 1
                    yield from rec(i + 1, acc)
                    for k in ks:
                        acc[(r, s, k)] -= 1
                        if not acc[(r, s, k)]:
                            del acc[(r, s, k)]
                for k in ks:
                    remaining[k - 1] += 1
            else:
                for k in ks:
                    acc[(r, s, k)] = acc.get((r, s, k), 0) + 1
                yield from rec(i + 1, acc)
                for k in ks:
                    acc[(r, s, k)] -= 1
                    if not acc[(r, s, k)]:
                        del acc[(r, s, k)]

    yield from rec(0, {})


def enumerate_alphas(
    q: int, m: int, multidegree: tuple | None = None, up_to_symmetry: bool = True
) -> list[ExponentPattern]:
    """Exponent patterns of total degree 2q that survive the Zero filter.

    Every block row and column sum must be 2.  With ``up_to_symmetry`` one
    pattern per orbit of independent block-row and block-column renumbering is
    kept; renumbering leaves the spanning element unchanged.
    """
    if multidegree is not None and (len(multidegree) != m or sum(multidegree) != 2 * q):
        return []
    out = []
    if up_to_symmetry:
        for S, stab in _support_orbits(q):
            keys = set()
            for alpha in _cell_fillings(S, m, multidegree):
                pat = ExponentPattern.from_dict(q, alpha)
                key = min(pat.relabel(rp, cp).alpha for rp, cp in stab)
                if key not in keys:
                    keys.add(key)
                    out.append(ExponentPattern(q, key))
    else:
        for S in _line_sum_two_matrices(q):
            for alpha in _cell_fillings(S, m, multidegree):
                out.append(ExponentPattern.from_dict(q, alpha))
    return out


# ---------------------------------------------------------------------------
# Canonical forms


@dataclass(frozen=True)
class Zero:
    def __str__(self):
        return "0"


@dataclass(frozen=True)
class SingleCycle:
    slots: tuple
    sign: int = 1

    def __str__(self):
        pre = "-" if self.sign < 0 else ""
        return f"{pre}xi({','.join(map(str, self.slots))})"


@dataclass(frozen=True)
class Product:
    cycles: tuple

    def __str__(self):
        return "*".join(str(c) for c in self.cycles)


@dataclass(frozen=True)
class DetFactor:
    """The block ``cell`` carries two t-factors and splits off as det/bracket."""

    cell: tuple
    slots: tuple
    remainder_pattern: ExponentPattern | None
    remainder: object = None

    def factor_token(self) -> str:
        a, b = self.slots
        return f"det({a})" if a == b else f"br({a},{b})"

    def __str__(self):
        if self.remainder is None:
            return self.factor_token()
        return f"{self.factor_token()}*({self.remainder})"


def _perm_sign(perm: Sequence[int]) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def canonicalize_alpha(alpha: ExponentPattern):
    """Reduce a pattern to a signed product of det/bracket and xi factors.

    The result reconstructs ``spanning_element(alpha)`` exactly via
    :func:`reconstruct`.  Patterns with a block line sum other than 2, or a
    block carrying more than two t-factors, give :class:`Zero`.
    """
    q = alpha.q
    rows, cols = alpha.line_sums()
    cells = alpha.cell_sums()
    if any(v != 2 for v in rows + cols) or any(v > 2 for v in cells.values()):
        return Zero()

    for (r, s), v in sorted(cells.items()):
        if v == 2:
            slots = tuple(sorted(k for (rr, ss, k), n in alpha.alpha if (rr, ss) == (r, s) for _ in range(n)))
            if q == 1:
                return DetFactor((r, s), slots, None, None)
            # drop block row r and column s; moving a block is an even scalar permutation
            rest = {}
            for (rr, ss, k), n in alpha.alpha:
                if rr != r:
                    rest[(rr - (rr > r), ss - (ss > s), k)] = n
            rem = ExponentPattern.from_dict(q - 1, rest)
            return DetFactor((r, s), slots, rem, canonicalize_alpha(rem))

    # every cell holds one t-factor: the support is a 2-regular bipartite graph
    slot_at = {(r, s): k for (r, s, k), _ in alpha.alpha}
    row_cols: dict = {}
    col_rows: dict = {}
    for r, s in slot_at:
        row_cols.setdefault(r, []).append(s)
        col_rows.setdefault(s, []).append(r)
    visited = set()
    cycles = []
    row_order, col_order = [], []
    for start in range(1, q + 1):
        if start in visited:
            continue
        rho = [start]
        gamma = [min(row_cols[start])]
        while True:
            r = rho[-1]
            nxt_col = next(c for c in row_cols[r] if c != gamma[-1]) if len(set(row_cols[r])) > 1 else gamma[-1]
            if nxt_col == gamma[0]:
                break
            gamma.append(nxt_col)
            rho.append(next(x for x in col_rows[nxt_col] if x != r))
        visited.update(rho)
        c = len(rho)
        diag = [slot_at[(rho[i], gamma[i])] for i in range(c)]
        sup = [slot_at[(rho[i], gamma[i + 1])] for i in range(c - 1)]
        corner = [slot_at[(rho[c - 1], gamma[0])]]
        cycles.append(tuple(diag + sup + corner))
        row_order += rho
        col_order += gamma
    # row_order[i] is sent to position i; same for columns (2x2 blocks => squared sign)
    sign = (_perm_sign([r - 1 for r in row_order]) * _perm_sign([s - 1 for s in col_order])) ** 2
    if len(cycles) == 1:
        return SingleCycle(cycles[0], sign)
    return Product(tuple(SingleCycle(cyc, 1) for cyc in cycles[:-1]) + (SingleCycle(cycles[-1], sign),))


def reconstruct(form, ring: CoefficientRing = ZZ) -> Polynomial:
    """Polynomial denoted by a canonical form."""
    if isinstance(form, Zero):
        return Polynomial.zero(ring)
    if isinstance(form, SingleCycle):
        return xi(form.slots, ring) * form.sign
    if isinstance(form, Product):
        acc = Polynomial.one(ring)
        for cyc in form.cycles:
            acc = acc * reconstruct(cyc, ring)
        return acc
    if isinstance(form, DetFactor):
        a, b = form.slots
        head = det_generator(a, ring) if a == b else bracket(a, b, ring)
        if form.remainder is None:
            return head
        return head * reconstruct(form.remainder, ring)
    raise TypeError(f"not a canonical form: {form!r}")


# ---------------------------------------------------------------------------
# Collapse identity


def lemma2_collapse(q: int, ring: CoefficientRing = ZZ) -> dict:
    """Check ``xi_q(y,x_2..x_q,y,x_{q+2}..x_{2q}) = -det(y) * xi_{q-1}(...)`` exactly.

    ``y`` is realized by putting slot 1 in position q+1.  For q = 2 the
    right-hand factor is ``<x_2|x_4>``.
    """
    if q < 2:
        raise ValueError("q must be at least 2")
    slots = list(range(1, 2 * q + 1))
    slots[q] = 1
    lhs = xi(slots, ring)
    if q == 2:
        tail = bracket(2, 4, ring)
        tail_label = "br(2,4)"
    else:
        rest = list(range(2, q + 1)) + list(range(q + 2, 2 * q + 1))
        tail = xi(rest, ring)
        tail_label = f"xi({','.join(map(str, rest))})"
    rhs = -(det_generator(1, ring) * tail)
    diff = lhs - rhs
    return {
        "q": q,
        "ring": str(ring),
        "lhs": f"xi({','.join(map(str, slots))})",
        "rhs": f"-det(1)*{tail_label}",
        "difference": str(diff),
        "ok": diff.is_zero(),
    }
