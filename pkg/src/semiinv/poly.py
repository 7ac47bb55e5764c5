"""Sparse multivariate polynomials with exact coefficients.

A monomial is a sorted tuple of integer variable codes, with a variable
repeated once per unit of exponent (``x^2*y`` is ``(x, x, y)``).  A polynomial
is an immutable mapping from monomials to nonzero coefficients.
"""

from __future__ import annotations

import json
import re
from collections import Counter, defaultdict
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .ring import (
    QQ,
    X_CLASS,
    ZZ,
    CoefficientRing,
    parse_var,
    var_class,
    var_name,
    x_slot,
)

Monomial = tuple


def monomial_from_exponents(exponents: Mapping[int, int]) -> Monomial:
    out = []
    for code, e in exponents.items():
        if e < 0:
            raise ValueError("negative exponent")
        out.extend([code] * e)
    return tuple(sorted(out))


def monomial_exponents(mono: Monomial) -> dict[int, int]:
    return dict(Counter(mono))


def _format_monomial(mono: Monomial) -> str:
    parts = []
    for code, e in sorted(Counter(mono).items()):
        parts.append(var_name(code) if e == 1 else f"{var_name(code)}^{e}")
    return "*".join(parts)


class Polynomial:
    """Immutable sparse polynomial over a :class:`CoefficientRing`."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: CoefficientRing, terms: Mapping | None = None):
        self.ring = ring
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = ring.coerce(c) if not isinstance(c, int) else ring.reduce(c)
                if c:
                    key = tuple(sorted(mono))
                    clean[key] = ring.reduce(clean.get(key, 0) + c)
                    if not clean[key]:
                        del clean[key]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring: CoefficientRing, terms: dict) -> "Polynomial":
        # terms: sorted monomials, coefficients that may still need reducing
        reduce = ring.reduce
        out = {}
        for mono, c in terms.items():
            c = reduce(c)
            if c:
                out[mono] = c
        p = object.__new__(cls)
        p.ring = ring
        p._terms = out
        p._hash = None
        return p

    # ---------------------------------------------------------------- build
    @classmethod
    def zero(cls, ring: CoefficientRing = ZZ) -> "Polynomial":
        return cls._raw(ring, {})

    @classmethod
    def one(cls, ring: CoefficientRing = ZZ) -> "Polynomial":
        return cls.constant(1, ring)

    @classmethod
    def constant(cls, c, ring: CoefficientRing = ZZ) -> "Polynomial":
        return cls._raw(ring, {(): ring.coerce(c)})

    @classmethod
    def var(cls, code: int, ring: CoefficientRing = ZZ) -> "Polynomial":
        return cls._raw(ring, {(code,): 1})

    # ------------------------------------------------------------- accessors
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, mono: Monomial):
        return self._terms.get(tuple(sorted(mono)), 0)

    def variables(self) -> set[int]:
        return {v for mono in self._terms for v in mono}

    def total_degree(self) -> int:
        return max((len(m) for m in self._terms), default=-1)

    def is_constant(self) -> bool:
        return all(not m for m in self._terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get((), 0)

    # ------------------------------------------------------------ arithmetic
    def _check(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Polynomial.constant(other, self.ring)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for mono, c in other._terms.items():
            out[mono] = out.get(mono, 0) + c
        return Polynomial._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ring, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            c = self.ring.coerce(other)
            return Polynomial._raw(self.ring, {m: v * c for m, v in self._terms.items()})
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        for m2, c2 in b.items():
            if not m2:
                for m1, c1 in a.items():
                    out[m1] = get(m1, 0) + c1 * c2
                continue
            for m1, c1 in a.items():
                m = tuple(sorted(m1 + m2))
                out[m] = get(m, 0) + c1 * c2
        return Polynomial._raw(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial.one(self.ring)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = Polynomial.constant(other, self.ring)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polynomial({self.ring}, {serialize(self)!r})"

    def __str__(self):
        return serialize(self)

    # --------------------------------------------------------------- helpers
    def change_ring(self, ring: CoefficientRing) -> "Polynomial":
        """Map coefficients into ``ring`` (e.g. reduce an integer polynomial mod p)."""
        if ring == self.ring:
            return self
        if ring.kind == "Integers":
            return Polynomial(ring, self._terms)
        return Polynomial._raw(ring, {m: ring.reduce(c) for m, c in self._terms.items()})

    def map_monomials(self, fn: Callable[[Monomial], Monomial | None]) -> "Polynomial":
        out: dict = {}
        for mono, c in self._terms.items():
            new = fn(mono)
            if new is not None:
                out[new] = out.get(new, 0) + c
        return Polynomial._raw(self.ring, out)

    def truncate(self, bounds: Mapping[int, int]) -> "Polynomial":
        """Drop terms in which a bounded variable exceeds its bound."""
        out = {}
        for mono, c in self._terms.items():
            cnt = Counter(v for v in mono if v in bounds)
            if all(e <= bounds[v] for v, e in cnt.items()):
                out[mono] = c
        return Polynomial._raw(self.ring, out)

    def evaluate(self, values: Mapping[int, object]):
        """Evaluate at a point given as variable code -> ring element (all variables)."""
        reduce = self.ring.reduce
        total = 0
        for mono, c in self._terms.items():
            v = c
            for code in mono:
                v = v * values[code]
            total += v
            if self.ring.kind == "PrimeField":
                total %= self.ring.p
        return reduce(total)


# ---------------------------------------------------------------------------
# Operations


def poly_add(f: Polynomial, g: Polynomial) -> Polynomial:
    f._check(g)
    return f + g


def poly_mul(f: Polynomial, g: Polynomial) -> Polynomial:
    f._check(g)
    return f * g


def poly_sum(polys: Iterable[Polynomial], ring: CoefficientRing) -> Polynomial:
    out: dict = {}
    for p in polys:
        if p.ring != ring:
            raise ValueError(f"ring mismatch: {p.ring} vs {ring}")
        for mono, c in p._terms.items():
            out[mono] = out.get(mono, 0) + c
    return Polynomial._raw(ring, out)


def _selector(pattern: Mapping[int, int], variables) -> Callable[[int], bool]:
    if variables is None:
        classes = {var_class(v) for v in pattern}
        return lambda v: var_class(v) in classes
    variables = set(variables)
    codes = {v for v in variables if isinstance(v, int)}
    letters = {"xtzw".index(v) for v in variables if isinstance(v, str)}
    return lambda v: v in codes or var_class(v) in letters


def coeff_extract(
    f: Polynomial, pattern: Mapping[int, int], variables: Iterable | None = None
) -> Polynomial:
    """Coefficient of the monomial ``pattern`` in the selected variables.

    ``variables`` selects which variables are treated as the outer ring: a set
    of variable codes and/or class letters (``"t"``, ``"z"``...).  By default the
    classes occurring in ``pattern`` are selected.  Terms whose selected part is
    not exactly ``pattern`` are dropped; the selected part is removed from the
    remaining terms.
    """
    selected = _selector(pattern, variables)
    target = monomial_from_exponents(pattern)
    out: dict = {}
    for mono, c in f._terms.items():
        sel = tuple(v for v in mono if selected(v))
        if sel != target:
            continue
        rest = tuple(v for v in mono if not selected(v))
        out[rest] = out.get(rest, 0) + c
    return Polynomial._raw(f.ring, out)


def x_multidegree(mono: Monomial, m: int) -> tuple:
    deg = [0] * m
    for v in mono:
        if var_class(v) != X_CLASS:
            raise ValueError(f"non-X variable {var_name(v)} in multidegree split")
        k = x_slot(v)
        if not 1 <= k <= m:
            raise ValueError(f"slot {k} outside 1..{m}")
        deg[k - 1] += 1
    return tuple(deg)


def multidegree_split(f: Polynomial, m: int) -> dict[tuple, Polynomial]:
    """Partition the terms of ``f`` by multidegree in the matrix slots ``1..m``."""
    parts: dict = defaultdict(dict)
    for mono, c in f._terms.items():
        parts[x_multidegree(mono, m)][mono] = c
    return {d: Polynomial._raw(f.ring, t) for d, t in sorted(parts.items())}


def multidegree(f: Polynomial, m: int) -> tuple | None:
    """The unique multidegree of a nonzero multihomogeneous polynomial, else None."""
    parts = multidegree_split(f, m)
    if len(parts) != 1:
        return None
    return next(iter(parts))


def substitute(f: Polynomial, assignment: Mapping[int, object]) -> Polynomial:
    """Ring-homomorphic substitution of variables by polynomials or scalars."""
    ring = f.ring
    values: dict = {}
    for code, val in assignment.items():
        if isinstance(val, Polynomial):
            if val.ring != ring:
                raise ValueError(f"ring mismatch: {val.ring} vs {ring}")
            values[code] = val
        else:
            values[code] = Polynomial.constant(val, ring)
    powers: dict = {}

    def power(code, e):
        key = (code, e)
        if key not in powers:
            powers[key] = values[code] ** e
        return powers[key]

    out: dict = {}
    for mono, c in f._terms.items():
        kept = tuple(v for v in mono if v not in values)
        factor = Polynomial._raw(ring, {kept: c})
        for code, e in Counter(v for v in mono if v in values).items():
            factor = factor * power(code, e)
            if not factor:
                break
        for m2, c2 in factor._terms.items():
            out[m2] = out.get(m2, 0) + c2
    return Polynomial._raw(ring, out)


# ---------------------------------------------------------------------------
# Serialization


def serialize(f: Polynomial) -> str:
    """Canonical text form; terms are sorted by the fixed monomial order."""
    if not f._terms:
        return "0"
    terms = []
    for mono in sorted(f._terms):
        c = f.ring.format(f._terms[mono])
        terms.append(f"{c}*{_format_monomial(mono)}" if mono else c)
    return " + ".join(terms)


canonical_serialize = serialize

_TERM_SPLIT = re.compile(r"\s+\+\s+")
_NUMBER = re.compile(r"[+-]?\d+(/\d+)?")
_FACTOR = re.compile(r"([xtzw]\[\d+(?:,\d+)*\])(?:\^(\d+))?")


def parse(text: str, ring: CoefficientRing = ZZ) -> Polynomial:
    """Parse the canonical text form (also accepts unsorted terms)."""
    text = text.strip()
    if text == "0":
        return Polynomial.zero(ring)
    if not text:
        raise ValueError("empty polynomial text")
    out: dict = {}
    for term in _TERM_SPLIT.split(text):
        factors = [fac.strip() for fac in term.split("*")]
        coeff = 1
        if _NUMBER.fullmatch(factors[0]):
            coeff = ring.parse(factors.pop(0))
        elif factors[0].startswith("-"):
            coeff = ring.reduce(-1)
            factors[0] = factors[0][1:]
        mono = []
        for fac in factors:
            m = _FACTOR.fullmatch(fac.strip())
            if not m:
                raise ValueError(f"malformed factor {fac!r} in term {term!r}")
            e = int(m.group(2) or 1)
            mono.extend([parse_var(m.group(1))] * e)
        key = tuple(sorted(mono))
        out[key] = out.get(key, 0) + coeff
    return Polynomial._raw(ring, out)


def to_json(f: Polynomial) -> list:
    """JSON form: a list of ``{coeff, monomial}`` records in canonical order."""
    rows = []
    for mono in sorted(f._terms):
        rows.append(
            {
                "coeff": f.ring.format(f._terms[mono]),
                "monomial": [[var_name(v), e] for v, e in sorted(Counter(mono).items())],
            }
        )
    return rows


def from_json(rows: list, ring: CoefficientRing = ZZ) -> Polynomial:
    out: dict = {}
    for row in rows:
        mono = []
        for name, e in row["monomial"]:
            mono.extend([parse_var(name)] * int(e))
        key = tuple(sorted(mono))
        out[key] = out.get(key, 0) + ring.parse(str(row["coeff"]))
    return Polynomial._raw(ring, out)


def dumps(f: Polynomial) -> str:
    return json.dumps(to_json(f))


__all__ = [
    "Monomial",
    "Polynomial",
    "QQ",
    "ZZ",
    "canonical_serialize",
    "coeff_extract",
    "from_json",
    "multidegree",
    "multidegree_split",
    "parse",
    "poly_add",
    "poly_mul",
    "poly_sum",
    "serialize",
    "substitute",
    "to_json",
]
