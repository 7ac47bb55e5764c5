"""Exact coefficient rings and the variable naming scheme.

Three coefficient rings are supported: the integers, the rationals and prime
fields.  Elements are plain Python objects (``int`` / ``Fraction``); prime field
elements are canonical residues in ``[0, p)``.

Variables are encoded as integers so that monomials can be stored as sorted
tuples of ints.  The encoding preserves the fixed total order
``X < T < Z < W`` followed by lexicographic order on indices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from sympy import isprime

INTEGERS = "Integers"
RATIONALS = "Rationals"
PRIME_FIELD = "PrimeField"


@dataclass(frozen=True)
class CoefficientRing:
    """An exact coefficient ring: ``Integers``, ``Rationals`` or ``PrimeField(p)``."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind == PRIME_FIELD:
            if self.p is None or self.p < 2 or not isprime(self.p):
                raise ValueError(f"prime field modulus must be prime, got {self.p!r}")
        elif self.kind in (INTEGERS, RATIONALS):
            if self.p is not None:
                raise ValueError(f"{self.kind} takes no modulus")
        else:
            raise ValueError(f"unknown ring kind {self.kind!r}")

    # ------------------------------------------------------------------
    @property
    def is_field(self) -> bool:
        return self.kind != INTEGERS

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == PRIME_FIELD else 0

    def __str__(self) -> str:
        if self.kind == PRIME_FIELD:
            return f"GF({self.p})"
        return "ZZ" if self.kind == INTEGERS else "QQ"

    # ------------------------------------------------------------------
    def reduce(self, c):
        """Bring an integer or fraction produced by raw arithmetic into normal form."""
        if self.kind == PRIME_FIELD:
            if isinstance(c, Fraction):
                return c.numerator * pow(c.denominator, -1, self.p) % self.p
            return c % self.p
        if self.kind == INTEGERS:
            if isinstance(c, Fraction):
                if c.denominator != 1:
                    raise ValueError(f"{c} is not an integer")
                return c.numerator
            return c
        if isinstance(c, Fraction) and c.denominator == 1:
            return c.numerator
        return c

    def coerce(self, value):
        """Convert an int, Fraction or numeric string into an element of this ring."""
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            raise TypeError(f"cannot coerce {value!r} into {self}")
        return self.reduce(value)

    def inv(self, c):
        if c == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.kind == PRIME_FIELD:
            return pow(c, -1, self.p)
        if self.kind == RATIONALS:
            return self.reduce(Fraction(1) / c)
        if c in (1, -1):
            return c
        raise ValueError(f"{c} is not a unit in ZZ")

    def neg(self, c):
        return self.reduce(-c)

    def format(self, c) -> str:
        return str(c)

    def parse(self, text: str):
        text = text.strip()
        if not _NUMBER.fullmatch(text):
            raise ValueError(f"malformed coefficient {text!r}")
        if "/" in text:
            return self.reduce(Fraction(text))
        return self.reduce(int(text))

    def random_element(self, rng, bound: int = 10):
        if self.kind == PRIME_FIELD:
            return rng.randrange(self.p)
        return rng.randint(-bound, bound)


_NUMBER = re.compile(r"[+-]?\d+(/\d+)?")

ZZ = CoefficientRing(INTEGERS)
QQ = CoefficientRing(RATIONALS)


def GF(p: int) -> CoefficientRing:
    return CoefficientRing(PRIME_FIELD, p)


def ring_from_name(name: str) -> CoefficientRing:
    """Parse ``ZZ``, ``QQ`` or ``GF(p)``."""
    name = name.strip()
    if name == "ZZ":
        return ZZ
    if name == "QQ":
        return QQ
    m = re.fullmatch(r"GF\((\d+)\)", name)
    if m:
        return GF(int(m.group(1)))
    raise ValueError(f"unknown ring {name!r}")


# ---------------------------------------------------------------------------
# Variables

X_CLASS, T_CLASS, Z_CLASS, W_CLASS = 0, 1, 2, 3
CLASS_LETTERS = "xtzw"
_SHIFT = 12
_MASK = (1 << _SHIFT) - 1
_ARITY = (3, 3, 1, 1)


class VariableId(NamedTuple):
    """Human-facing variable identifier; ``cls`` is one of ``x t z w``."""

    cls: str
    indices: tuple

    @property
    def code(self) -> int:
        return encode(CLASS_LETTERS.index(self.cls), *self.indices)

    def __str__(self) -> str:
        return f"{self.cls}[{','.join(map(str, self.indices))}]"


def encode(cls: int, a: int, b: int = 0, c: int = 0) -> int:
    for i in (a, b, c):
        if not 0 <= i <= _MASK:
            raise ValueError(f"variable index {i} out of range")
    return (cls << 3 * _SHIFT) | (a << 2 * _SHIFT) | (b << _SHIFT) | c


def var_class(code: int) -> int:
    return code >> 3 * _SHIFT


def var_indices(code: int) -> tuple:
    a = (code >> 2 * _SHIFT) & _MASK
    b = (code >> _SHIFT) & _MASK
    c = code & _MASK
    return (a, b, c)[: _ARITY[var_class(code)]]


def decode(code: int) -> VariableId:
    return VariableId(CLASS_LETTERS[var_class(code)], var_indices(code))


def x_var(i: int, j: int, k: int) -> int:
    return encode(X_CLASS, i, j, k)


def t_var(r: int, s: int, k: int) -> int:
    return encode(T_CLASS, r, s, k)


def z_var(r: int) -> int:
    return encode(Z_CLASS, r)


def w_var(r: int) -> int:
    return encode(W_CLASS, r)


def var_name(code: int) -> str:
    return str(decode(code))


_VAR_RE = re.compile(r"([xtzw])\[(\d+(?:,\d+)*)\]")


def parse_var(text: str) -> int:
    m = _VAR_RE.fullmatch(text.strip())
    if not m:
        raise ValueError(f"malformed variable {text!r}")
    cls = CLASS_LETTERS.index(m.group(1))
    idx = tuple(int(v) for v in m.group(2).split(","))
    if len(idx) != _ARITY[cls]:
        raise ValueError(f"variable {text!r} needs {_ARITY[cls]} indices")
    return encode(cls, *idx)


def x_slot(code: int) -> int:
    """Matrix slot ``k`` of an ``x[i,j,k]`` variable."""
    return code & _MASK
