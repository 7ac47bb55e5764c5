"""Evaluation of invariant sets at points of a prime field, separation fuzzing
and irredundancy witnesses.

Finite-field experiments can only refute separation claims or exhibit
concrete witnesses; they never prove separation over an algebraically closed
field.  Reports carry this caveat.
"""

from __future__ import annotations

import random
from itertools import combinations, product
from typing import Sequence

from .catalog import (
    GeneratorDescriptor,
    bracket,
    det_generator,
    enumerate_alphas,
    enumerate_generators,
    spanning_element,
    trace_poly,
    xi,
)
from .poly import Polynomial
from .ring import GF, PRIME_FIELD, ZZ, CoefficientRing, var_class, var_indices, x_slot
from .verifier import _jsonable, make_report, random_pair

CAVEAT = (
    "finite-field fuzzing is a necessary-condition check: it can refute separation "
    "or exhibit witnesses, it does not prove separation over an algebraically closed field"
)

_X_CLASS = 0

STRATEGIES = ("uniform", "orbit", "vs_zero", "transpose3", "triangular", "nullcone", "sparse")


# ---------------------------------------------------------------------------
# Evaluation


def _flat_index(code: int) -> int:
    i, j, k = var_indices(code)
    return 4 * (k - 1) + 2 * (i - 1) + (j - 1)


class CompiledSet:
    """A list of polynomials compiled for repeated evaluation over GF(p)."""

    def __init__(self, polys: Sequence[Polynomial], p: int):
        self.p = p
        self.programs = []
        for poly in polys:
            prog = []
            for mono, c in poly.change_ring(GF(p)).items():
                if any(var_class(v) != _X_CLASS for v in mono):
                    raise ValueError("only x variables can be evaluated at matrix tuples")
                prog.append((c, tuple(_flat_index(v) for v in mono)))
            self.programs.append(prog)

    def __call__(self, tup) -> tuple:
        flat = [e for a in tup for row in a for e in row]
        p = self.p
        out = []
        for prog in self.programs:
            total = 0
            for c, idx in prog:
                v = c
                for i in idx:
                    v *= flat[i]
                total += v
            out.append(total % p)
        return tuple(out)


def _normalize_set(items) -> list[tuple[str, Polynomial]]:
    out = []
    for it in items:
        if isinstance(it, GeneratorDescriptor):
            out.append((it.token, it.polynomial(ZZ)))
        elif isinstance(it, tuple):
            out.append(it)
        else:
            out.append((str(it), it))
    return out


def evaluate_set(S, tup, field: CoefficientRing) -> tuple:
    """Values of the polynomials in ``S`` at the matrix tuple, in order."""
    polys = [p for _, p in _normalize_set(S)]
    m = len(tup)
    for p in polys:
        for v in p.variables():
            if var_class(v) != _X_CLASS or x_slot(v) > m:
                raise ValueError("polynomial uses slots beyond the tuple")
    return CompiledSet(polys, field.p)(tup)


# ---------------------------------------------------------------------------
# Reference agreement


def _det_mod_p(mat: list, p: int) -> int:
    a = [row[:] for row in mat]
    n = len(a)
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] % p), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det = det * a[c][c] % p
        inv = pow(a[c][c], -1, p)
        for r in range(c + 1, n):
            f = a[r][c] * inv % p
            if f:
                for j in range(c, n):
                    a[r][j] = (a[r][j] - f * a[c][j]) % p
    return det % p


def _kron_sum(tup, ts, q: int, p: int) -> list:
    """Numeric ``sum_k A_k (x) T_k`` (block (r,s) equal to T_k[r][s] * A_k)."""
    n = 2 * q
    out = [[0] * n for _ in range(n)]
    for a, t in zip(tup, ts):
        for r in range(q):
            for s in range(q):
                c = t[r][s]
                if c:
                    for i in range(2):
                        for j in range(2):
                            out[2 * r + i][2 * s + j] += c * a[i][j]
    return [[v % p for v in row] for row in out]


def reference_agrees(tup_a, tup_b, max_degree: int, field: CoefficientRing, rng, rounds: int = 24):
    """Do all spanning elements of degree <= max_degree agree on ``A`` and ``B``?

    All of them agree at degree 2q iff ``det(A (x) t) = det(B (x) t)`` as
    polynomials in t; this is tested at ``rounds`` random points per q.  A
    mismatch is certain; agreement is wrong with probability at most
    ``(2q/p)^rounds``.  Returns None on agreement, else the failing q.
    """
    p = field.p
    m = len(tup_a)
    for q in range(1, max_degree // 2 + 1):
        for _ in range(rounds):
            ts = [[[rng.randrange(p) for _ in range(q)] for _ in range(q)] for _ in range(m)]
            if _det_mod_p(_kron_sum(tup_a, ts, q, p), p) != _det_mod_p(_kron_sum(tup_b, ts, q, p), p):
                return q
    return None


def distinguishing_spanning_element(tup_a, tup_b, q: int, field: CoefficientRing):
    """Exact search for a degree-2q spanning element separating ``A`` and ``B``."""
    m = len(tup_a)
    for alpha in enumerate_alphas(q, m):
        f = CompiledSet([spanning_element(alpha, m)], field.p)
        va, vb = f(tup_a)[0], f(tup_b)[0]
        if va != vb:
            return alpha, va, vb
    return None


# ---------------------------------------------------------------------------
# Point sampling


def _rand_mat(rng, p):
    return tuple(tuple(rng.randrange(p) for _ in range(2)) for _ in range(2))


def _transpose(a):
    return ((a[0][0], a[1][0]), (a[0][1], a[1][1]))


def sample_pair(strategy: str, m: int, field: CoefficientRing, rng):
    """Draw (A, B) according to a named strategy."""
    p = field.p
    zero = ((0, 0), (0, 0))
    if strategy == "uniform":
        return tuple(_rand_mat(rng, p) for _ in range(m)), tuple(_rand_mat(rng, p) for _ in range(m))
    if strategy == "vs_zero":
        return tuple(_rand_mat(rng, p) for _ in range(m)), tuple(zero for _ in range(m))
    if strategy == "orbit":
        a = tuple(_rand_mat(rng, p) for _ in range(m))
        return a, random_pair(field, rng).act(a)
    if strategy == "transpose3":
        # at most three active slots: the quadratic invariants cannot tell A from A^T
        active = set(rng.sample(range(m), min(3, m)))
        a = tuple(_rand_mat(rng, p) if k in active else zero for k in range(m))
        return random_pair(field, rng).act(a), random_pair(field, rng).act(tuple(map(_transpose, a)))
    if strategy == "triangular":
        # upper triangular tuples share invariants with their diagonal parts
        diag = [(rng.randrange(p), rng.randrange(p)) for _ in range(m)]
        a = tuple(((d1, rng.randrange(p)), (0, d2)) for d1, d2 in diag)
        b = tuple(((d1, rng.randrange(p)), (0, d2)) for d1, d2 in diag)
        return random_pair(field, rng).act(a), random_pair(field, rng).act(b)
    if strategy == "nullcone":
        # all matrices share a one-dimensional image
        def nil():
            return tuple(((rng.randrange(p), rng.randrange(p)), (0, 0)) for _ in range(m))

        return random_pair(field, rng).act(nil()), random_pair(field, rng).act(nil())
    if strategy == "sparse":
        def sp():
            return tuple(
                tuple(tuple(1 if rng.random() < 0.2 else 0 for _ in range(2)) for _ in range(2))
                for _ in range(m)
            )

        return sp(), sp()
    raise ValueError(f"unknown sampling strategy {strategy!r}")


# ---------------------------------------------------------------------------
# Fuzzing


def separating_system(m: int) -> list[GeneratorDescriptor]:
    """Determinants, brackets and the xi's on four distinct increasing slots."""
    return enumerate_generators(m, "zero-or-odd")


def separating_fuzz(
    candidate,
    max_degree: int,
    m: int,
    field: CoefficientRing,
    trials: int,
    seed: int = 0,
    strategies: Sequence[str] = STRATEGIES,
) -> dict:
    """Look for pairs on which ``candidate`` agrees but some spanning element of
    degree <= ``max_degree`` does not."""
    if max_degree % 2 or max_degree > 6 or max_degree < 2:
        raise ValueError("reference degree must be even and at most 6")
    if field.kind != PRIME_FIELD:
        raise ValueError("separating fuzz runs over a prime field")
    cand = _normalize_set(candidate)
    evaluate = CompiledSet([p for _, p in cand], field.p)
    rng = random.Random(seed)
    stats = {s: {"trials": 0, "candidate_agreements": 0, "counterexamples": 0} for s in strategies}
    counterexamples = []
    for trial in range(trials):
        strategy = strategies[trial % len(strategies)]
        a, b = sample_pair(strategy, m, field, rng)
        stats[strategy]["trials"] += 1
        va, vb = evaluate(a), evaluate(b)
        if va != vb:
            continue
        stats[strategy]["candidate_agreements"] += 1
        q = reference_agrees(a, b, max_degree, field, rng)
        if q is None:
            continue
        found = distinguishing_spanning_element(a, b, q, field)
        if found is None:
            raise RuntimeError("t-polynomial mismatch without a distinguishing spanning element")
        alpha, ra, rb = found
        # re-verify both halves of the claim exactly
        if evaluate(a) != evaluate(b) or ra == rb:
            raise RuntimeError("counterexample failed re-verification")
        stats[strategy]["counterexamples"] += 1
        if len(counterexamples) < 10:
            counterexamples.append(
                {
                    "trial": trial,
                    "strategy": strategy,
                    "A": _jsonable(a),
                    "B": _jsonable(b),
                    "candidate_values": list(va),
                    "reference": str(alpha),
                    "reference_values": [ra, rb],
                }
            )
    total = sum(s["counterexamples"] for s in stats.values())
    return make_report(
        "separating",
        {
            "m": m,
            "field": str(field),
            "reference_degree": max_degree,
            "trials": trials,
            "candidate": [lab for lab, _ in cand],
        },
        seed,
        total == 0,
        counterexamples,
        counterexample_count=total,
        strategies=stats,
        caveat=CAVEAT,
    )


# ---------------------------------------------------------------------------
# Irredundancy


def _active_slots(removed: GeneratorDescriptor, m: int) -> list[int]:
    slots = sorted(set(removed.slots))
    for k in range(1, m + 1):
        if len(slots) >= min(4, m):
            break
        if k not in slots:
            slots.append(k)
    return sorted(slots)


def irredundancy_witness(
    candidate,
    removed: GeneratorDescriptor,
    m: int,
    field: CoefficientRing | None = None,
    budget: int = 200_000,
    seed: int = 0,
):
    """Search for A, B that agree on ``candidate`` minus ``removed`` but not on ``removed``.

    Slots outside the (at most four) slots touched by ``removed`` are set to
    zero.  By default the search is exhaustive over GF(2), then GF(3), then
    seeded random over GF(5), all sharing ``budget`` evaluated points.
    Returns a re-verified witness dict, or None if the budget runs out.
    """
    cand = list(candidate)
    if removed not in cand:
        raise ValueError(f"{removed.token} is not in the candidate set")
    reduced = [d for d in cand if d != removed]
    active = _active_slots(removed, m)
    schedule = [(field, None)] if field is not None else [(GF(2), None), (GF(3), None), (GF(5), "random")]
    remaining = budget
    rng = random.Random(seed)
    for fld, mode in schedule:
        p = fld.p
        ev_reduced = CompiledSet([d.polynomial(ZZ) for d in reduced], p)
        ev_removed = CompiledSet([removed.polynomial(ZZ)], p)
        n_entries = 4 * len(active)
        if mode is None and p ** n_entries > remaining:
            mode = "random"
        points = (product(range(p), repeat=n_entries) if mode is None else
                  (tuple(rng.randrange(p) for _ in range(n_entries)) for _ in iter(int, 1)))
        seen: dict = {}
        for flat in points:
            if remaining <= 0:
                break
            remaining -= 1
            tup = _embed(flat, active, m)
            key = ev_reduced(tup)
            val = ev_removed(tup)[0]
            if key not in seen:
                seen[key] = (val, tup)
                continue
            other_val, other = seen[key]
            if other_val != val:
                if ev_reduced(other) != ev_reduced(tup) or ev_removed(other)[0] == ev_removed(tup)[0]:
                    raise RuntimeError("witness failed re-verification")
                return {
                    "removed": removed.token,
                    "field": str(fld),
                    "search": "exhaustive" if mode is None else "random",
                    "A": _jsonable(other),
                    "B": _jsonable(tup),
                    "reduced_values": list(key),
                    "removed_values": [other_val, val],
                    "points_examined": budget - remaining,
                }
        if remaining <= 0:
            break
    return None


def _embed(flat, active, m):
    mats = {}
    for n, k in enumerate(active):
        e = flat[4 * n: 4 * n + 4]
        mats[k] = ((e[0], e[1]), (e[2], e[3]))
    zero = ((0, 0), (0, 0))
    return tuple(mats.get(k, zero) for k in range(1, m + 1))


# ---------------------------------------------------------------------------
# Conjugation invariants


def kaygorodov_set(m: int, ring: CoefficientRing = ZZ) -> list[tuple[str, Polynomial]]:
    """``tr(x_k), det(x_k), tr(x_l x_r), tr(x_a x_b x_c)`` for increasing indices."""
    if m < 1:
        raise ValueError("m must be positive")
    out = [(f"tr({k})", trace_poly([k], ring)) for k in range(1, m + 1)]
    out += [(f"det({k})", det_generator(k, ring)) for k in range(1, m + 1)]
    out += [(f"tr({l},{r})", trace_poly([l, r], ring)) for l, r in combinations(range(1, m + 1), 2)]
    out += [
        (f"tr({a},{b},{c})", trace_poly([a, b, c], ring)) for a, b, c in combinations(range(1, m + 1), 3)
    ]
    return out


def kaygorodov_preimages(m: int, ring: CoefficientRing = ZZ) -> list[tuple[str, Polynomial]]:
    """Semi-invariants on m+1 slots whose identity substitution in the last slot
    gives :func:`kaygorodov_set` (same order)."""
    last = m + 1
    tr = lambda k: bracket(k, last, ring)
    tr2 = lambda l, r: tr(l) * tr(r) - bracket(l, r, ring)
    out = [(f"br({k},{last})", tr(k)) for k in range(1, m + 1)]
    out += [(f"det({k})", det_generator(k, ring)) for k in range(1, m + 1)]
    out += [(f"br({l},{last})*br({r},{last}) - br({l},{r})", tr2(l, r)) for l, r in combinations(range(1, m + 1), 2)]
    out += [
        (f"xi({a},{b},{c},{last}) + tr({a},{b})*br({c},{last})", xi((a, b, c, last), ring) + tr2(a, b) * tr(c))
        for a, b, c in combinations(range(1, m + 1), 3)
    ]
    return out
