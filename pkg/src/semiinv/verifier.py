"""Machine checks: invariance fuzzing, exact identities and graded span tests."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .catalog import (
    GeneratorDescriptor,
    bracket,
    det_generator,
    enumerate_alphas,
    enumerate_generators,
    lemma2_collapse,
    regime_of,
    sigma_star,
    spanning_element,
    trace_poly,
    xi,
)
from .linalg import Echelon
from .poly import Polynomial, coeff_extract, multidegree, multidegree_split
from .ring import GF, QQ, ZZ, CoefficientRing, w_var, x_var, z_var
from .symmat import determinant, generic_x

FUZZ_FIELD = GF(65521)

# ---------------------------------------------------------------------------
# Reports


def make_report(check, parameters, seed, ok, witnesses=(), certificate=None, **extra) -> dict:
    report = {
        "check": check,
        "parameters": parameters,
        "seed": seed,
        "status": "pass" if ok else "fail",
        "witnesses": list(witnesses),
    }
    if certificate is not None:
        report["certificate"] = certificate
    report.update(extra)
    return report


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


# ---------------------------------------------------------------------------
# Numeric 2x2 matrices and the group action


def mat_mul(a, b, ring: CoefficientRing):
    r = ring.reduce
    return (
        (r(a[0][0] * b[0][0] + a[0][1] * b[1][0]), r(a[0][0] * b[0][1] + a[0][1] * b[1][1])),
        (r(a[1][0] * b[0][0] + a[1][1] * b[1][0]), r(a[1][0] * b[0][1] + a[1][1] * b[1][1])),
    )


def mat_det(a, ring: CoefficientRing):
    return ring.reduce(a[0][0] * a[1][1] - a[0][1] * a[1][0])


def sl2_inverse(a, ring: CoefficientRing):
    r = ring.reduce
    return ((a[1][1], r(-a[0][1])), (r(-a[1][0]), a[0][0]))


def sl2_from_factors(ring: CoefficientRing, shears=(), c=1):
    """Product of shears ``("u", a) = [[1,a],[0,1]]``, ``("l", b) = [[1,0],[b,1]]`` and diag(c, 1/c)."""
    one = ring.reduce(1)
    c = ring.coerce(c)
    m = ((c, 0), (0, ring.inv(c)))
    for kind, v in shears:
        v = ring.coerce(v)
        e = ((one, v), (0, one)) if kind == "u" else ((one, 0), (v, one))
        m = mat_mul(m, e, ring)
    return m


@dataclass(frozen=True)
class GroupElementPair:
    g: tuple
    h: tuple
    ring: CoefficientRing

    def __post_init__(self):
        one = self.ring.reduce(1)
        if mat_det(self.g, self.ring) != one or mat_det(self.h, self.ring) != one:
            raise ValueError("group elements must have determinant 1")

    def act(self, tup):
        """``(g A_1 h^-1, ..., g A_m h^-1)``."""
        hinv = sl2_inverse(self.h, self.ring)
        return tuple(mat_mul(mat_mul(self.g, a, self.ring), hinv, self.ring) for a in tup)


def random_sl2(ring: CoefficientRing, seed) -> tuple:
    """Random determinant-one matrix: 3-6 alternating shears and a diagonal factor."""
    if not ring.is_field:
        raise ValueError("random_sl2 needs a field")
    rng = _rng(seed)
    n = rng.randint(3, 6)
    first = rng.choice("ul")
    shears = []
    for i in range(n):
        kind = first if i % 2 == 0 else ("l" if first == "u" else "u")
        shears.append((kind, ring.random_element(rng)))
    if ring.kind == "PrimeField":
        c = rng.randrange(1, ring.p)
    else:
        c = rng.choice([-3, -2, -1, 1, 2, 3])
    return sl2_from_factors(ring, shears, c)


def random_pair(ring: CoefficientRing, seed) -> GroupElementPair:
    rng = _rng(seed)
    return GroupElementPair(random_sl2(ring, rng), random_sl2(ring, rng), ring)


def random_tuple(ring: CoefficientRing, m: int, seed) -> tuple:
    rng = _rng(seed)
    return tuple(
        tuple(tuple(ring.random_element(rng) for _ in range(2)) for _ in range(2)) for _ in range(m)
    )


def _jsonable(obj):
    if isinstance(obj, (tuple, list)):
        return [_jsonable(o) for o in obj]
    return str(obj) if not isinstance(obj, int) else obj


def point_values(tup) -> dict:
    """Variable assignment ``x[i,j,k] -> (A_k)_{ij}`` for a matrix tuple."""
    vals = {}
    for k, a in enumerate(tup, start=1):
        for i in range(2):
            for j in range(2):
                vals[x_var(i + 1, j + 1, k)] = a[i][j]
    return vals


def evaluate_at(f: Polynomial, tup):
    return f.change_ring(_ring_for_eval(f.ring)).evaluate(point_values(tup))


def _ring_for_eval(ring):
    return QQ if ring == ZZ else ring


def check_invariance(f: Polynomial, m: int, trials: int = 500, field: CoefficientRing = FUZZ_FIELD, seed=0) -> dict:
    """Compare ``f(A)`` with ``f(g A h^-1)`` for random A and random SL2 x SL2 pairs."""
    rng = _rng(seed)
    poly = f.change_ring(field)
    failures = []
    for trial in range(trials):
        pair = random_pair(field, rng)
        a = random_tuple(field, m, rng)
        b = pair.act(a)
        va, vb = poly.evaluate(point_values(a)), poly.evaluate(point_values(b))
        if va != vb:
            failures.append({"trial": trial, "A": _jsonable(a), "g": _jsonable(pair.g), "h": _jsonable(pair.h)})
    witnesses = failures[:5]
    return make_report(
        "invariance",
        {"m": m, "trials": trials, "field": str(field)},
        seed if not isinstance(seed, random.Random) else None,
        not failures,
        witnesses,
        failures=len(failures),
    )


# ---------------------------------------------------------------------------
# Span bases


@dataclass
class SpanBasis:
    multidegree: tuple
    vectors: list
    field: CoefficientRing

    def __post_init__(self):
        if not self.field.is_field:
            raise ValueError("span bases live over a field")
        m = len(self.multidegree)
        for label, poly in self.vectors:
            if poly.ring != self.field:
                raise ValueError(f"vector {label} over {poly.ring}, expected {self.field}")
            parts = multidegree_split(poly, m)
            if poly and list(parts) != [tuple(self.multidegree)]:
                raise ValueError(f"vector {label} is not of multidegree {self.multidegree}")

    def __len__(self):
        return len(self.vectors)

    def labels(self):
        return [label for label, _ in self.vectors]

    def echelon(self) -> Echelon:
        ech = Echelon(self.field)
        for label, poly in self.vectors:
            ech.insert(dict(poly.items()), label)
        return ech


@dataclass
class MembershipCertificate:
    inside: bool
    combination: dict | None = None

    def to_json(self, ring: CoefficientRing | None = None) -> dict:
        out = {"inside": self.inside}
        if self.combination is not None:
            out["combination"] = {str(k): str(v) for k, v in sorted(self.combination.items(), key=lambda kv: str(kv[0]))}
        return out


def _product_label(descs) -> str:
    return "*".join(d.token for d in descs)


def products_of_multidegree(
    generators, target, field: CoefficientRing = QQ, min_factors: int = 2
) -> SpanBasis:
    """Products of at least ``min_factors`` generators whose multidegrees add up to ``target``."""
    target = tuple(target)
    gens = [(d, d.multidegree) for d in generators if len(d.multidegree) == len(target)]
    gens = [(d, md) for d, md in gens if all(a <= b for a, b in zip(md, target))]
    found = []

    def rec(start, remaining, chosen):
        if not any(remaining):
            if len(chosen) >= min_factors:
                found.append(tuple(chosen))
            return
        for i in range(start, len(gens)):
            d, md = gens[i]
            if all(a <= b for a, b in zip(md, remaining)):
                rec(i, tuple(b - a for a, b in zip(md, remaining)), chosen + [d])

    rec(0, target, [])
    vectors = []
    for descs in found:
        poly = Polynomial.one(ZZ)
        for d in descs:
            poly = poly * d.polynomial(ZZ)
        vectors.append((_product_label(descs), poly.change_ring(field)))
    return SpanBasis(target, vectors, field)


def in_span(query: Polynomial, basis: SpanBasis, echelon: Echelon | None = None) -> MembershipCertificate:
    """Exact membership test with a re-verified linear combination."""
    query = query.change_ring(basis.field) if query.ring == ZZ else query
    if query.ring != basis.field:
        raise ValueError(f"query over {query.ring}, basis over {basis.field}")
    if query:
        md = multidegree(query, len(basis.multidegree))
        if md != tuple(basis.multidegree):
            raise ValueError(f"query multidegree {md} differs from basis multidegree {basis.multidegree}")
    ech = echelon or basis.echelon()
    combo = ech.solve(dict(query.items()))
    if combo is None:
        return MembershipCertificate(False)
    lookup = dict(basis.vectors)
    acc = Polynomial.zero(basis.field)
    for label, c in combo.items():
        acc = acc + lookup[label] * c
    if acc != query:
        raise RuntimeError("membership certificate failed to reconstruct the query")
    return MembershipCertificate(True, combo)


def is_decomposable(desc: GeneratorDescriptor, catalog, field: CoefficientRing):
    """Whether the generator lies in the span of products of other catalog generators."""
    basis = products_of_multidegree(catalog, desc.multidegree, field)
    cert = in_span(desc.polynomial(field), basis)
    return cert.inside, cert, basis


# ---------------------------------------------------------------------------
# Span equality


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def spanning_check(m: int, q: int, field: CoefficientRing, multidegrees=None) -> dict:
    """Compare the span of all degree-2q spanning elements with the span of catalog products."""
    catalog = enumerate_generators(m, regime_of(field))
    rows = []
    witnesses = []
    ok = True
    targets = list(multidegrees) if multidegrees is not None else list(_compositions(2 * q, m))
    for md in targets:
        spanning = SpanBasis(
            md,
            [(str(a), spanning_element(a, m, field)) for a in enumerate_alphas(q, m, md)],
            field,
        )
        spanning.vectors = [(lab, p) for lab, p in spanning.vectors if p]
        gens = products_of_multidegree(catalog, md, field, min_factors=1)
        ech_v = spanning.echelon()
        ech_w = Echelon(field)
        ech_products = Echelon(field)
        missing_in_v = []
        for label, poly in gens.vectors:
            vec = dict(poly.items())
            ech_w.insert(vec, label)
            if "*" in label:
                ech_products.insert(vec, label)
            if ech_v.solve(vec) is None:
                missing_in_v.append(label)
        missing_in_w = [lab for lab, p in spanning.vectors if ech_w.solve(dict(p.items())) is None]
        equal = not missing_in_v and not missing_in_w and ech_v.rank == ech_w.rank
        ok = ok and equal
        rows.append(
            {
                "multidegree": list(md),
                "spanning_vectors": len(spanning),
                "dim_spanning": ech_v.rank,
                "dim_generated": ech_w.rank,
                "dim_products_only": ech_products.rank,
                "equal": equal,
            }
        )
        if not equal:
            witnesses.append(
                {"multidegree": list(md), "not_generated": missing_in_w[:5], "not_spanned": missing_in_v[:5]}
            )
    return make_report(
        "spanning",
        {"m": m, "q": q, "degree": 2 * q, "field": str(field)},
        None,
        ok,
        witnesses,
        multidegrees=rows,
    )


# ---------------------------------------------------------------------------
# Identity suite


def _identity(name: str, lhs: Polynomial, rhs: Polynomial) -> dict:
    diff = lhs - rhs
    return {"identity": name, "ring": str(lhs.ring), "difference": str(diff), "ok": diff.is_zero()}


def bracket_expansion_identities(l: int, r: int, ring: CoefficientRing) -> list[dict]:
    z, w = Polynomial.var(z_var(1), ring), Polynomial.var(w_var(1), ring)
    combo = generic_x(l, ring).scale(z) + generic_x(r, ring).scale(w)
    d = determinant(combo)
    zw = {z_var(1), w_var(1)}
    return [
        _identity(f"det(z x{l} + w x{r}) [zw] = br({l},{r})", coeff_extract(d, {z_var(1): 1, w_var(1): 1}, zw), bracket(l, r, ring)),
        _identity(f"det(z x{l} + w x{r}) [z^2] = det({l})", coeff_extract(d, {z_var(1): 2}, zw), det_generator(l, ring)),
        _identity(f"det(z x{l} + w x{r}) [w^2] = det({r})", coeff_extract(d, {w_var(1): 2}, zw), det_generator(r, ring)),
    ]


def congruence_check(name: str, poly: Polynomial, m: int, field: CoefficientRing, catalog=None) -> dict:
    """Is ``poly`` in the span of products of >= 2 catalog generators at its multidegree?"""
    catalog = catalog if catalog is not None else enumerate_generators(m, regime_of(field))
    poly = poly.change_ring(field)
    if not poly:
        return {"congruence": name, "field": str(field), "ok": True, "basis_size": 0, "certificate": {"inside": True, "combination": {}}}
    md = multidegree(poly, m)
    basis = products_of_multidegree(catalog, md, field)
    cert = in_span(poly, basis)
    return {
        "congruence": name,
        "field": str(field),
        "multidegree": list(md),
        "basis_size": len(basis),
        "ok": cert.inside,
        "certificate": cert.to_json(),
    }


def identity_suite(rings=(ZZ, GF(2))) -> dict:
    """Exact polynomial identities, each checked over every ring in ``rings``."""
    results = []
    for ring in rings:
        results += bracket_expansion_identities(1, 2, ring)
        results.append(
            _identity(
                "br(1,2) = tr(x1)tr(x2) - tr(x1x2)",
                bracket(1, 2, ring),
                trace_poly([1], ring) * trace_poly([2], ring) - trace_poly([1, 2], ring),
            )
        )
        results.append(
            _identity(
                "xi(x1,x2,x3,I) = tr(x1x2x3) - tr(x1x2)tr(x3)",
                sigma_star(xi((1, 2, 3, 4), ring), 4),
                trace_poly([1, 2, 3], ring) - trace_poly([1, 2], ring) * trace_poly([3], ring),
            )
        )
        for q in (2, 3):
            rep = lemma2_collapse(q, ring)
            results.append(
                {
                    "identity": f"{rep['lhs']} = {rep['rhs']}",
                    "ring": rep["ring"],
                    "difference": rep["difference"],
                    "ok": rep["ok"],
                }
            )
    swapped = xi((1, 2, 3, 4)) + xi((3, 2, 1, 4))
    congruences = [congruence_check("xi(1,2,3,4) + xi(3,2,1,4) == 0", swapped, 4, QQ)]
    ok = all(r["ok"] for r in results) and all(c["ok"] for c in congruences)
    witnesses = [r for r in results + congruences if not r["ok"]]
    return make_report(
        "identities", {"rings": [str(r) for r in rings]}, None, ok, witnesses,
        identities=results, congruences=congruences,
    )


def lemma2_suite(fields=(QQ, GF(2)), max_q: int = 3) -> dict:
    """Collapse identities plus the sign and repeated-slot congruences."""
    results = []
    for ring in (ZZ, GF(2)):
        for q in range(2, max_q + 1):
            results.append(lemma2_collapse(q, ring))
    congruences = []
    for fld in fields:
        for q in range(2, max_q + 1):
            n = 2 * q
            base = xi(tuple(range(1, n + 1)))
            for i in range(n):
                for j in range(i + 1, n):
                    perm = list(range(1, n + 1))
                    perm[i], perm[j] = perm[j], perm[i]
                    congruences.append(
                        congruence_check(
                            f"xi({_join(range(1, n + 1))}) + xi({_join(perm)}) == 0",
                            base + xi(tuple(perm)), n, fld,
                        )
                    )
        for slots in [(1, 2, 3, 1), (1, 1, 2, 3), (1, 2, 2, 3), (1, 2, 1, 3), (1, 1, 1, 2)] + (
            [(1, 2, 3, 4, 5, 1), (1, 2, 3, 1, 4, 5)] if max_q >= 3 else []
        ):
            congruences.append(
                congruence_check(f"xi({_join(slots)}) == 0", xi(slots), max(slots), fld)
            )
    ok = all(r["ok"] for r in results) and all(c["ok"] for c in congruences)
    witnesses = [c for c in results + congruences if not c["ok"]]
    for c in congruences:
        c.pop("certificate", None)
    return make_report(
        "lemma2", {"fields": [str(f) for f in fields], "max_q": max_q}, None, ok, witnesses,
        collapse=results, congruences=congruences,
    )


def _join(seq) -> str:
    return ",".join(map(str, seq))


def nakayama_suite(m: int, field: CoefficientRing) -> dict:
    """Indecomposability pattern of the xi generators over ``field``.

    Characteristic 2: every catalog xi is indecomposable.  Otherwise the
    4-slot xi's are indecomposable and every xi on six or more slots is
    decomposable (with a certificate).
    """
    two = field.characteristic == 2
    catalog = enumerate_generators(m, regime_of(field))
    candidates = [d for d in enumerate_generators(m, "two") if d.kind == "xi"]
    results = []
    ok = True
    for desc in candidates:
        inside, cert, basis = is_decomposable(desc, catalog, field)
        expected = (not two) and desc.degree > 4
        entry = {
            "generator": desc.token,
            "basis_size": len(basis),
            "decomposable": inside,
            "expected_decomposable": expected,
            "ok": inside == expected,
        }
        if inside:
            entry["certificate"] = cert.to_json()
        ok = ok and entry["ok"]
        results.append(entry)
    return make_report(
        "nakayama", {"m": m, "field": str(field)}, None, ok,
        [r for r in results if not r["ok"]], results=results,
    )
