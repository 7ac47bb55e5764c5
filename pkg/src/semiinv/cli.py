"""Batch command line: ``semiinv {gen,verify,fuzz,eval} ...``.

Exit status: 0 pass, 1 check failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

from sympy import isprime

from .catalog import enumerate_generators, parse_descriptor
from .poly import Polynomial, parse, serialize
from .ring import GF, QQ, ZZ, CoefficientRing, x_var
from .separator import irredundancy_witness, separating_fuzz, separating_system
from .verifier import (
    FUZZ_FIELD,
    check_invariance,
    identity_suite,
    lemma2_suite,
    make_report,
    nakayama_suite,
    spanning_check,
)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUITES = ("identities", "invariance", "lemma2", "nakayama", "spanning")
FUZZ_MODES = ("invariance", "separating", "irredundancy")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    m: int = 4
    char: int = 0
    p: int | None = None
    degree: int = 6
    seed: int = 0
    trials: int | None = None
    budget: int = 200_000
    out: str | None = None

    def __post_init__(self):
        if self.m < 1:
            raise UsageError("--m must be positive")
        if self.char not in (0, 2):
            raise UsageError("--char must be 0 or 2")
        if self.degree < 2 or self.degree % 2 or self.degree > 12:
            raise UsageError("--degree must be even, between 2 and 12")
        if self.p is not None and (self.p < 2 or not isprime(self.p)):
            raise UsageError(f"--p {self.p} is not prime")
        if self.trials is not None and self.trials < 0:
            raise UsageError("--trials must be non-negative")
        if self.budget < 1:
            raise UsageError("--budget must be positive")

    def exact_field(self) -> CoefficientRing:
        """Field for exact span computations: GF(p) if given, else QQ or GF(2)."""
        if self.p is not None:
            return GF(self.p)
        return GF(2) if self.char == 2 else QQ

    def record(self) -> dict:
        rec = asdict(self)
        rec.pop("out")
        return rec


def _emit(report: dict, config: RunConfig, summary: str) -> int:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return EXIT_PASS if report.get("status") == "pass" else EXIT_FAIL


def _with_config(report: dict, config: RunConfig, command: str) -> dict:
    report = dict(report)
    report["config"] = {"command": command, **config.record()}
    return report


# ---------------------------------------------------------------------------
# gen


def build_manifest(m: int, char: int) -> dict:
    gens = []
    for d in enumerate_generators(m, char):
        f = d.polynomial(ZZ)
        gens.append(
            {
                "descriptor": d.token,
                "degree": d.degree,
                "multidegree": list(d.multidegree),
                "polynomial": serialize(f),
            }
        )
    return {"m": m, "char": char, "generators": gens}


def cmd_gen(config: RunConfig) -> int:
    manifest = build_manifest(config.m, config.char)
    report = make_report("gen", {"m": config.m, "char": config.char}, config.seed, True, count=len(manifest["generators"]), **manifest)
    return _emit(_with_config(report, config, "gen"), config, f"gen: {len(manifest['generators'])} generators")


# ---------------------------------------------------------------------------
# verify / fuzz


def _invariance_report(config: RunConfig, trials: int, field: CoefficientRing) -> dict:
    results = []
    failures = 0
    for i, d in enumerate(enumerate_generators(config.m, config.char)):
        rep = check_invariance(d.polynomial(ZZ), config.m, trials=trials, field=field, seed=config.seed + i)
        failures += rep["failures"]
        results.append({"generator": d.token, "failures": rep["failures"], "witnesses": rep["witnesses"][:3]})
    return make_report(
        "invariance",
        {"m": config.m, "char": config.char, "field": str(field), "trials": trials},
        config.seed,
        failures == 0,
        [r for r in results if r["failures"]],
        failures=failures,
        results=[{"generator": r["generator"], "failures": r["failures"]} for r in results],
    )


def cmd_verify(config: RunConfig, suite: str) -> int:
    if suite == "identities":
        report = identity_suite()
    elif suite == "lemma2":
        report = lemma2_suite()
    elif suite == "invariance":
        field = GF(config.p) if config.p else FUZZ_FIELD
        report = _invariance_report(config, config.trials or 500, field)
    elif suite == "nakayama":
        report = nakayama_suite(config.m, config.exact_field())
    elif suite == "spanning":
        report = spanning_check(config.m, config.degree // 2, config.exact_field())
    else:
        raise UsageError(f"unknown suite {suite!r}")
    return _emit(_with_config(report, config, f"verify {suite}"), config, f"verify {suite}: {report['status']}")


def cmd_fuzz(config: RunConfig, mode: str, removed: str | None = None) -> int:
    if mode == "invariance":
        field = GF(config.p) if config.p else FUZZ_FIELD
        report = _invariance_report(config, config.trials or 500, field)
        summary = f"fuzz invariance: {report['failures']} failures"
    elif mode == "separating":
        if config.degree > 6:
            raise UsageError("separating fuzz supports reference degree at most 6")
        field = GF(config.p or 101)
        trials = 10_000 if config.trials is None else config.trials
        report = separating_fuzz(separating_system(config.m), config.degree, config.m, field, trials, config.seed)
        summary = f"fuzz separating: {report['counterexample_count']} counterexamples"
    elif mode == "irredundancy":
        catalog = separating_system(config.m)
        if not removed:
            raise UsageError("irredundancy needs --removed TOKEN")
        try:
            desc = parse_descriptor(removed, config.m)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if desc not in catalog:
            raise UsageError(f"{desc.token} is not in the separating system for m={config.m}")
        field = GF(config.p) if config.p else None
        witness = irredundancy_witness(catalog, desc, config.m, field, config.budget, config.seed)
        report = make_report(
            "irredundancy",
            {"m": config.m, "removed": desc.token, "budget": config.budget, "field": str(field) if field else "GF(2),GF(3),GF(5)"},
            config.seed,
            witness is not None,
            [witness] if witness else [],
            conclusive=witness is not None,
        )
        summary = "fuzz irredundancy: " + ("witness found" if witness else "budget exhausted, inconclusive")
    else:
        raise UsageError(f"unknown fuzz mode {mode!r}")
    return _emit(_with_config(report, config, f"fuzz {mode}"), config, summary)


# ---------------------------------------------------------------------------
# eval


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def load_set(path: str, ring: CoefficientRing) -> list[tuple[str, Polynomial]]:
    """A gen manifest, or a JSON list of polynomial strings / descriptor tokens."""
    data = _load_json(path)
    if isinstance(data, dict):
        data = [g.get("polynomial") if isinstance(g, dict) else g for g in data.get("generators", [])]
    if not isinstance(data, list):
        raise UsageError(f"{path}: expected a manifest or a list of polynomials")
    out = []
    for i, item in enumerate(data):
        if not isinstance(item, str):
            raise UsageError(f"{path}: entry {i} is not a string")
        try:
            if item.lstrip().startswith(("det(", "br(", "xi(")):
                desc = parse_descriptor(item, max_slot(item))
                out.append((desc.token, desc.polynomial(ring)))
            else:
                out.append((item, parse(item, ring)))
        except ValueError as exc:
            raise UsageError(f"{path}: entry {i}: {exc}") from None
    return out


def max_slot(token: str) -> int:
    digits = [int(t) for t in token[token.index("(") + 1: token.rindex(")")].split(",") if t.strip()]
    return max(digits) if digits else 1


def load_points(path: str, ring: CoefficientRing) -> list[tuple]:
    """JSON list of points; a point is a list of 2x2 matrices."""
    data = _load_json(path)
    if not isinstance(data, list):
        raise UsageError(f"{path}: expected a list of points")
    points = []
    for n, pt in enumerate(data):
        try:
            if not isinstance(pt, list) or not pt:
                raise ValueError("a point is a non-empty list of 2x2 matrices")
            mats = []
            for a in pt:
                if not (isinstance(a, list) and len(a) == 2 and all(isinstance(r, list) and len(r) == 2 for r in a)):
                    raise ValueError("matrices must be 2x2 nested lists")
                mats.append(tuple(tuple(ring.coerce(_number(v)) for v in row) for row in a))
            points.append(tuple(mats))
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise UsageError(f"{path}: point {n}: {exc}") from None
    return points


def _number(v):
    if isinstance(v, bool):
        raise ValueError(f"bad entry {v!r}")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        return Fraction(v)
    raise ValueError(f"bad entry {v!r}")


def cmd_eval(config: RunConfig, set_file: str, point_file: str) -> int:
    ring = GF(config.p) if config.p else QQ
    polys = load_set(set_file, ring)
    points = load_points(point_file, ring)
    rows = []
    for n, pt in enumerate(points):
        values = {x_var(i + 1, j + 1, k): pt[k - 1][i][j] for k in range(1, len(pt) + 1) for i in range(2) for j in range(2)}
        row = []
        for label, f in polys:
            missing = [v for v in f.variables() if v not in values]
            if missing:
                raise UsageError(f"point {n} has {len(pt)} slots, too few for {label}")
            row.append(ring.format(f.evaluate(values)))
        rows.append(row)
    report = make_report(
        "eval", {"field": str(ring), "set": [lab for lab, _ in polys], "points": len(points)},
        config.seed, True, values=rows,
    )
    return _emit(_with_config(report, config, "eval"), config, f"eval: {len(points)} points x {len(polys)} polynomials")


# ---------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser):
    p.add_argument("--m", type=int, default=4, help="number of matrix slots")
    p.add_argument("--char", type=int, default=0, choices=(0, 2), help="characteristic regime")
    p.add_argument("--p", type=int, default=None, help="prime field modulus")
    p.add_argument("--degree", type=int, default=6, help="degree ceiling (even)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--budget", type=int, default=200_000, help="witness search budget (points)")
    p.add_argument("--out", default=None, help="write the JSON report here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semiinv", description="Semi-invariants of tuples of 2x2 matrices.")
    sub = parser.add_subparsers(dest="verb", required=True)
    _common(sub.add_parser("gen", help="write the generator manifest"))
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    _common(v)
    f = sub.add_parser("fuzz", help="run a seeded fuzz")
    f.add_argument("mode", choices=FUZZ_MODES)
    f.add_argument("--removed", default=None, help="descriptor token for irredundancy search")
    _common(f)
    e = sub.add_parser("eval", help="evaluate a polynomial set at points")
    e.add_argument("set_file")
    e.add_argument("point_file")
    _common(e)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE
    try:
        config = RunConfig(args.m, args.char, args.p, args.degree, args.seed, args.trials, args.budget, args.out)
        if args.verb == "gen":
            return cmd_gen(config)
        if args.verb == "verify":
            return cmd_verify(config, args.suite)
        if args.verb == "fuzz":
            return cmd_fuzz(config, args.mode, args.removed)
        return cmd_eval(config, args.set_file, args.point_file)
    except UsageError as exc:
        print(f"semiinv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
