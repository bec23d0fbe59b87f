"""Command-line driver: ``disclab <subcommand>``.

Subcommands read and write JSON files so runs can be chained and repeated.
Exit codes: 0 success, 1 a verified claim failed, 2 bad usage or parameters,
3 an enumeration cap was exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import oracle, reduce_biased, reduce_zero, setsplit, tail_analysis
from .covariance import covariance_of, independent_baseline
from .distribution import SigningDistribution
from .errors import CapacityError, DisclabError, ParameterError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3
FLOAT_FMT = "%.17g"

CSV_COLUMNS = [
    "instance_id", "theorem", "n", "m", "N", "p", "q", "beta", "gamma0",
    "C_lower", "C_upper", "status", "claims_pass", "failed_claims",
]


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    enum_cap: int = setsplit.DEFAULT_ENUM_CAP
    certify_cap: int = oracle.CERTIFY_CAP
    minimize_cap: int = oracle.MINIMIZE_CAP
    oracle_tol: float = 1e-7
    claim_tol: float = 1e-9
    output_dir: str = "."

    def __post_init__(self):
        if min(self.enum_cap, self.certify_cap, self.minimize_cap) < 1:
            raise ParameterError("caps must be at least 1")
        if self.oracle_tol <= 0 or self.claim_tol <= 0:
            raise ParameterError("tolerances must be positive")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def fmt(x) -> str:
    return FLOAT_FMT % float(x)


def _write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=1) + "\n")


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


def load_family(data: dict):
    kind = data.get("kind")
    if kind == "zero":
        return reduce_zero.VectorFamily.from_json(data)
    if kind == "biased":
        return reduce_biased.BiasedFamily.from_json(data)
    raise ParameterError(f"unknown family kind {kind!r}")


def _theorem(family) -> int:
    return 2 if isinstance(family, reduce_biased.BiasedFamily) else 1


def _config(args) -> RunConfig:
    return RunConfig(
        seed=getattr(args, "seed", 0) or 0,
        enum_cap=args.enum_cap,
        certify_cap=args.certify_cap,
        minimize_cap=args.minimize_cap,
        oracle_tol=args.oracle_tol,
        claim_tol=args.claim_tol,
        output_dir=getattr(args, "output_dir", ".") or ".",
    )


# ---------------------------------------------------------------- pipeline


def run_oracle(family, cfg: RunConfig) -> dict:
    """Certify a zero or minimize C; returns a JSON-ready dict."""
    ok, witness = oracle.certify_zero(family, cap=cfg.certify_cap)
    if ok:
        return {"value": 0.0, "lower_bound": 0.0, "upper_bound": 0.0, "status": "exact_zero",
                "support_size": witness.support_size, "witness": witness.to_json(), "history": []}
    res = oracle.minimize(family, tol=cfg.oracle_tol, cap=cfg.minimize_cap)
    out = res.to_json()
    if _theorem(family) == 1:
        out["trace_lp_bound"] = oracle.trace_lp_bound(family, cap=cfg.minimize_cap)
    return out


def verify(family, result: dict, cfg: RunConfig) -> dict:
    """Check the inequalities that apply to ``family`` given an oracle result.

    Returns a report with one entry per claim (id, lhs, rhs, pass).
    """
    inst = family.instance
    _, gamma0 = setsplit.exhaustive_min_unsplit(inst, cap=cfg.enum_cap)
    g = float(gamma0)
    tol = cfg.claim_tol
    checks = []
    lower, upper = result["lower_bound"], result["upper_bound"]
    checks.append(_check("bounds_ordered", upper, lower, tol))
    witness = SigningDistribution.from_json(result["witness"])
    rep = covariance_of(family, witness)
    checks.append(_check("witness_norm_matches", 1e-8, abs(rep.op_norm - upper), 0.0))
    if gamma0 == 0:
        checks.append(_check("zero_when_satisfiable", 0.0, upper, 1e-12))
        branch = None
    elif _theorem(family) == 1:
        checks.append(_check("unsplit_energy", lower, reduce_zero.unsplit_energy_bound(family, g), 1e-6))
        if "trace_lp_bound" in result:
            checks.append(_check("trace_lp", lower, result["trace_lp_bound"], tol))
        branch = None
    else:
        ev = tail_analysis.event_E_bound(witness, family, g)
        checks += [c.to_json() for c in ev.checks]
        branch = ev.branch
    return {
        "theorem": _theorem(family),
        "gamma0": str(gamma0),
        "branch": branch,
        "pass": all(c["pass"] for c in checks),
        "checks": checks,
    }


def _check(claim, lhs, rhs, tol):
    return {"claim": claim, "lhs": float(lhs), "rhs": float(rhs), "pass": bool(lhs >= rhs - tol)}


def pipeline_row(instance_id, instance, theorem, p, q, cfg: RunConfig):
    if theorem == 1:
        family = reduce_zero.build(instance)
        p = q = beta = 0.0
    else:
        family = reduce_biased.build(instance, p, q)
        beta = family.beta
    result = run_oracle(family, cfg)
    report = verify(family, result, cfg)
    failed = [c["claim"] for c in report["checks"] if not c["pass"]]
    row = {
        "instance_id": instance_id,
        "theorem": theorem,
        "n": instance.n,
        "m": instance.m,
        "N": family.N,
        "p": fmt(p),
        "q": fmt(q),
        "beta": fmt(beta),
        "gamma0": fmt(Fraction(report["gamma0"])),
        "C_lower": fmt(result["lower_bound"]),
        "C_upper": fmt(result["upper_bound"]),
        "status": result["status"],
        "claims_pass": int(report["pass"]),
        "failed_claims": ";".join(failed),
    }
    return row, result, report


def render_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------- commands


def cmd_gen(args) -> int:
    if args.satisfiable:
        inst, z = setsplit.generate_satisfiable(args.n, args.m, args.b, args.seed, cover=args.cover)
        data = inst.to_json() | {"witness": z.to_json()}
    else:
        inst = setsplit.generate_random(args.n, args.m, args.b, args.seed, cover=args.cover)
        data = inst.to_json()
    out = args.output or os.path.join(args.output_dir, f"instance_seed{args.seed}.json")
    _write_json(out, data)
    print(f"wrote {out}: n={inst.n} m={inst.m} b={inst.b} satisfiable_planted={bool(args.satisfiable)}")
    return EXIT_OK


def cmd_check(args) -> int:
    inst = setsplit.load_instance(args.instance)
    if args.assignment:
        data = _read_json(args.assignment)
        a = setsplit.Assignment.from_json(data.get("witness", data))
        rep = setsplit.evaluate(inst, a)
        out = {"split": rep.split_count, "unsplit": rep.unsplit_count,
               "unsplit_fraction": str(rep.unsplit_fraction), "per_set_sums": [int(v) for v in rep.per_set_sums]}
    else:
        a, frac = setsplit.exhaustive_min_unsplit(inst, cap=args.enum_cap)
        out = {"min_unsplit_fraction": str(frac), "gamma0": float(frac), "argmin": a.to_json()}
    print(json.dumps(out))
    return EXIT_OK


def cmd_reduce(args) -> int:
    inst = setsplit.load_instance(args.instance)
    if args.theorem == 1:
        family = reduce_zero.build(inst)
    else:
        if args.p is None or args.q is None:
            raise _UsageError("--theorem 2 requires --p and --q")
        family = reduce_biased.build(inst, args.p, args.q)
    out = args.output or os.path.join(args.output_dir, "family.json")
    _write_json(out, family.to_json())
    print(f"wrote {out}: theorem={args.theorem} d={family.d} N={family.N}")
    return EXIT_OK


def cmd_cov(args) -> int:
    family = load_family(_read_json(args.family))
    if args.baseline:
        x0 = getattr(family, "x0", np.zeros(family.N))
        rep = independent_baseline(family, x0)
    else:
        if not args.dist:
            raise _UsageError("cov needs a distribution file or --baseline")
        data = _read_json(args.dist)
        dist = SigningDistribution.from_json(data.get("witness", data))
        rep = covariance_of(family, dist)
    out = rep.to_json()
    if args.output:
        _write_json(args.output, out)
    print(json.dumps({"op_norm": out["op_norm"], "trace": out["trace"]}))
    return EXIT_OK


def cmd_oracle(args) -> int:
    cfg = _config(args)
    family = load_family(_read_json(args.family))
    result = run_oracle(family, cfg)
    out = args.output or os.path.join(cfg.output_dir, "oracle.json")
    _write_json(out, result)
    print(f"wrote {out}: status={result['status']} lower={fmt(result['lower_bound'])} "
          f"upper={fmt(result['upper_bound'])}")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _config(args)
    family = load_family(_read_json(args.family))
    report = verify(family, _read_json(args.result), cfg)
    if args.output:
        _write_json(args.output, report)
    for c in report["checks"]:
        print(f"{'PASS' if c['pass'] else 'FAIL'} {c['claim']}: {fmt(c['lhs'])} vs {fmt(c['rhs'])}")
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_report(args) -> int:
    cfg = _config(args)
    if args.theorem == 2 and (args.p is None or args.q is None):
        raise _UsageError("--theorem 2 requires --p and --q")
    rows = []
    for k in range(args.count):
        seed = args.seed + k
        if args.satisfiable:
            inst, _ = setsplit.generate_satisfiable(args.n, args.m, args.b, seed, cover=True)
        else:
            inst = setsplit.generate_random(args.n, args.m, args.b, seed, cover=True)
        row, result, report = pipeline_row(f"seed{seed}", inst, args.theorem, args.p, args.q, cfg)
        rows.append(row)
        if args.keep:
            d = Path(cfg.output_dir) / f"seed{seed}"
            _write_json(d / "instance.json", inst.to_json())
            _write_json(d / "oracle.json", result)
            _write_json(d / "verify.json", report)
    text = render_csv(rows)
    out = args.output or os.path.join(cfg.output_dir, "report.csv")
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    Path(out).write_text(text)
    ok = all(r["claims_pass"] for r in rows)
    print(f"wrote {out}: {len(rows)} rows, {'all claims pass' if ok else 'FAILURES'}")
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", default=".")
    common.add_argument("--enum-cap", type=int, default=setsplit.DEFAULT_ENUM_CAP)
    common.add_argument("--certify-cap", type=int, default=oracle.CERTIFY_CAP)
    common.add_argument("--minimize-cap", type=int, default=oracle.MINIMIZE_CAP)
    common.add_argument("--oracle-tol", type=float, default=1e-7)
    common.add_argument("--claim-tol", type=float, default=1e-9)

    ap = _Parser(prog="disclab", description="Set-Splitting reductions and covariance oracles.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="generate an instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--b", type=int, default=3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--satisfiable", action="store_true", help="plant a splitting assignment")
    g.add_argument("--cover", action="store_true", help="every element occurs at least once")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", parents=[common], help="evaluate an assignment or find the best one")
    c.add_argument("instance")
    c.add_argument("--assignment")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("reduce", parents=[common], help="build a vector family from an instance")
    r.add_argument("instance")
    r.add_argument("--theorem", type=int, choices=(1, 2), required=True)
    r.add_argument("--p", type=float)
    r.add_argument("--q", type=float)
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("cov", parents=[common], help="covariance of a signing distribution")
    v.add_argument("family")
    v.add_argument("dist", nargs="?")
    v.add_argument("--baseline", action="store_true", help="independent signs with mean x0")
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_cov)

    o = sub.add_parser("oracle", parents=[common], help="compute C(V, x0) for a family")
    o.add_argument("family")
    o.add_argument("-o", "--output")
    o.set_defaults(func=cmd_oracle)

    f = sub.add_parser("verify", parents=[common], help="check inequalities on an oracle result")
    f.add_argument("family")
    f.add_argument("result")
    f.add_argument("-o", "--output")
    f.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", parents=[common], help="generate, reduce, solve and verify; write CSV")
    p.add_argument("--theorem", type=int, choices=(1, 2), default=1)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--b", type=int, default=3)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=3)
    p.add_argument("--satisfiable", action="store_true")
    p.add_argument("--keep", action="store_true", help="also write per-instance JSON files")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except _UsageError as e:
        print(f"disclab: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as e:
        print(f"disclab: capacity: {e}", file=sys.stderr)
        return EXIT_CAPACITY
    except (DisclabError, OSError, json.JSONDecodeError, KeyError) as e:
        print(f"disclab: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
