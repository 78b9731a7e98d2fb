"""Command-line front end: `mldegen <subcommand> ...`.

Exit codes: 0 when every comparison agrees, 2 on a numeric disagreement,
1 on usage or input errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from fractions import Fraction

from . import __version__

SCHEMA_VERSION = 1
DEFAULT_SEED = 0
EXIT_OK, EXIT_USAGE, EXIT_DISAGREE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Run:
    """Collects input digests for the manifest."""

    def __init__(self, args):
        self.args = args
        self.inputs = {}

    def read(self, path):
        try:
            with open(path, "rb") as fh:
                data = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
        self.inputs[path] = hashlib.sha256(data).hexdigest()
        return data.decode()


def _q(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _cx(z):
    z = complex(z)
    return [z.real, z.imag]


def _parse_vector(text):
    try:
        return [Fraction(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse rational vector {text!r}") from None


def _parse_complex_line(line):
    out = []
    for tok in line.split(";"):
        tok = tok.strip()
        if not tok:
            continue
        parts = tok.split(",")
        if len(parts) != 2:
            raise UsageError(f"complex entry {tok!r} must read 're,im'")
        try:
            out.append(complex(float(parts[0]), float(parts[1])))
        except ValueError:
            raise UsageError(f"complex entry {tok!r} is not numeric") from None
    return out


# ------------------------------------------------------------ subcommands

def cmd_disc(run):
    from .arrangement import char_poly_of, regions
    from .discriminantal import (DegenerateConfig, build_A, build_B, build_Btilde,
                                 degenerate_config, random_generic_config)
    a = run.args
    if not 2 <= a.k < a.m:
        raise UsageError("need 2 <= k < m")
    try:
        if a.degenerate:
            cfg = degenerate_config(a.k, a.m, a.degenerate, seed=a.seed)
        else:
            cfg = random_generic_config(a.k, a.m, seed=a.seed)
    except DegenerateConfig as exc:
        raise UsageError(str(exc)) from None
    generic = not a.degenerate
    builds = {"Btilde": build_Btilde(cfg, generic), "B": build_B(cfg, generic),
              "A": build_A(cfg, seed=a.seed, generic=generic)}
    summary = {}
    for name, arr in builds.items():
        cp = char_poly_of(arr)
        total, bounded = regions(cp)
        summary[name] = {"hyperplanes": len(arr), "dim": arr.dim, "char_poly": [int(c) for c in cp.coeffs],
                         "char_poly_text": str(cp), "regions": total, "bounded_regions": bounded}
    out = {"k": a.k, "m": a.m, "config": [[_q(x) for x in row] for row in cfg.entries],
           "arrangement": builds[a.which].dumps(), "which": a.which, "summary": summary}
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(builds[a.which].dumps())
    return out, True


def cmd_euler(run):
    from . import strata
    a = run.args
    if a.mode == "recursion":
        from .crosscheck import bounded_fibers
        from .finite_field import euler_from_count
        if a.k != 3:
            raise UsageError("the recursion is implemented for k = 3 only")
        if a.m < 5:
            raise UsageError("need m >= 5")
        if a.constants:
            consts = _load_constants(run, a.constants)
        else:
            consts = strata.load_constants()
        try:
            chi = strata.chi_X3_table(a.m, bounded_fibers(a.m, a.seed), consts)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
        checks = {}
        for m, v in chi.items():
            if 6 <= m <= 9:
                checks[str(m)] = {"recursion": v, "point_count": euler_from_count(m),
                                  "agree": v == euler_from_count(m)}
        return {"chi": {str(m): v for m, v in chi.items()}, "point_count_checks": checks}, \
            all(c["agree"] for c in checks.values())
    table = json.loads(run.read(a.table)) if a.table else strata.load_soft48()
    try:
        rep = strata.decomp48_report(table)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"malformed table: {exc}") from None
    ok = all(r["orbit_listed"] in (None, r["orbit"]) for r in rep["types"])
    rep["status"] = "agree" if not rep["residual"] else "documented-discrepancy"
    return rep, ok


def _load_constants(run, path):
    raw = json.loads(run.read(path))
    try:
        return {tuple(int(x) for x in key.split(",")): int(rec["chi"]) for key, rec in raw["constants"].items()}
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"malformed constants file: {exc}") from None


def cmd_ffcount(run):
    from . import finite_field as ff
    a = run.args
    if a.euler:
        return {"m": a.m, "euler": ff.euler_from_count(a.m)}, True
    if a.q is None:
        raise UsageError("--q is required unless --euler is given")
    out = {"m": a.m, "q": a.q, "formula": ff.count_formula(a.m, a.q)}
    ok = True
    if a.brute:
        budget = a.budget or ff.BRUTE_BUDGET
        out["oracle"] = ff.brute_count(3, a.m, a.q, workers=a.threads, budget=budget)
        ok = out["oracle"] == out["formula"]
        out["agree"] = ok
    return out, ok


def _load_model(run, path):
    from .arrangement import Arrangement
    from .tropical import LinearModel
    arr = Arrangement.loads(run.read(path))
    return LinearModel.from_forms([(h.normal, h.offset) for h in arr], arr.dim)


def cmd_tropmle(run):
    from .tropical import chy_model, trop_critical_points
    a = run.args
    model = chy_model(a.chy) if a.chy else _load_model(run, a.model)
    w = _parse_vector(a.w)
    if len(w) != model.n + 1:
        raise UsageError(f"w has {len(w)} entries, the model has {model.n + 1} coordinates")
    pts = trop_critical_points(model, w)
    return {"labels": model.labels, "w": [_q(x) for x in w], "count": len(pts),
            "points": [[_q(x) for x in p] for p in pts]}, True


def _system(run, spec):
    from . import critical
    if not spec:
        raise UsageError("--system needs 'config K M', 'linear FILE' or 'pappus'")
    kind, rest = spec[0], spec[1:]
    if kind == "pappus" and not rest:
        return critical.pappus_system()
    if kind == "config" and len(rest) == 2:
        try:
            k, m = int(rest[0]), int(rest[1])
        except ValueError:
            raise UsageError("config needs integers K M") from None
        if (k - 1) * (m - k - 1) > 6:
            raise UsageError(f"X({k},{m}) has more unknowns than the solver handles")
        return critical.from_config(k, m)
    if kind == "linear" and len(rest) == 1:
        from .arrangement import Arrangement
        return critical.from_linear_model(Arrangement.loads(run.read(rest[0])))
    raise UsageError(f"cannot read system {' '.join(spec)!r}")


def _load_weights(run, path, n):
    """JSON {"c": [...], "w": [...]}; entries of c are numbers or [re, im]."""
    raw = json.loads(run.read(path))
    if isinstance(raw, list):
        raw = {"c": raw}
    c = raw.get("c")
    if c is not None:
        c = [complex(*v) if isinstance(v, list) else complex(v) for v in c]
        if len(c) != n:
            raise UsageError(f"{len(c)} weight constants for {n} coordinates")
    w = raw.get("w")
    if w is not None:
        w = [Fraction(str(x)) for x in w]
        if len(w) != n:
            raise UsageError(f"{len(w)} exponents for {n} coordinates")
    return c, w


def cmd_critpts(run):
    from .critical import solve_multistart
    a = run.args
    sys_ = _system(run, a.system)
    weights = _load_weights(run, a.weights, len(sys_))[0] if a.weights else None
    sol = solve_multistart(sys_, weights=weights, seed=a.seed, budget=a.budget or 1000)
    return {"labels": sys_.labels, "variables": [str(s) for s in sys_.symbols], "count": sol.count,
            "saturated": sol.saturated, "budget": sol.budget, "discovered_at": sol.discovered_at,
            "discarded": sol.discarded, "residuals": sol.residuals,
            "points": [[_cx(v) for v in p] for p in sol.points]}, True


def cmd_valuations(run):
    from .critical import random_weights, solve_multistart
    from .valuations import ParametricWeights, learn, schedule_to
    a = run.args
    sys_ = _system(run, a.system)
    c, w = _load_weights(run, a.weights, len(sys_))
    if w is None:
        raise UsageError("the weights file must give exponents 'w'")
    if c is None:
        c = list(random_weights(len(sys_), a.seed))
    if a.starts:
        starts = [_parse_complex_line(ln) for ln in run.read(a.starts).splitlines() if ln.strip()]
        bad = [i for i, s in enumerate(starts) if len(s) != sys_.nvars]
        if bad:
            raise UsageError(f"start on line {bad[0] + 1} has the wrong number of coordinates")
    else:
        starts = solve_multistart(sys_, weights=c, seed=a.seed, budget=a.budget or 300).points
    t0 = min(0.1, a.tmin * 10)
    res = learn(sys_, ParametricWeights(c, w), starts, schedule=schedule_to(a.tmin, t0=t0),
                denom_cap=a.denom_cap, workers=a.threads)
    return {"labels": sys_.labels, "starts": len(starts), "failed": res.failed,
            "clusters": [{"q": [_q(x) for x in cl.q], "multiplicity": cl.multiplicity,
                          "max_rho": cl.max_rho, "untrusted": cl.untrusted} for cl in res.clusters]}, True


def cmd_crosscheck(run):
    from . import crosscheck
    a = run.args
    kw = {}
    if a.name in ("x36-triple", "tropmle-chy6"):
        kw["seed"] = a.seed
        if a.budget:
            kw["budget"] = a.budget
    elif a.name in ("table1", "lemma34", "theorem51"):
        kw["seed"] = a.seed
        if a.name == "table1":
            kw["stretch"] = a.stretch
    elif a.name == "fforacle":
        kw["workers"] = a.threads
        if a.budget:
            kw["budget"] = a.budget
    rep = crosscheck.run(a.name, **kw)
    return rep, rep["ok"]


# ------------------------------------------------------------ parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print JSON with a run manifest")
    common.add_argument("--quiet", action="store_true", help="no text output; rely on the exit code")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--threads", type=int, default=1, help="cap on worker processes or threads")
    common.add_argument("--budget", type=int, default=None, help="start count or enumeration budget")

    p = _Parser(prog="mldegen", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("disc", parents=[common], help="discriminantal arrangements")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--degenerate", metavar="SPEC", help="e.g. '12,34,56' for k=3")
    s.add_argument("--which", choices=["A", "B", "Btilde"], default="B", help="arrangement to emit")
    s.add_argument("--out", metavar="FILE", help="also write the arrangement file here")
    s.set_defaults(func=cmd_disc)

    s = sub.add_parser("euler", parents=[common], help="Euler characteristics of X(3,m) and X(4,8)")
    s.add_argument("mode", choices=["recursion", "decomp48"])
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--m", type=int, default=9)
    s.add_argument("--constants", metavar="FILE")
    s.add_argument("--table", metavar="FILE")
    s.set_defaults(func=cmd_euler)

    s = sub.add_parser("ffcount", parents=[common], help="points of X(3,m) over F_q")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--q", type=int)
    s.add_argument("--brute", action="store_true", help="also enumerate")
    s.add_argument("--euler", action="store_true", help="Euler characteristic from the count")
    s.set_defaults(func=cmd_ffcount)

    s = sub.add_parser("tropmle", parents=[common], help="tropical critical points of a linear model")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--model", metavar="FILE", help="affine arrangement file")
    g.add_argument("--chy", type=int, metavar="M")
    s.add_argument("--w", required=True, help="comma separated rationals")
    s.set_defaults(func=cmd_tropmle)

    for name, func, helptext in (("critpts", cmd_critpts, "numerical critical points"),
                                 ("valuations", cmd_valuations, "learn tropical critical points")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--system", nargs="+", required=True, metavar="SPEC",
                       help="config K M | linear FILE | pappus")
        s.add_argument("--weights", metavar="FILE", required=name == "valuations")
        if name == "valuations":
            s.add_argument("--starts", metavar="FILE")
            s.add_argument("--tmin", type=float, default=1e-6)
            s.add_argument("--denom-cap", type=int, default=32)
        s.set_defaults(func=func)

    s = sub.add_parser("crosscheck", parents=[common], help="run an agreement suite")
    s.add_argument("name", choices=["x36-triple", "table1", "theorem51", "fforacle",
                                    "tropmle-chy6", "lemma34", "decomp48"])
    s.add_argument("--stretch", action="store_true", help="table1: include the stretch entries")
    s.set_defaults(func=cmd_crosscheck)
    return p


def _text(obj, indent=""):
    lines = []
    for key, val in obj.items():
        if isinstance(val, dict):
            lines.append(f"{indent}{key}:")
            lines.extend(_text(val, indent + "  "))
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            lines.append(f"{indent}{key}:")
            for item in val:
                lines.append(indent + "  - " + ", ".join(f"{k}={v}" for k, v in item.items()))
        elif isinstance(val, str) and "\n" in val:
            lines.append(f"{indent}{key}:")
            lines.extend(indent + "  " + ln for ln in val.rstrip().splitlines())
        else:
            lines.append(f"{indent}{key}: {val}")
    return lines


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("mldegen: error: --threads must be positive", file=sys.stderr)
        return EXIT_USAGE
    run = _Run(args)
    start = time.time()
    try:
        result, ok = args.func(run)
    except (UsageError, ValueError) as exc:
        print(f"mldegen {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    manifest = {"argv": argv, "seed": args.seed, "version": __version__, "inputs": run.inputs,
                "wall_seconds": round(time.time() - start, 3)}
    if args.json:
        print(json.dumps({"schema_version": SCHEMA_VERSION, "command": args.command, "ok": ok,
                          "result": result, "manifest": manifest}, indent=2, default=str))
    elif not args.quiet:
        print("\n".join(_text(result)))
        print(f"agreement: {'yes' if ok else 'NO'}")
    return EXIT_OK if ok else EXIT_DISAGREE


if __name__ == "__main__":
    sys.exit(main())
