"""Command-line front end.

Exit status: 0 when every check passes, 1 when a mathematical check fails,
2 on usage or numerical errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

from . import __version__
from .numeric import ENV_VAR

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2
CSV_VERSION = 1


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def _num(x):
    """JSON-safe number."""
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    x = float(x)
    return x if math.isfinite(x) else repr(x)


def _csv_text(kind: str, header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(f"# qes.{kind}/{CSV_VERSION} columns: {' '.join(header)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _json_text(kind: str, payload: dict) -> str:
    doc = {"schema": f"qes.{kind}/1"}
    doc.update(payload)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(args, text: str):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------


def cmd_table(args) -> int:
    from .identity import exact_certificate
    from .qesfamily import build_family, pretty_p

    n = args.n
    fam = build_family(n)
    if n == 0:
        cstar, how = None, "undefined for n = 0"
    elif n <= args.exact_max:
        cstar, how = str(exact_certificate(n, fam, max_n=args.exact_max).C), "exact certificate"
    else:
        cstar, how = str(fam.qstar.derivative("a").scale(Fraction(1, 2**n))), "constant law"
    if args.format == "json":
        _emit(args, _json_text("table", {
            "n": n, "p": pretty_p(fam), "qstar": str(fam.qstar), "q": str(fam.qlambda),
            "cstar": cstar, "cstar_source": how, "family": fam.to_json(),
        }))
    else:
        lines = [
            f"n = {n}",
            f"p_{n}(z) = {pretty_p(fam)}",
            f"Q*_{n + 1}(b,a) = {fam.qstar}",
            f"Q_{n + 1}(b,lam) = {fam.qlambda}",
            f"C*(b,a) = {cstar if cstar is not None else '-'}  [{how}]",
        ]
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_PASS


# ---------------------------------------------------------------------------
# locus
# ---------------------------------------------------------------------------


def cmd_locus(args) -> int:
    from .locus import StepControl, trace_locus

    ctl = StepControl(hmax=args.step) if args.step else None
    branches = trace_locus(args.n, args.b, ctl)
    rows = []
    for br in branches:
        bounds = br.arc_starts + [len(br.samples)]
        for arc_id, (lo, hi) in enumerate(zip(bounds, bounds[1:])):
            for (b, lam, a), (_, real) in zip(br.samples[lo:hi], br.zerocounts[lo:hi]):
                rows.append((br.m, arc_id, float(b), float(lam), float(a), real))
    if args.format == "json":
        _emit(args, _json_text("locus", {
            "n": args.n, "b_range": list(args.b),
            "branches": [{"m": br.m, "real_zeros": br.n - 2 * br.m,
                          "arcs": [[[float(b), float(lam), float(a)] for b, lam, a in arc] for arc in br.arcs()]}
                         for br in branches],
        }))
    else:
        _emit(args, _csv_text("locus", ["branch", "arc", "b", "lambda", "a", "real_zero_count"], rows))
    return EXIT_PASS


# ---------------------------------------------------------------------------
# crossings
# ---------------------------------------------------------------------------


def cmd_crossings(args) -> int:
    from .crossing import find_crossings, phi_with_a

    if args.n % 2:
        raise UsageError("crossings are computed for even n only; odd n has no real branch construction")
    pts = find_crossings(args.n, args.count)
    header = ["k", "b", "a", "lambda", "phi_residual"]
    rows, records, status = [], [], EXIT_PASS
    for c in pts:
        row = [c.k, c.b, c.a, c.lam, c.residual]
        rec = {"k": c.k, "b": c.b, "a": c.a, "lambda": c.lam, "phi_residual": c.residual}
        if args.verify_shooting:
            from .shooting import verify_crossing

            v = verify_crossing(args.n, c)
            bc = c.b + args.control_shift
            _, ac = phi_with_a(args.n, bc)
            ctl = verify_crossing(args.n, (bc, bc * bc - 2 * ac))
            ok = v.passed and not ctl.passed
            row += [v.ratio, ctl.ratio, "PASS" if ok else "FAIL"]
            rec.update(det_ratio=v.ratio, control_ratio=ctl.ratio, verdict="PASS" if ok else "FAIL")
            if not ok:
                status = EXIT_FAIL
        rows.append(row)
        records.append(rec)
    if args.verify_shooting:
        header += ["det_ratio", "control_ratio", "verdict"]
    if args.format == "json":
        _emit(args, _json_text("crossings", {"n": args.n, "crossings": [{k: _num(v) if not isinstance(v, str) else v
                                                                          for k, v in r.items()} for r in records]}))
    else:
        _emit(args, _csv_text("crossings", header, rows))
    return status


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _report(args, kind: str, passed: bool, fields: dict, lines: list[str]) -> int:
    verdict = "PASS" if passed else "FAIL"
    if args.format == "json":
        _emit(args, _json_text(f"verify.{kind}", dict(verdict=verdict, **fields)))
    else:
        _emit(args, "\n".join(lines + [f"{kind}: {verdict}"]) + "\n")
    return EXIT_PASS if passed else EXIT_FAIL


def verify_equilibrium(args) -> int:
    from .equilibrium import concordance_study

    s = concordance_study(args.n, args.samples, args.seed)
    worst_on = max(max(c["divisibility"], c["residue"], c["equilibrium"]) for c in s.on_locus)
    best_off = min(min(c["divisibility"], c["residue"], c["equilibrium"]) for c in s.off_locus)
    return _report(args, "equilibrium", s.passed,
                   {"n": args.n, "samples": args.samples, "seed": args.seed, "worst_on_locus": worst_on,
                    "best_off_locus": best_off, "disagreements": s.disagreements, "misclassified": s.misclassified},
                   [f"n = {args.n}, {args.samples} on-locus and {args.samples} shifted points",
                    f"largest on-locus defect {worst_on:.3e}, smallest off-locus defect {best_off:.3e}",
                    f"disagreements {s.disagreements}, misclassified {s.misclassified}"])


def verify_identity(args) -> int:
    from .identity import certificate_study, exact_certificate

    if args.n <= 4:
        cert = exact_certificate(args.n)
        return _report(args, "identity", cert.proof, {"n": args.n, "mode": "exact", "C": str(cert.C)},
                       [cert.text()])
    s = certificate_study(args.n, args.samples, args.seed, precision_bits=args.precision_bits)
    return _report(args, "identity", s.passed,
                   {"n": args.n, "mode": "numeric", "bits": s.bits, "max_on_residual": max(s.on_residuals),
                    "min_off_residual": min(s.off_residuals)},
                   [f"n = {args.n}, {args.samples} points, {s.bits}-bit solve",
                    f"largest on-locus residual {max(s.on_residuals):.3e} (need < {s.tol:g})",
                    f"smallest off-locus residual {min(s.off_residuals):.3e} (need > {s.off_floor:g})"])


def verify_constant(args) -> int:
    from .identity import verify_constant as run

    r = run(args.n, args.samples, args.seed, precision_bits=args.precision_bits)
    return _report(args, "constant", r.passed,
                   {"n": args.n, "mode": r.mode, "max_rel_error": r.max_rel_error, "samples": r.samples},
                   [f"n = {args.n}, mode {r.mode}", f"max relative error {r.max_rel_error:.3e}"])


def verify_topweight(args) -> int:
    from .locus import top_weight_check

    r = top_weight_check(args.n)
    return _report(args, "topweight", r.passed, {"n": args.n, "product": str(r.product), "top": str(r.top)},
                   [f"product    {r.product}", f"top weight {r.top}"])


def verify_discriminant(args) -> int:
    from .locus import discriminant_degree_check

    r = discriminant_degree_check(args.n)
    return _report(args, "discriminant", r.passed, {"n": args.n, "degree": r.degree, "expected": r.expected},
                   [f"deg_b disc_a Q* = {r.degree}, expected {r.expected}"])


def verify_asymptotics(args) -> int:
    from .locus import asymptotic_k_check

    r = asymptotic_k_check(args.n, args.b_large)
    worst = r.max_abs
    passed = worst == 0 if r.exact else worst < args.tol
    return _report(args, "asymptotics", passed,
                   {"n": args.n, "b": args.b_large, "exact": r.exact, "residuals": [str(x) for x in r.residuals]},
                   [f"residuals at b = {args.b_large:g}: " + ", ".join(str(x) for x in r.residuals),
                    f"{'exact' if r.exact else 'numeric'}, max |r| = {worst:.3e}"])


def verify_reality(args) -> int:
    from .shooting import reality_check

    if args.J < 1 or args.J != int(args.J):
        raise UsageError("--J must be a positive integer")
    r = reality_check(int(args.J), args.b, args.count)
    return _report(args, "reality", r.passed,
                   {"J": args.J, "b": args.b, "non_qes": [_num(complex(x)) for x in r.non_qes],
                    "dual": [_num(complex(x)) for x in r.dual], "max_imag": r.max_imag,
                    "max_mismatch": r.max_mismatch, "complex_flags": len(r.complex_flags)},
                   [f"J = {args.J}, b = {args.b:g}",
                    "L_J non-QES:  " + " ".join(f"{complex(x).real:.10f}" for x in r.non_qes),
                    "L_-J:         " + " ".join(f"{complex(x).real:.10f}" for x in r.dual),
                    f"max |Im| {r.max_imag:.2e}, max mismatch {r.max_mismatch:.2e}, complex flags {len(r.complex_flags)}"])


VERIFIERS = {
    "equilibrium": verify_equilibrium,
    "identity": verify_identity,
    "constant": verify_constant,
    "topweight": verify_topweight,
    "discriminant": verify_discriminant,
    "asymptotics": verify_asymptotics,
    "reality": verify_reality,
}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON file of option defaults (keys are option names with underscores)")
    p.add_argument("--seed", type=int, default=0, help="seed for random verification points (default 0)")
    p.add_argument("--format", choices=["text", "csv", "json"], help="output format (default depends on command)")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")
    p.add_argument("--precision-bits", type=int, dest="precision_bits",
                   help=f"significand bits for extended-precision kernels (also {ENV_VAR})")
    return p


def build_parser() -> tuple[argparse.ArgumentParser, list]:
    common = _common()
    parser = argparse.ArgumentParser(prog="qes", description="QES spectra of the quartic family y'' - (z^4 - 2bz^2 + 2Jz) y.")
    parser.add_argument("--version", action="version", version=f"qes {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    leaves = []

    p = sub.add_parser("table", parents=[common], help="p_n, Q*, Q and C* for one n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--exact-max", type=int, default=4, dest="exact_max",
                   help="largest n for the exact C* computation (default 4)")
    p.set_defaults(func=cmd_table, default_format="text")
    leaves.append(p)

    p = sub.add_parser("locus", parents=[common], help="trace the real locus, CSV rows branch,arc,b,lambda,a,real_zero_count")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--b", type=parse_range, default=(-6.0, 6.0), help="b range LO:HI (default -6:6)")
    p.add_argument("--step", type=float, help="largest continuation step (default 0.5)")
    p.set_defaults(func=cmd_locus, default_format="csv")
    leaves.append(p)

    p = sub.add_parser("crossings", parents=[common], help="level crossings on the branch without real zeros")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--verify-shooting", action="store_true", dest="verify_shooting",
                   help="check each crossing against the determinant of L_{-n-1}")
    p.add_argument("--control-shift", type=float, default=0.3, dest="control_shift",
                   help="b offset of the off-crossing control (default 0.3)")
    p.set_defaults(func=cmd_crossings, default_format="csv")
    leaves.append(p)

    p = sub.add_parser("verify", help="run one verification")
    vsub = p.add_subparsers(dest="kind", required=True)
    specs = {
        "equilibrium": [("--n", int, None), ("--samples", int, 50)],
        "identity": [("--n", int, None), ("--samples", int, 20)],
        "constant": [("--n", int, None), ("--samples", int, 20)],
        "topweight": [("--n", int, None)],
        "discriminant": [("--n", int, None)],
        "asymptotics": [("--n", int, None), ("--b", float, 1e4), ("--tol", float, 0.1)],
        "reality": [("--J", float, None), ("--b", float, None), ("--count", int, 6)],
    }
    for kind, opts in specs.items():
        q = vsub.add_parser(kind, parents=[common])
        for flag, typ, default in opts:
            dest = "b_large" if (kind == "asymptotics" and flag == "--b") else flag.lstrip("-")
            if default is None:
                q.add_argument(flag, type=typ, dest=dest, required=True)
            else:
                q.add_argument(flag, type=typ, dest=dest, default=default, help=f"(default {default:g})")
        q.set_defaults(func=VERIFIERS[kind], default_format="text")
        leaves.append(q)
    return parser, leaves


def _load_config(argv) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    try:
        with open(known.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return cfg


def _apply_config(leaves, cfg: dict, argv):
    """Config values become defaults; flags on the command line still win."""
    if not cfg:
        return
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    if "b" in cfg and isinstance(cfg["b"], (list, str)):
        cfg["b"] = parse_range(cfg["b"] if isinstance(cfg["b"], str) else f"{cfg['b'][0]}:{cfg['b'][1]}")
    known = set()
    for p in leaves:
        dests = {a.dest for a in p._actions}
        known |= dests
        p.set_defaults(**{k: v for k, v in cfg.items() if k in dests})
        # required options satisfied by the config are no longer required
        for a in p._actions:
            if a.dest in cfg:
                a.required = False
    unknown = set(cfg) - known
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")


def _join_ranges(argv: list[str]) -> list[str]:
    """Let ``--b -6:6`` through; argparse would read -6:6 as an option."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--b" and i + 1 < len(argv) and ":" in argv[i + 1]:
            out.append(f"--b={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    argv = _join_ranges(list(sys.argv[1:] if argv is None else argv))
    parser, leaves = build_parser()
    try:
        _apply_config(leaves, _load_config(argv), argv)
    except (UsageError, argparse.ArgumentTypeError) as exc:
        print(f"qes: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_PASS
    args.format = args.format or args.default_format
    if args.precision_bits is not None:
        os.environ[ENV_VAR] = str(args.precision_bits)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qes: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"qes: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
