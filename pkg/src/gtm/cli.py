"""Command line interface: ``gtm <subcommand> ...``.

Exit status is 0 on success, 1 when a consistency check fails and 2 on a
usage error.  Output is deterministic: floats are printed with 17
significant digits and rationals as ``num/den``.
"""
from __future__ import annotations

import argparse
import math
import sys
from contextlib import contextmanager
from fractions import Fraction

from gtm import __version__, _parallel
from gtm import autocorrelation as ac
from gtm import diffraction as df
from gtm import substitution as sb
from gtm import topology as tp
from gtm import verify as vf
from gtm.params import Params

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"non-finite value {x}")
    return "0" if x == 0 else f"{x:.17g}"


def fmt_rational(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def dump_json(obj, indent: int = 0, step: int = 2) -> str:
    """Deterministic JSON with floats rendered by ``fmt_float``."""
    pad, inner = " " * indent, " " * (indent + step)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, Fraction):
        return _json_str(fmt_rational(obj))
    if isinstance(obj, str):
        return _json_str(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{_json_str(str(k))}: {dump_json(v, indent + step, step)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if all(isinstance(v, (int, float, Fraction, str)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dump_json(v) for v in obj) + "]"
        items = [inner + dump_json(v, indent + step, step) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _json_str(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch in '"\\':
            out.append("\\" + ch)
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _positive(name):
    def parse(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {text!r}") from None
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be >= 1, got {v}")
        return v

    return parse


def _non_negative(name):
    def parse(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {text!r}") from None
        if v < 0:
            raise argparse.ArgumentTypeError(f"{name} must be >= 0, got {v}")
        return v

    return parse


@contextmanager
def _sink(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _params(args) -> Params:
    return Params(args.k, args.l)


def _write_rows(fh, header, rows) -> None:
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(row) + "\n")


# -- subcommands -------------------------------------------------------------

def cmd_eta(args) -> int:
    p = _params(args)
    values = ac.eta_values(p, args.max_m)
    oracle = None
    if args.oracle_n is not None:
        oracle = ac.eta_bruteforce_many(p, args.max_m, args.oracle_n)
    with _sink(args.output) as fh:
        if args.format == "json":
            rows = []
            for m, e in enumerate(values):
                row = {"m": m, "eta": fmt_rational(e), "eta_float": float(e)}
                if oracle is not None:
                    row["oracle"] = float(oracle[m])
                    row["abs_diff"] = abs(float(oracle[m]) - float(e))
                rows.append(row)
            doc = {"params": {"k": p.k, "l": p.l}, "oracle_n": args.oracle_n, "rows": rows}
            fh.write(dump_json(doc) + "\n")
        else:
            header = ["m", "eta", "eta_float"] + (["oracle", "abs_diff"] if oracle is not None else [])
            rows = []
            for m, e in enumerate(values):
                row = [str(m), fmt_rational(e), fmt_float(e)]
                if oracle is not None:
                    row += [fmt_float(oracle[m]), fmt_float(abs(float(oracle[m]) - float(e)))]
                rows.append(row)
            _write_rows(fh, header, rows)
    return EXIT_OK


def cmd_wiener(args) -> int:
    p = _params(args)
    if args.powers:
        Ns = [p.L**j for j in range(args.n_max + 1)]
    else:
        Ns = list(range(args.n_max + 1))
    sums, den = ac.wiener_sums(p, Ns[-1])
    g = ac.growth_bound_q(p)
    rows = []
    for N in Ns:
        s = Fraction(int(sums[N]), den)
        rows.append((N, s, s / N if N else s))
    with _sink(args.output) as fh:
        if args.format == "json":
            doc = {
                "params": {"k": p.k, "l": p.l},
                "growth_q": fmt_rational(g.q),
                "classical": g.classical,
                "rows": [
                    {"N": N, "sigma": fmt_rational(s), "sigma_float": float(s), "sigma_over_N": float(r)}
                    for N, s, r in rows
                ],
            }
            fh.write(dump_json(doc) + "\n")
        else:
            fh.write(f"# k={p.k}\n# l={p.l}\n# growth_q={fmt_rational(g.q)}\n# classical={int(g.classical)}\n")
            _write_rows(
                fh,
                ["N", "sigma", "sigma_float", "sigma_over_N"],
                [[str(N), fmt_rational(s), fmt_float(s), fmt_float(r)] for N, s, r in rows],
            )
    return EXIT_OK


def cmd_distfn(args) -> int:
    if args.method == "cantor":
        samples = df.cantor_samples(args.grid)
    else:
        p = _params(args)
        if args.method == "volterra":
            iters = args.iters if args.iters is not None else df.max_iterations_for_grid(p, args.grid)
            samples = df.f_volterra(p, iters, args.grid)
        else:
            samples = df.fourier_samples(p, args.terms, args.grid)
    points = args.points
    if points is not None and args.grid % points:
        raise UsageError(f"--points {points} must divide --grid {args.grid}")
    with _sink(args.output) as fh:
        if args.format == "json":
            step = args.grid // points if points else 1
            doc = {
                "method": samples.method_tag,
                "params": None if samples.params is None else {"k": samples.params.k, "l": samples.params.l},
                "grid": samples.grid_size,
                "meta": dict(samples.meta),
                "x": [float(x) for x in samples.x[::step]],
                "F": [float(v) for v in samples.values[::step]],
            }
            fh.write(dump_json(doc) + "\n")
        else:
            df.write_curve_csv(samples, fh, points)
    return EXIT_OK


def cmd_kernel(args) -> int:
    p = _params(args)
    kern = df.Kernel.for_params(p)
    y = df.kernel_grid(kern, args.grid)
    with _sink(args.output) as fh:
        if args.format == "csv":
            step = args.grid // args.points if args.points else 1
            if args.points and args.grid % args.points:
                raise UsageError(f"--points {args.points} must divide --grid {args.grid}")
            fh.write(f"# k={p.k}\n# l={p.l}\n# grid={args.grid}\n")
            _write_rows(
                fh,
                ["x", "theta"],
                [[fmt_float(j / args.grid), fmt_float(y[j])] for j in range(0, args.grid + 1, step)],
            )
        else:
            m1, m2 = df.kernel_moments(kern)
            doc = {
                "params": {"k": p.k, "l": p.l},
                "alpha": list(kern.alpha_coeffs),
                "moments": [m1, m2],
                "grid": args.grid,
                "min": float(y.min()),
                "max": float(y.max()),
                "symmetry_defect": float(abs(y - y[::-1]).max()),
                "sup_bound": fmt_rational(df.kernel_sup_bound(p)),
                "sup_bound_holds": df.kernel_within_sup_bound(kern, args.grid),
                "growth_q": fmt_rational(ac.growth_bound_q(p).q),
                "max_below_growth_q": df.kernel_sup_bound_check(kern, args.grid),
            }
            fh.write(dump_json(doc) + "\n")
    return EXIT_OK


def cmd_topology(args) -> int:
    p = _params(args)
    report = tp.topology_report(p, args.n_max, tp.action_matrices(p))
    report["h1"]["tm"]["text"] = _group_text(report["h1"]["tm"])
    report["h1"]["pd"]["text"] = _group_text(report["h1"]["pd"])
    with _sink(args.output) as fh:
        fh.write(dump_json(report) + "\n")
    if not report["ok"]:
        failed = [name for name, ok in report["checks"].items() if not ok]
        print(f"consistency check failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _group_text(desc: dict) -> str:
    return " + ".join("Z" if s["type"] == "Z" else f"Z[1/{s['m']}]" for s in desc["summands"])


def cmd_zeta(args) -> int:
    p = _params(args)
    if args.which == "sol":
        m = args.m if args.m is not None else p.L
        rf = tp.zeta_solenoid(m)
        a_fn = lambda n: m**n - 1  # noqa: E731
    else:
        if args.m is not None:
            raise UsageError("--m applies to --which sol only")
        rf = tp.zeta_closed_form(p, args.which)
        a_fn = lambda n: tp.fixed_point_counts(p, args.which, n)  # noqa: E731
    series = tp.zeta_series(rf, args.n_max)
    closed = [a_fn(n) for n in range(1, args.n_max + 1)]
    cycles = [tp.cycles_from_counts(a_fn, n) for n in range(1, args.n_max + 1)]
    ok = series == closed
    if args.which != "sol":
        ok &= tp.zeta_from_matrices(tp.action_matrices(p), args.which) == rf
    with _sink(args.output) as fh:
        if args.format == "csv":
            _write_rows(fh, ["n", "a", "c"], [[str(n), str(a), str(c)] for n, a, c in zip(range(1, args.n_max + 1), series, cycles)])
        else:
            doc = {
                "params": {"k": p.k, "l": p.l},
                "which": args.which,
                "zeta": rf.to_json(),
                "a": series,
                "c": cycles,
                "consistent": ok,
            }
            fh.write(dump_json(doc) + "\n")
    if not ok:
        print("zeta series, closed form and matrices disagree", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_substitute(args) -> int:
    p = _params(args)
    if args.two_sided is not None:
        word = sb.gtm_two_sided_window(p, args.two_sided)
    else:
        text = args.word if args.word is not None else ("1" if args.alphabet == "gtm" else "a")
        word = sb.Word.parse(text)
        if word.alphabet != args.alphabet:
            raise UsageError(f"word {text!r} is not over the {args.alphabet} alphabet")
        step = sb.substitute_gtm if word.alphabet == sb.GTM else sb.substitute_gpd
        for _ in range(args.times):
            word = step(p, word)
    if args.phi:
        word = sb.block_map_phi(word)
    with _sink(args.output) as fh:
        fh.write(str(word) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    p = _params(args)
    checks = vf.run_invariants(p, args.scale, args.seed)
    with _sink(args.output) as fh:
        for c in checks:
            fh.write(c.line() + "\n")
    failed = [c for c in checks if not c.ok]
    if failed:
        print(f"first failing invariant: {failed[0].name}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gtm", description="Generalised Thue-Morse toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=_positive("k"), default=1)
    common.add_argument("--l", type=_positive("l"), default=1)
    common.add_argument("--output", "-o", default=None, help="output file (default: stdout)")

    def add(name, func, help_, formats=("csv", "json"), default="csv"):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("--format", choices=formats, default=default)
        sp.set_defaults(func=func)
        return sp

    sp = add("eta", cmd_eta, "exact autocorrelation coefficients")
    sp.add_argument("--max-m", type=_non_negative("max-m"), default=16)
    sp.add_argument("--oracle-n", type=_positive("oracle-n"), default=None, help="add brute-force averages over N terms")

    sp = add("wiener", cmd_wiener, "partial sums Sigma(N) of squared coefficients")
    sp.add_argument("--n-max", type=_non_negative("n-max"), default=64)
    sp.add_argument("--powers", action="store_true", help="rows at N = L^j for j <= n-max")

    sp = add("distfn", cmd_distfn, "sampled diffraction distribution function")
    sp.add_argument("--method", choices=df.METHODS, required=True)
    sp.add_argument("--grid", type=_positive("grid"), default=1 << 16)
    sp.add_argument("--iters", type=_non_negative("iters"), default=None, help="default: maximal for the grid")
    sp.add_argument("--terms", type=_positive("terms"), default=10_000)
    sp.add_argument("--points", type=_positive("points"), default=None, help="thin output to this many intervals")

    sp = add("kernel", cmd_kernel, "kernel theta: summary or samples", default="json")
    sp.add_argument("--grid", type=_positive("grid"), default=1 << 16)
    sp.add_argument("--points", type=_positive("points"), default=None)

    sp = add("topology", cmd_topology, "cohomology matrices, groups and counts", formats=("json",), default="json")
    sp.add_argument("--n-max", type=_positive("n-max"), default=12)

    sp = add("zeta", cmd_zeta, "dynamical zeta function and orbit counts", default="json")
    sp.add_argument("--which", choices=tp.WHICH, default="tm")
    sp.add_argument("--n-max", type=_positive("n-max"), default=12)
    sp.add_argument("--m", type=_positive("m"), default=None, help="solenoid multiplier (default L)")

    sp = sub.add_parser("substitute", parents=[common], help="apply substitutions to a word")
    sp.add_argument("--alphabet", choices=(sb.GTM, sb.GPD), default=sb.GTM)
    sp.add_argument("--word", default=None, help="ASCII word: 1 and - for gTM, a and b for gpd")
    sp.add_argument("--times", type=_non_negative("times"), default=1)
    sp.add_argument("--two-sided", type=_positive("two-sided"), default=None, metavar="RADIUS")
    sp.add_argument("--phi", action="store_true", help="apply the block map to the result")
    sp.set_defaults(func=cmd_substitute)

    sp = sub.add_parser("verify", parents=[common], help="run the invariant suite for one parameter pair")
    sp.add_argument("--scale", choices=vf.SCALES, default="quick")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        _parallel.worker_count()
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"gtm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
