"""Command-line interface: ``fourext <command> ...``.

Exit status is 0 on success, 2 when a numerical procedure fails to converge
(quadrature doubling check, precision loss, SVD breakdown) and 1 for invalid
input.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional, Sequence

import numpy as np

from . import harness, theory
from .basis import mapped_cheb_nodes
from .chebyshev import cheb_coeffs
from .continuous import QuadratureError, error_norms, solve_continuous
from .discrete import solve_discrete
from .numkit.functions import UnknownFunctionError, catalog_keys, make_function
from .numkit.precision import DOUBLE, PrecisionError, as_float, precision_label, resolve_precision, working_precision
from .orthopoly import expansion_coeffs

NUMERICAL_FAILURES = (QuadratureError, PrecisionError, np.linalg.LinAlgError, ArithmeticError)


# -- argument helpers -------------------------------------------------------------------------


def int_range(text: str) -> List[int]:
    """``"10:40:2"`` (inclusive), ``"8,16,32"`` or ``"12"``."""
    out: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            bits = [int(b) for b in part.split(":")]
            if len(bits) not in (2, 3):
                raise argparse.ArgumentTypeError(f"bad range {part!r}")
            step = bits[2] if len(bits) == 3 else 1
            if step <= 0:
                raise argparse.ArgumentTypeError("range step must be positive")
            out.extend(range(bits[0], bits[1] + 1, step))
        elif part:
            out.append(int(part))
    return out


def value_list(text: str) -> List[str]:
    """Comma-separated values; each may be an expression such as ``20*sqrt(2)``.

    A ``a:b:step`` item expands to numbers (floats allowed).
    """
    out: List[str] = []
    for part in text.split(","):
        part = part.strip()
        if part.count(":") == 2:
            a, b, s = (float(v) for v in part.split(":"))
            if s <= 0:
                raise argparse.ArgumentTypeError("range step must be positive")
            k = 0
            while a + k * s <= b + 1e-12 * max(1.0, abs(b)):
                out.append(f"{a + k * s:.12g}")
                k += 1
        elif part:
            out.append(part)
    return out


def float_list(text: str) -> List[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def choice_list(choices: Sequence[str]):
    """Argument type for a comma-separated subset of ``choices``."""

    def parse(text: str) -> List[str]:
        out = [v.strip() for v in text.split(",") if v.strip()]
        bad = [v for v in out if v not in choices]
        if bad or not out:
            raise argparse.ArgumentTypeError(f"invalid choice {','.join(bad) or text!r} (choose from {', '.join(choices)})")
        return out

    return parse


def _common(p: argparse.ArgumentParser, precision: str = "double"):
    p.add_argument("--precision", default=precision,
                   help="double, extended, extended:<bits> or (continuous solves) auto[:<bits>]")
    p.add_argument("--tol", type=float, default=None, help="relative SVD truncation threshold")
    p.add_argument("--out", default=None, help="write CSV here instead of stdout")


def _function_args(p: argparse.ArgumentParser, default: Optional[str] = None, several: bool = False):
    if several:
        p.add_argument("--function", type=choice_list(catalog_keys()), default=[default],
                       help="one or more of " + ", ".join(catalog_keys()))
    else:
        p.add_argument("--function", default=default, required=default is None, choices=catalog_keys())
    p.add_argument("--omega", default=None, help="frequency parameter for expiw, cosw, sinw")
    p.add_argument("--k", default=None, help="degree for chebT")


def _make_f(args, name: Optional[str] = None):
    params = {key: getattr(args, key) for key in ("omega", "k") if getattr(args, key, None) is not None}
    return make_function(name or args.function, **params)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating, int, np.integer)):
        return f"{float(v):.16g}"
    return str(v)


def _split_complex(v):
    if isinstance(v, complex) or np.iscomplexobj(v):
        return v.real, v.imag
    if hasattr(v, "imag") and hasattr(v, "real") and type(v).__name__ == "mpc":
        return v.real, v.imag
    return v, 0


def _emit(text: str, path: Optional[str]):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _kv(pairs) -> str:
    return "".join(f"{k}={_fmt(v)}\n" for k, v in pairs)


# -- commands -------------------------------------------------------------------------------


THEORY_QUANTITIES = ("E", "c", "r", "u", "thresholds", "rho_star", "Btilde", "B", "rho_opt", "optimal_T", "power_T")


def cmd_theory(args) -> int:
    q = args.quantity
    prec = resolve_precision(args.precision)
    need = {
        "E": ["T"], "c": ["T"], "r": ["T"], "u": ["T"], "thresholds": ["omega", "T"],
        "rho_star": ["omega", "n", "T"], "Btilde": ["omega", "n", "rho", "T"], "B": ["omega", "n", "rho"],
        "rho_opt": ["omega", "n"], "optimal_T": ["n", "eps"], "power_T": ["n"],
    }[q]
    missing = [k for k in need if getattr(args, k) is None]
    if missing:
        raise ValueError(f"theory {q} needs --{' --'.join(missing)}")
    a = {k: getattr(args, k) for k in need}
    if q in ("E", "c", "r", "u"):
        Ts = value_list(a["T"])
        if len(Ts) > 1:  # tabulate as CSV over a T grid
            fn = {"E": theory.conv_rate_E, "c": theory.c_of_T, "r": theory.resolution_r, "u": theory.singularity_u}[q]
            with working_precision(prec):
                rows = [f"{T},{_fmt(fn(T, prec))}" for T in Ts]
            _emit("\n".join([f"T,{q}"] + rows) + "\n", getattr(args, "out", None))
            return 0
    with working_precision(prec):
        if q == "E":
            out = [("E", theory.conv_rate_E(a["T"], prec))]
        elif q == "c":
            out = [("c", theory.c_of_T(a["T"], prec))]
        elif q == "r":
            out = [("r", theory.resolution_r(a["T"], prec))]
        elif q == "u":
            out = [("u", theory.singularity_u(a["T"], prec))]
        elif q == "thresholds":
            th = theory.thresholds(a["omega"], a["T"], prec)
            out = [("n1", th.n1), ("n2", th.n2), ("n3", th.n3), ("dof_theoretical", 2 * th.n1), ("dof_numerical", 2 * th.n3)]
        elif q == "rho_star":
            out = [("rho_star", theory.rho_star(a["omega"], a["n"], a["T"], prec))]
        elif q == "Btilde":
            out = [("Btilde", theory.fe_bound_Btilde(a["omega"], a["n"], a["rho"], a["T"], prec))]
        elif q == "B":
            out = [("B", theory.cheb_bound_B(a["omega"], a["n"], a["rho"], prec))]
        elif q == "rho_opt":
            out = [("rho_opt", theory.cheb_rho_opt(a["omega"], a["n"], prec))]
        elif q == "optimal_T":
            out = [("T", theory.schedule_optimal_T(a["n"], a["eps"], prec))]
        else:
            out = [("T", theory.schedule_varying_T(a["n"], args.c, args.alpha, prec))]
    sys.stdout.write(_kv(out))
    return 0


def cmd_nodes(args) -> int:
    g = mapped_cheb_nodes(args.n, args.T, resolve_precision(args.precision))
    lines = ["index,x"] + [f"{i},{_fmt(x)}" for i, x in enumerate(g.nodes)]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _coeff_csv(header: str, rows) -> str:
    out = [header]
    for row in rows:
        out.append(",".join(_fmt(v) for v in row))
    return "\n".join(out) + "\n"


def cmd_extend(args) -> int:
    f = _make_f(args)
    if args.scheme == "continuous":
        ext = solve_continuous(f, args.n, args.T, args.precision, args.tol)
    else:
        ext = solve_discrete(f, args.n, args.T, args.precision, args.tol)
    linf, l2 = error_norms(ext, f)
    rep = ext.report
    summary = [
        ("scheme", args.scheme), ("function", str(f)), ("T", args.T), ("n", args.n), ("dof", ext.dof),
        ("precision", precision_label(ext.precision)), ("linf", linf), ("l2", l2),
        ("cond", rep.condition_number), ("effective_rank", rep.effective_rank), ("coeffnorm", ext.coeff_norm),
    ]
    sys.stdout.write(_kv(summary))
    if args.coeffs:
        rows = []
        if args.scheme == "continuous":
            vec = ext.coeffs.values
            for k, v in zip(range(-args.n, args.n + 1), vec):
                re, im = _split_complex(v)
                rows.append((k, re, im))
            text = _coeff_csv("k,re,im", rows)
        else:
            for k, v in enumerate(ext.cos_coeffs):
                rows.append(("cos", k, *_split_complex(v)))
            for k, v in enumerate(ext.sin_coeffs, start=1):
                rows.append(("sin", k, *_split_complex(v)))
            text = _coeff_csv("basis,k,re,im", rows)
        _emit(text, args.out)
    return 0


def cmd_orthopoly(args) -> int:
    f = _make_f(args)
    prec = "extended" if args.precision == "auto" else args.precision
    ext = expansion_coeffs(f, args.n, args.T, prec)
    rows = []
    for k in range(args.n + 1):
        a_re, a_im = _split_complex(ext.a[k])
        b = ext.b[k] if k < args.n else None
        b_re, b_im = _split_complex(b) if b is not None else (None, None)
        rows.append((k, a_re, a_im, b_re, b_im))
    _emit(_coeff_csv("k,a_re,a_im,b_re,b_im", rows), args.out)
    return 0


def cmd_cheb(args) -> int:
    f = _make_f(args)
    exp = cheb_coeffs(f, args.n, args.precision)
    errs = exp.partial_errors()
    sys.stdout.write(_kv([("function", str(f)), ("n", args.n), ("dof", exp.dof),
                          ("precision", precision_label(exp.precision)), ("linf", errs[-1])]))
    if args.coeffs:
        rows = [(k, *_split_complex(v), errs[k]) for k, v in enumerate(exp.coeffs)]
        _emit(_coeff_csv("k,re,im,linf_truncated", rows), args.out)
    return 0


def _write_records(records, args, knees=None):
    text = harness.emit_csv(records)
    _emit(text, args.out)
    if args.plot:
        if not args.out:
            raise ValueError("--plot needs --out (the script reads the CSV file)")
        x = "dof" if args.run == "tstrategy" else "n"
        y = "coeffnorm" if args.run == "coeffnorm" else ("cond" if args.run == "condition" else "linf")
        harness.emit_plotscript(records, args.out, args.plot, y=y, x=x)
    if knees:
        stream = sys.stdout if args.out else sys.stderr
        stream.write("# knee: dof = 2n+1 (continuous/orthopoly) or 2n+2 (discrete); constant = dof/omega\n")
        stream.write("omega,epsilon,T,scheme,n_star,dof,constant,resolved\n")
        for k in knees:
            stream.write(",".join(_fmt(v) for v in (k.omega, k.epsilon, k.T, k.scheme, k.n_star, k.dof,
                                                     k.constant, str(k.resolved).lower())) + "\n")


def cmd_run(args) -> int:
    timing, jobs = args.timing, args.jobs
    if args.run == "converge":
        recs = harness.run_convergence(_make_f(args), args.T, args.n, args.precision, args.scheme, args.tol,
                                       jobs, timing)
        _write_records(recs, args)
    elif args.run == "resolve":
        if args.fixed_n is not None:
            recs = []
            for scheme in args.scheme or ["discrete"]:
                recs += harness.run_omega_sweep(args.fixed_n, args.T, args.omega, args.precision, scheme,
                                                args.tol, jobs, timing)
            _write_records(sorted(recs, key=harness.ExperimentRecord.key), args)
            return 0
        n_range = (lambda w: args.n) if args.n else None
        knees, recs = [], []
        for scheme in args.scheme or [None]:
            for T in args.T:
                k, r = harness.run_resolution(args.omega, T, args.precision, args.eps, scheme,
                                              n_range, args.tol, jobs, timing)
                knees += k
                recs += r
        _write_records(sorted(recs, key=harness.ExperimentRecord.key), args, knees)
    elif args.run == "condition":
        recs = harness.run_condition(args.T, args.n, args.precision, args.tol, jobs=jobs, timing=timing)
        _write_records(recs, args)
    elif args.run == "coeffnorm":
        recs = harness.run_coeffnorm(args.omega, args.T, args.n, args.precisions, args.tol, jobs, timing)
        _write_records(recs, args)
    else:
        recs = []
        for name in args.function:
            recs += harness.run_tstrategy(_make_f(args, name), args.strategy or list(harness.DEFAULT_STRATEGIES),
                                          args.n, args.precision, args.scheme, not args.no_baseline, args.tol,
                                          jobs, timing)
        _write_records(sorted(recs, key=harness.ExperimentRecord.key), args)
    return 0


# -- parser -----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fourext", description="Fourier extension of functions on [-1, 1].")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theory", help="closed-form rates, thresholds and schedules")
    p.add_argument("quantity", choices=THEORY_QUANTITIES)
    p.add_argument("--T", default=None, help="one value, or for E, c, r and u a list such as 1.05:8:0.05")
    for name in ("omega", "n", "rho", "eps"):
        p.add_argument(f"--{name}", default=None)
    p.add_argument("--c", default="1")
    p.add_argument("--alpha", default="1/2")
    p.add_argument("--precision", default="double")
    p.add_argument("--out", default=None, help="write the table here when --T lists several values")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("nodes", help="symmetric mapped Chebyshev collocation nodes as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--T", required=True)
    p.add_argument("--precision", default="double")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_nodes)

    p = sub.add_parser("extend", help="compute one extension and report errors")
    p.add_argument("scheme", choices=("continuous", "discrete"))
    _function_args(p)
    p.add_argument("--T", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--coeffs", action="store_true", help="also emit the coefficients as CSV")
    _common(p)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("orthopoly", help="orthogonal-polynomial expansion coefficients")
    p.add_argument("action", choices=("coeffs",))
    _function_args(p)
    p.add_argument("--T", required=True)
    p.add_argument("--n", type=int, required=True)
    _common(p, "extended")
    p.set_defaults(func=cmd_orthopoly)

    p = sub.add_parser("baseline", help="Chebyshev expansion baseline")
    p.add_argument("kind", choices=("cheb",))
    _function_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--coeffs", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_cheb)

    p = sub.add_parser("run", help="experiment sweeps written as CSV")
    rs = p.add_subparsers(dest="run", required=True)

    def sweep(name, help_, precision="double"):
        q = rs.add_parser(name, help=help_)
        _common(q, precision)
        q.add_argument("--plot", default=None, help="also write a gnuplot script reading --out")
        q.add_argument("--jobs", type=int, default=1, help="worker threads (output does not depend on it)")
        q.add_argument("--timing", action="store_true", help="fill the ms column")
        return q

    q = sweep("converge", "error against n for several T", "auto")
    _function_args(q, "expx")
    q.add_argument("--T", type=value_list, default=value_list("2,4,6,8"))
    q.add_argument("--n", type=int_range, default=int_range("10:40:2"))
    q.add_argument("--scheme", choices=harness.SCHEMES, default="continuous")

    q = sweep("resolve", "knees of exp(i pi omega x)", "extended")
    q.add_argument("--omega", type=value_list, required=True)
    q.add_argument("--T", type=value_list, required=True)
    q.add_argument("--eps", type=float_list, default=[0.5, 0.1, 0.01])
    q.add_argument("--scheme", type=choice_list(harness.SCHEMES), default=None,
                   help="one or more schemes (default orthopoly in extended precision, discrete in double)")
    q.add_argument("--n", type=int_range, default=None, help="sweep range (default 0.3..1.4 omega T)")
    q.add_argument("--fixed-n", type=int, default=None, help="sweep omega at this n instead")

    q = sweep("condition", "condition numbers, continuous and discrete")
    q.add_argument("--T", default="2")
    q.add_argument("--n", type=int_range, default=int_range("1:30"))

    q = sweep("coeffnorm", "coefficient norm in two precisions", "auto")
    q.add_argument("--omega", default="20*sqrt(2)")
    q.add_argument("--T", default="4")
    q.add_argument("--n", type=int_range, default=int_range("2:60:2"))
    q.add_argument("--precisions", type=lambda s: [v.strip() for v in s.split(",")], default=["auto", "double"])

    q = sweep("tstrategy", "T chosen as a function of n, against Chebyshev")
    _function_args(q, "f1", several=True)
    q.add_argument("--strategy", action="append", default=None,
                   help="fixed:<T>, power:<c>:<alpha> or optimal:<eps>; repeatable")
    q.add_argument("--n", type=int_range, default=int_range("20:240:4"))
    q.add_argument("--scheme", choices=("continuous", "discrete"), default="discrete")
    q.add_argument("--no-baseline", action="store_true")
    p.set_defaults(func=cmd_run)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NUMERICAL_FAILURES as exc:
        sys.stderr.write(f"fourext: numerical failure: {exc}\n")
        return 2
    except (ValueError, UnknownFunctionError, SyntaxError, ZeroDivisionError) as exc:
        sys.stderr.write(f"fourext: error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
