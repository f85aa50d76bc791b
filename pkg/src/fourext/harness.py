"""Experiment sweeps, knee detection and CSV / gnuplot output.

Every sweep returns a list of :class:`ExperimentRecord`; records are sorted
by a fixed key so output is byte-identical whatever the number of worker
threads.  Wall time is recorded only on request, for the same reason.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .chebyshev import cheb_coeffs
from .continuous import error_norms, resolve_solve_precision, solve_continuous
from .discrete import solve_discrete
from .numkit.functions import TestFunction, make_function
from .numkit.precision import DOUBLE, as_float, precision_label, resolve_precision, working_precision
from .orthopoly import expansion_coeffs, stieltjes_recurrence
from .theory import conv_rate_E, schedule_optimal_T

CSV_FIELDS = ("scheme", "function", "params", "T", "n", "dof", "precision", "linf", "l2", "cond", "coeffnorm", "ms")
SCHEMES = ("continuous", "discrete", "orthopoly", "cheb")


@dataclass
class ExperimentRecord:
    """One sweep point; ``None`` marks quantities a scheme does not produce."""

    scheme: str
    function: str
    params: str
    T: str
    n: int
    dof: int
    precision: str
    linf: Optional[float]
    l2: Optional[float] = None
    cond: Optional[float] = None
    coeffnorm: Optional[float] = None
    ms: Optional[float] = None

    @property
    def varying_T(self) -> bool:
        """True when T follows a strategy in n, so T does not identify a curve."""
        return "strategy=" in (self.params or "") and not self.params.split("strategy=")[1].startswith("fixed")

    def key(self):
        T = (0, 0.0, "") if self.varying_T else _sort_T(self.T)
        return (self.scheme, self.function, self.params, T, self.precision, self.n)

    def as_row(self) -> Dict[str, str]:
        return {k: _fmt(_plain(getattr(self, k))) for k in CSV_FIELDS}


def _sort_T(T: str):
    try:
        return (0, as_float(T), T)
    except (ValueError, SyntaxError):
        return (1, 0.0, T)


def _plain(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if v is not None and not isinstance(v, (str, int, float)):
        return float(v)
    return v


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return repr(v)  # shortest text that round-trips
    return str(v)


def format_T(T) -> str:
    """Stable text form of an extension parameter: expressions verbatim, numbers with 12 significant digits."""
    if isinstance(T, str):
        return T
    if isinstance(T, Fraction):
        return f"{T.numerator}/{T.denominator}"
    return f"{float(T):.12g}"


@dataclass
class KneeResult:
    """Onset of convergence in an n-sweep.

    ``n_star`` is the first n with error below ``epsilon`` whose next two sweep
    points stay below 10 epsilon; ``dof`` counts degrees of freedom at
    ``n_star`` (2n+1 continuous, 2n+2 discrete, n+1 Chebyshev) and
    ``constant = dof / omega``.
    """

    omega: float
    epsilon: float
    n_star: Optional[int]
    dof: Optional[int]
    resolved: bool
    T: str = ""
    scheme: str = ""

    @property
    def constant(self) -> Optional[float]:
        return None if self.dof is None else self.dof / self.omega


def find_knee(ns: Sequence[int], errors: Sequence[float], eps: float, lookahead: int = 2) -> Optional[int]:
    """Index into ``ns`` of the knee, or ``None``.

    >>> find_knee([1, 2, 3, 4, 5], [1, 0.05, 2.0, 0.01, 0.01], 0.1)
    3
    """
    for i, e in enumerate(errors):
        if e < eps and all(errors[j] < 10 * eps for j in range(i + 1, min(i + 1 + lookahead, len(errors)))):
            return i
    return None


def dof_for(scheme: str, n: int) -> int:
    return {"continuous": 2 * n + 1, "orthopoly": 2 * n + 1, "discrete": 2 * n + 2, "cheb": n + 1}[scheme]


# -- single-point evaluation -------------------------------------------------------------


def _run_point(scheme: str, f: TestFunction, n: int, T, prec, tol, timing: bool) -> ExperimentRecord:
    t0 = time.perf_counter()
    if scheme == "continuous":
        ext = solve_continuous(f, n, T, prec, tol)
        linf, l2 = error_norms(ext, f)
        cond, cn, label = ext.report.condition_number, ext.coeff_norm, precision_label(ext.precision)
    elif scheme == "discrete":
        p = resolve_precision(prec)
        ext = solve_discrete(f, n, T, p, tol)
        linf, l2 = error_norms(ext, f)
        cond, cn, label = ext.report.condition_number, ext.coeff_norm, precision_label(p)
    else:
        raise ValueError(f"scheme {scheme!r} is not a per-point solver")
    ms = (time.perf_counter() - t0) * 1e3 if timing else None
    return ExperimentRecord(scheme, f.name, f.param_string(), format_T(T), n, dof_for(scheme, n), label,
                            linf, l2, cond, cn, ms)


def _map(fn: Callable, items: Sequence, jobs: int) -> List:
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _sorted(records: Iterable[ExperimentRecord]) -> List[ExperimentRecord]:
    return sorted(records, key=ExperimentRecord.key)


def sweep_partial(scheme: str, f: TestFunction, n_list: Sequence[int], T=None, prec=None,
                  timing: bool = False) -> List[ExperimentRecord]:
    """n-sweep through a scheme whose degree-n result contains all lower degrees.

    ``orthopoly`` gives the exact continuous extension for every n from one
    set of coefficients; ``cheb`` does the same for truncated Chebyshev series.
    """
    n_list = sorted(set(int(n) for n in n_list))
    if not n_list:
        return []
    n_max = n_list[-1]
    p = resolve_precision(prec if prec is not None else "extended")
    t0 = time.perf_counter()
    if scheme == "orthopoly":
        ext = expansion_coeffs(f, n_max, T, p)
        errs = ext.partial_errors()
        T_txt = format_T(T)
    elif scheme == "cheb":
        ext = cheb_coeffs(f, n_max, p)
        errs = ext.partial_errors()
        T_txt = ""
    else:
        raise ValueError(f"scheme {scheme!r} has no incremental sweep")
    ms = (time.perf_counter() - t0) * 1e3 if timing else None
    return [ExperimentRecord(scheme, f.name, f.param_string(), T_txt, n, dof_for(scheme, n), precision_label(p),
                             float(errs[n]), ms=ms) for n in n_list]


# -- sweeps -------------------------------------------------------------------------------


def run_convergence(f: TestFunction, T_list: Sequence, n_list: Sequence[int], prec="auto",
                    scheme: str = "continuous", tol: Optional[float] = None, jobs: int = 1,
                    timing: bool = False) -> List[ExperimentRecord]:
    """Error against n for each T.

    ``prec="auto"`` picks, per (n, T), enough bits to reproduce the exact
    minimiser (continuous scheme only; other schemes map it to the default
    extended precision).
    """
    n_list = list(n_list)
    if not n_list or not T_list:
        return []
    if scheme in ("orthopoly", "cheb"):
        p = "extended" if prec == "auto" else prec
        out = []
        for T in T_list:
            out += sweep_partial(scheme, f, n_list, T, p, timing)
        return _sorted(out)
    if scheme == "discrete" and prec == "auto":
        prec = "extended"
    items = [(T, n) for T in T_list for n in n_list]
    recs = _map(lambda it: _run_point(scheme, f, it[1], it[0], prec, tol, timing), items, jobs)
    return _sorted(recs)


def knees_from_records(records: Sequence[ExperimentRecord], omega: float, eps_list: Sequence[float]) -> List[KneeResult]:
    recs = sorted(records, key=lambda r: r.n)
    ns = [r.n for r in recs]
    errs = [r.linf for r in recs]
    out = []
    for eps in eps_list:
        i = find_knee(ns, errs, eps)
        scheme = recs[0].scheme if recs else ""
        T = recs[0].T if recs else ""
        if i is None:
            out.append(KneeResult(omega, eps, None, None, False, T, scheme))
        else:
            out.append(KneeResult(omega, eps, ns[i], recs[i].dof, True, T, scheme))
    return out


def run_resolution(omega_list: Sequence, T, prec="extended", eps_list: Sequence[float] = (0.5, 0.1, 0.01),
                   scheme: Optional[str] = None, n_range: Optional[Callable[[float], Sequence[int]]] = None,
                   tol: Optional[float] = None, jobs: int = 1,
                   timing: bool = False) -> Tuple[List[KneeResult], List[ExperimentRecord]]:
    """Knees of exp(i pi omega x) for each omega, from step-1 sweeps in n.

    The default scheme is ``orthopoly`` (exact extension) for extended
    precision and ``discrete`` for double.  The default n range covers
    0.3 to 1.4 times omega T, which brackets both the theoretical knee
    (omega r(T) / 2) and the one seen in double precision (omega T).
    """
    p = resolve_precision(prec)
    if scheme is None:
        scheme = "discrete" if p == DOUBLE else "orthopoly"
    Tf = as_float(T) if isinstance(T, str) else float(T)
    knees, records = [], []
    for omega in omega_list:
        w = as_float(omega)
        ns = list(n_range(w)) if n_range else list(range(max(0, int(0.3 * w * Tf)), int(1.4 * w * Tf) + 4))
        f = make_function("expiw", omega=omega)
        if scheme in ("orthopoly", "cheb"):
            recs = sweep_partial(scheme, f, ns, T, p, timing)
        else:
            recs = _sorted(_map(lambda n: _run_point(scheme, f, n, T, p, tol, timing), ns, jobs))
        records += recs
        knees += knees_from_records(recs, w, eps_list)
    return knees, _sorted(records)


def run_omega_sweep(n: int, T_list: Sequence, omega_list: Sequence, prec="double", scheme: str = "discrete",
                    tol: Optional[float] = None, jobs: int = 1, timing: bool = False) -> List[ExperimentRecord]:
    """Fixed n, varying omega: the error of exp(i pi omega x) for each T.

    Records carry omega in ``params``.
    """
    items = [(T, w) for T in T_list for w in omega_list]
    recs = _map(lambda it: _run_point(scheme, make_function("expiw", omega=it[1]), n, it[0], prec, tol, timing),
                items, jobs)
    return _sorted(recs)


def run_condition(T, n_list: Sequence[int], prec="double", tol: Optional[float] = None,
                  f: Optional[TestFunction] = None, jobs: int = 1, timing: bool = False) -> List[ExperimentRecord]:
    """Continuous and discrete extensions of ``f`` (default cos 16x) with their condition numbers."""
    f = f or make_function("cos16x")
    items = [(s, n) for s in ("continuous", "discrete") for n in n_list]
    recs = _map(lambda it: _run_point(it[0], f, it[1], T, prec, tol, timing), items, jobs)
    return _sorted(recs)


def saturation_level(prec=DOUBLE) -> float:
    """Condition numbers above this are treated as saturated by rounding (1e-3 / epsilon)."""
    p = resolve_precision(prec)
    return 1e-3 / (2.0 ** (1 - p))


def fit_log_slope(ns: Sequence[float], values: Sequence[float], lo: float = 0.0, hi: float = math.inf) -> float:
    """Least-squares slope of ln(values) against n, using only points with lo < value < hi."""
    pts = [(n, math.log(v)) for n, v in zip(ns, values) if v is not None and lo < v < hi and math.isfinite(v)]
    if len(pts) < 2:
        raise ValueError("need at least two points inside the fit window")
    x = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[1] for p in pts])
    return float(np.polyfit(x, y, 1)[0])


def post_knee_slope(records: Sequence[ExperimentRecord], eps: float = 1e-2, points: int = 8,
                    start_dof: Optional[int] = None) -> float:
    """Fitted ln(linf) slope per degree of freedom over ``points`` sweep points from the knee.

    The window starts at the eps-knee of ``records`` unless ``start_dof`` is
    given; negative values mean convergence, steeper is more negative.
    """
    recs = sorted(records, key=lambda r: r.dof)
    if start_dof is None:
        i = find_knee([r.dof for r in recs], [r.linf for r in recs], eps)
        if i is None:
            raise ValueError(f"no knee below {eps}")
    else:
        i = next(j for j, r in enumerate(recs) if r.dof >= start_dof)
    window = recs[i: i + points]
    return fit_log_slope([r.dof for r in window], [r.linf for r in window])


def condition_slopes(records: Sequence[ExperimentRecord], lo: float = 10.0,
                     hi: Optional[float] = None) -> Dict[str, float]:
    """Fitted ln(kappa) slope per scheme over the pre-saturation window."""
    hi = hi or saturation_level(DOUBLE)
    out = {}
    for scheme in ("continuous", "discrete"):
        rs = sorted((r for r in records if r.scheme == scheme), key=lambda r: r.n)
        if rs:
            out[scheme] = fit_log_slope([r.n for r in rs], [r.cond for r in rs], lo, hi)
    return out


def run_coeffnorm(omega, T, n_list: Sequence[int], precisions: Sequence = ("auto", "double"),
                  tol: Optional[float] = None, jobs: int = 1, timing: bool = False) -> List[ExperimentRecord]:
    """Coefficient norms of the continuous extension of exp(i pi omega x), once per precision."""
    f = make_function("expiw", omega=omega)
    items = [(p, n) for p in precisions for n in n_list]
    recs = _map(lambda it: _run_point("continuous", f, it[1], T, it[0], tol, timing), items, jobs)
    return _sorted(recs)


# -- T strategies -----------------------------------------------------------------------------


@dataclass(frozen=True)
class TStrategy:
    """Rule giving T as a function of n.

    Spec strings: ``fixed:<T>``, ``power:<c>:<alpha>`` for T = 1 + c n^-alpha,
    ``optimal:<eps_tol>`` for E(T)^-n = eps_tol.
    """

    kind: str
    args: Tuple[str, ...]

    @classmethod
    def parse(cls, text: str) -> "TStrategy":
        parts = text.strip().split(":")
        kind, args = parts[0], tuple(parts[1:])
        need = {"fixed": 1, "power": 2, "optimal": 1}
        if kind not in need or len(args) != need[kind]:
            raise ValueError(f"bad T strategy {text!r}; use fixed:<T>, power:<c>:<alpha> or optimal:<eps>")
        return cls(kind, args)

    def __str__(self):
        return ":".join((self.kind,) + self.args)

    def T_for(self, n: int, prec=DOUBLE):
        """T at degree n: an expression string for exact cases, else a number at ``prec``."""
        if self.kind == "fixed":
            return self.args[0]
        if self.kind == "power":
            c, a = self.args
            return f"1+({c})/{max(n, 1)}**({a})"
        with working_precision(prec):
            return schedule_optimal_T(max(n, 1), self.args[0], prec)


DEFAULT_STRATEGIES = ("fixed:4/3", "power:1:1", "power:1:2/3", "power:1:1/2", "optimal:1e-13")


def run_tstrategy(f: TestFunction, strategies: Sequence[Union[str, TStrategy]], n_list: Sequence[int],
                  prec="double", scheme: str = "discrete", baseline: bool = True, tol: Optional[float] = None,
                  jobs: int = 1, timing: bool = False) -> List[ExperimentRecord]:
    """Error against n for several T rules, plus the Chebyshev baseline (scheme ``cheb``).

    The ``params`` column carries ``strategy=<spec>`` so curves can be told apart.
    For the baseline, n is the Chebyshev degree.
    """
    strategies = [s if isinstance(s, TStrategy) else TStrategy.parse(s) for s in strategies]
    p = resolve_precision(prec)
    items = [(s, n) for s in strategies for n in n_list]

    def one(it):
        s, n = it
        rec = _run_point(scheme, f, n, s.T_for(n, p), p, tol, timing)
        rec.params = ";".join(x for x in (f.param_string(), f"strategy={s}") if x)
        if s.kind != "fixed":
            rec.T = format_T(as_float(rec.T) if isinstance(rec.T, str) else rec.T)
        return rec

    recs = _map(one, items, jobs)
    if baseline and n_list:
        # Match the extension's degrees of freedom: Chebyshev degree up to 2 n_max + 1.
        cheb_ns = sorted(set(dof_for(scheme, n) - 1 for n in n_list))
        recs += sweep_partial("cheb", f, cheb_ns, None, p, timing)
    return _sorted(recs)


# -- output ----------------------------------------------------------------------------------


def emit_csv(records: Sequence[ExperimentRecord], path=None) -> str:
    """Write records with the fixed header; returns the CSV text (also written to ``path`` if given)."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow(r.as_row())
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def _parse_cell(name: str, text: str):
    if name in ("scheme", "function", "params", "T", "precision"):
        return text
    if text == "":
        return None
    if name in ("n", "dof"):
        return int(text)
    if name in ("linf", "l2", "cond", "coeffnorm", "ms"):
        return float(text)
    return text


def read_csv(source) -> List[ExperimentRecord]:
    """Parse CSV text or a path written by :func:`emit_csv`."""
    if isinstance(source, str) and "\n" in source:
        fh = io.StringIO(source)
    else:
        fh = open(source, newline="")
    with fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_FIELDS:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        return [ExperimentRecord(**{k: _parse_cell(k, row[k]) for k in CSV_FIELDS}) for row in reader]


def emit_plotscript(records: Sequence[ExperimentRecord], csv_path: str, path=None, y: str = "linf",
                    x: str = "n", title: str = "") -> str:
    """A gnuplot script drawing one log-scale curve per (scheme, function, params, T, precision) group.

    Precision is grouped by family, so an ``auto`` sweep whose bit count
    grows with n still draws a single extended-precision curve.  The script
    reads only ``csv_path``.
    """
    col = {name: i + 1 for i, name in enumerate(CSV_FIELDS)}
    groups = []
    for r in records:
        g = (r.scheme, r.function, r.params, "" if r.varying_T else r.T, r.precision.split(":")[0])
        if g not in groups:
            groups.append(g)
    lines = [
        "# gnuplot script; run with: gnuplot -p <this file>",
        'set datafile separator ","',
        "set logscale y",
        "set key outside right",
        f'set xlabel "{x}"',
        f'set ylabel "{y}"',
    ]
    if title:
        lines.append(f'set title "{title}"')
    plots = []
    for s, fn, ps, T, pr in groups:
        fields = [("scheme", s), ("function", fn), ("params", ps)] + ([("T", T)] if T else [])
        cond = " && ".join([f'strcol({col[k]}) eq "{v}"' for k, v in fields]
                           + [f'substr(strcol({col["precision"]}), 1, {len(pr)}) eq "{pr}"'])
        label = " ".join(v for v in (s, fn, ps, f"T={T}" if T else "", pr) if v).replace('"', "'")
        plots.append(f'"{csv_path}" every ::1 using {col[x]}:(({cond}) ? ${col[y]} : 1/0) with linespoints title "{label}"')
    if plots:
        lines.append("plot " + ", \\\n     ".join(plots))
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def slope_to_rate(slope: float) -> float:
    """Convert a fitted ln(error) slope per n into a geometric rate."""
    return math.exp(-slope)


__all__ = [
    "CSV_FIELDS",
    "DEFAULT_STRATEGIES",
    "ExperimentRecord",
    "KneeResult",
    "TStrategy",
    "condition_slopes",
    "emit_csv",
    "emit_plotscript",
    "find_knee",
    "fit_log_slope",
    "knees_from_records",
    "post_knee_slope",
    "read_csv",
    "run_coeffnorm",
    "run_condition",
    "run_convergence",
    "run_omega_sweep",
    "run_resolution",
    "run_tstrategy",
    "saturation_level",
    "slope_to_rate",
    "sweep_partial",
]
