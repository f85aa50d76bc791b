"""Catalog of target functions on [-1, 1].

Each entry evaluates at either precision and carries the metadata the
quadrature layer needs: an effective frequency (in units of pi, i.e. the
``omega`` of ``exp(i pi omega x)``) used to size Gauss-Legendre rules, and any
interior points where the function is not smooth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Tuple

import numpy as np

from .airy import airy_ai
from .precision import DOUBLE, Number, as_float, backend_for, parse_value, resolve_precision


class UnknownFunctionError(KeyError):
    pass


@dataclass(frozen=True)
class _Entry:
    evaluate: Callable  # (bk, x, params) -> array
    params: Tuple[str, ...]
    is_complex: bool
    frequency: Callable  # params(float) -> omega-equivalent
    breakpoints: Tuple[float, ...] = ()
    description: str = ""


def _expiw(bk, x, p):
    arg = bk.pi * p["omega"] * x
    return bk.make_complex(bk.cos(arg), bk.sin(arg))


def _f1(bk, x, p):
    return (1 + x * x) * bk.cos(10 * x) * bk.cos(100 * bk.pi * x)


def _f2(bk, x, p):
    z = -36 * x - 32
    return airy_ai(z, bk.prec)


def _absx3(bk, x, p):
    ax = bk.abs(x)
    return ax * ax * ax


_CATALOG: Dict[str, _Entry] = {
    "expiw": _Entry(_expiw, ("omega",), True, lambda p: abs(p["omega"]),
                    description="exp(i pi omega x)"),
    "cosw": _Entry(lambda bk, x, p: bk.cos(bk.pi * p["omega"] * x), ("omega",), False,
                   lambda p: abs(p["omega"]), description="cos(pi omega x)"),
    "sinw": _Entry(lambda bk, x, p: bk.sin(bk.pi * p["omega"] * x), ("omega",), False,
                   lambda p: abs(p["omega"]), description="sin(pi omega x)"),
    "expx": _Entry(lambda bk, x, p: bk.exp(x), (), False, lambda p: 0.0, description="exp(x)"),
    "cos16x": _Entry(lambda bk, x, p: bk.cos(16 * x), (), False, lambda p: 16 / math.pi,
                     description="cos(16 x)"),
    "f1": _Entry(_f1, (), False, lambda p: 100 + 10 / math.pi,
                 description="(1 + x^2) cos(10 x) cos(100 pi x)"),
    # Local wavenumber of Ai(-z) is sqrt(z); at x = 1, z = 68 and dz/dx = 36.
    "f2": _Entry(_f2, (), False, lambda p: 36 * math.sqrt(68) / math.pi,
                 description="Ai(-36 x - 32)"),
    "absx3": _Entry(_absx3, (), False, lambda p: 0.0, breakpoints=(0.0,), description="|x|^3"),
    "chebT": _Entry(lambda bk, x, p: bk.cos(p["k"] * bk.acos(x)), ("k",), False,
                    lambda p: abs(p["k"]) / math.pi, description="Chebyshev polynomial T_k(x)"),
}


def catalog_keys() -> Tuple[str, ...]:
    return tuple(_CATALOG)


@dataclass(frozen=True)
class TestFunction:
    """A catalog function with its parameters.

    Parameters may be numbers or expression strings such as ``"20*sqrt(2)"``;
    strings are evaluated at the requested working precision.

    >>> f = TestFunction("expiw", {"omega": 10})
    >>> complex(f(np.array([0.0]))[0])
    (1+0j)
    """

    __test__ = False  # keep pytest from collecting this class

    name: str
    params: Mapping[str, Number] = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in _CATALOG:
            raise UnknownFunctionError(f"unknown catalog function {self.name!r}; "
                                       f"choose from {', '.join(_CATALOG)}")
        entry = _CATALOG[self.name]
        missing = [k for k in entry.params if k not in self.params]
        if missing:
            raise ValueError(f"{self.name} needs parameters {missing}")
        extra = [k for k in self.params if k not in entry.params]
        if extra:
            raise ValueError(f"{self.name} does not take parameters {extra}")
        object.__setattr__(self, "params", dict(self.params))

    @property
    def is_complex(self) -> bool:
        return _CATALOG[self.name].is_complex

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return _CATALOG[self.name].breakpoints

    @property
    def frequency(self) -> float:
        """Effective omega (oscillation ``exp(i pi omega x)``) for sizing quadrature."""
        return float(_CATALOG[self.name].frequency({k: as_float(v) for k, v in self.params.items()}))

    @property
    def description(self) -> str:
        return _CATALOG[self.name].description

    def param_string(self) -> str:
        return ";".join(f"{k}={v}" for k, v in sorted(self.params.items()))

    def __str__(self):
        ps = self.param_string()
        return f"{self.name}({ps})" if ps else self.name

    def __call__(self, x, prec=DOUBLE):
        """Evaluate at backend array ``x``.

        For extended precision the caller must already be inside
        ``working_precision(prec)``.
        """
        return eval_test_function(self, x, prec)

    def __hash__(self):
        return hash((self.name, tuple(sorted((k, str(v)) for k, v in self.params.items()))))


def eval_test_function(f: TestFunction, x, prec=DOUBLE):
    prec = resolve_precision(prec)
    bk = backend_for(prec)
    entry = _CATALOG[f.name]
    params = {k: parse_value(v, prec) for k, v in f.params.items()}
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(x)
    if prec == DOUBLE:
        xa = np.asarray(xa, dtype=float)
    out = entry.evaluate(bk, xa, params)
    out = np.asarray(out)
    if prec == DOUBLE:
        out = out.astype(complex if entry.is_complex else float)
    return out[0] if scalar else out


def make_function(name: str, **params) -> TestFunction:
    return TestFunction(name, params)
