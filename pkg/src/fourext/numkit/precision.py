"""Precision selection and array backends.

Native precision (53 bits) runs on numpy float64/complex128 arrays.  Any
larger precision runs on numpy object arrays holding ``gmpy2.mpfr`` and
``gmpy2.mpc`` values; MPFR rounds every operation correctly, including the
elementary functions.  gmpy2 contexts are thread-local, so extended-precision
computations in different threads do not interfere.

Every extended-precision computation must execute inside
:func:`working_precision`, because gmpy2 rounds results of ``a * b`` to the
precision of the *active* context, not of the operands.
"""

from __future__ import annotations

import ast
import math
import operator
from contextlib import contextmanager
from fractions import Fraction
from typing import Iterator, Union

import gmpy2
import numpy as np

DOUBLE = 53
EXTENDED = 332

PrecisionLike = Union[int, str, None]
Number = Union[int, float, Fraction, str]


class PrecisionError(ArithmeticError):
    """Raised when a computation cannot reach its accuracy target at the available precision."""


def resolve_precision(prec: PrecisionLike) -> int:
    """Normalise a precision spec to a number of binary digits.

    Accepts ``None``/``"double"`` (53), ``"extended"`` (332), ``"extended:<bits>"``,
    or an integer number of bits.  Only 53 or at least 64 bits are meaningful.

    >>> resolve_precision("extended:512")
    512
    """
    if prec is None:
        return DOUBLE
    if isinstance(prec, (int, np.integer)):
        bits = int(prec)
    else:
        text = str(prec).strip().lower()
        if text in ("double", "native", "53"):
            return DOUBLE
        if text == "extended":
            return EXTENDED
        if text.startswith("extended:"):
            bits = int(text.split(":", 1)[1])
        elif text.isdigit():
            bits = int(text)
        else:
            raise ValueError(f"unknown precision {prec!r}")
    if bits == DOUBLE:
        return DOUBLE
    if bits < 64:
        raise ValueError(f"precision must be 53 (native) or >= 64 bits, got {bits}")
    return bits


def precision_label(prec: int) -> str:
    return "double" if prec == DOUBLE else f"extended:{prec}"


def decimal_digits(prec: int) -> float:
    return prec * math.log10(2.0)


class DoubleBackend:
    """Array operations in IEEE double precision."""

    prec = DOUBLE
    is_extended = False

    def __init__(self):
        self.pi = np.pi
        self.eps = np.finfo(float).eps
        self.one = 1.0
        self.zero = 0.0

    def scalar(self, value: Number):
        return float(_parse_number(value))

    def array(self, values) -> np.ndarray:
        values = np.asarray(values)
        if np.iscomplexobj(values):
            return values.astype(complex)
        if values.dtype == object:
            return np.asarray([_to_python(v) for v in values.ravel()]).reshape(values.shape)
        return values.astype(float)

    def zeros(self, shape, complex: bool = False) -> np.ndarray:
        return np.zeros(shape, dtype=np.complex128 if complex else float)

    def eye(self, k: int) -> np.ndarray:
        return np.eye(k)

    def linspace(self, a, b, num: int) -> np.ndarray:
        return np.linspace(float(a), float(b), num)

    def make_complex(self, re, im):
        return np.asarray(re) + 1j * np.asarray(im)

    def to_double(self, values) -> np.ndarray:
        return np.asarray(values)

    sin = staticmethod(np.sin)
    cos = staticmethod(np.cos)
    tan = staticmethod(np.tan)
    exp = staticmethod(np.exp)
    log = staticmethod(np.log)
    sqrt = staticmethod(np.sqrt)
    acos = staticmethod(np.arccos)
    asin = staticmethod(np.arcsin)
    atan = staticmethod(np.arctan)
    sinh = staticmethod(np.sinh)
    cosh = staticmethod(np.cosh)
    acosh = staticmethod(np.arccosh)
    real = staticmethod(np.real)
    imag = staticmethod(np.imag)
    conj = staticmethod(np.conj)
    abs = staticmethod(np.abs)

    @staticmethod
    def cot(x):
        return 1.0 / np.tan(x)


def _vectorize(fn):
    uf = np.frompyfunc(fn, 1, 1)

    def apply(x):
        out = uf(x)
        return out

    return apply


class MultiBackend:
    """Array operations on object arrays of MPFR numbers at ``prec`` bits.

    Only valid while the matching gmpy2 context is active (see
    :func:`working_precision`).
    """

    is_extended = True

    def __init__(self, prec: int):
        self.prec = prec
        self.pi = gmpy2.const_pi()
        self.eps = gmpy2.mpfr(2) ** (1 - prec)
        self.one = gmpy2.mpfr(1)
        self.zero = gmpy2.mpfr(0)

    def scalar(self, value: Number):
        return _to_mpfr(value)

    def array(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=object)
        flat = [_to_mp(v) for v in values.ravel()]
        out = np.empty(len(flat), dtype=object)
        out[:] = flat
        return out.reshape(values.shape)

    def zeros(self, shape, complex: bool = False) -> np.ndarray:
        out = np.empty(shape, dtype=object)
        zero = gmpy2.mpc(0) if complex else gmpy2.mpfr(0)
        out.fill(zero)
        return out

    def eye(self, k: int) -> np.ndarray:
        out = self.zeros((k, k))
        for i in range(k):
            out[i, i] = gmpy2.mpfr(1)
        return out

    def linspace(self, a, b, num: int) -> np.ndarray:
        a = self.scalar(a)
        b = self.scalar(b)
        if num == 1:
            return self.array([a])
        step = (b - a) / (num - 1)
        return self.array([a + step * j for j in range(num)])

    def make_complex(self, re, im):
        return _mk_complex(re, im)

    def to_double(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=object)
        if any(isinstance(v, type(gmpy2.mpc(0))) for v in values.ravel()):
            return np.array([complex(v) for v in values.ravel()]).reshape(values.shape)
        return np.array([float(v) for v in values.ravel()]).reshape(values.shape)

    sin = staticmethod(_vectorize(gmpy2.sin))
    cos = staticmethod(_vectorize(gmpy2.cos))
    tan = staticmethod(_vectorize(gmpy2.tan))
    cot = staticmethod(_vectorize(gmpy2.cot))
    exp = staticmethod(_vectorize(gmpy2.exp))
    log = staticmethod(_vectorize(gmpy2.log))
    sqrt = staticmethod(_vectorize(gmpy2.sqrt))
    acos = staticmethod(_vectorize(gmpy2.acos))
    asin = staticmethod(_vectorize(gmpy2.asin))
    atan = staticmethod(_vectorize(gmpy2.atan))
    sinh = staticmethod(_vectorize(gmpy2.sinh))
    cosh = staticmethod(_vectorize(gmpy2.cosh))
    acosh = staticmethod(_vectorize(gmpy2.acosh))
    real = staticmethod(_vectorize(lambda z: z.real))
    imag = staticmethod(_vectorize(lambda z: z.imag))
    conj = staticmethod(_vectorize(lambda z: z.conjugate() if isinstance(z, _MPC) else z))
    abs = staticmethod(_vectorize(abs))


_MPC = type(gmpy2.mpc(0))
_mk_complex = np.frompyfunc(gmpy2.mpc, 2, 1)

_DOUBLE_BACKEND = DoubleBackend()


@contextmanager
def working_precision(prec: PrecisionLike) -> Iterator[Union[DoubleBackend, MultiBackend]]:
    """Activate ``prec`` bits and yield the matching array backend.

    >>> with working_precision("extended") as bk:
    ...     bk.prec
    332
    """
    bits = resolve_precision(prec)
    if bits == DOUBLE:
        yield _DOUBLE_BACKEND
        return
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        yield MultiBackend(bits)


def backend_for(prec: PrecisionLike):
    """Backend without activating a context; callers must already be inside one."""
    bits = resolve_precision(prec)
    if bits == DOUBLE:
        return _DOUBLE_BACKEND
    return MultiBackend(bits)


# -- exact parameter parsing ----------------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def _eval_node(node, fns):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body, fns)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return fns["num"](node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        val = _eval_node(node.operand, fns)
        return -val if isinstance(node.op, ast.USub) else val
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left, fns), _eval_node(node.right, fns))
    if isinstance(node, ast.Name) and node.id == "pi":
        return fns["pi"]()
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt":
        if len(node.args) != 1:
            raise ValueError("sqrt takes one argument")
        return fns["sqrt"](_eval_node(node.args[0], fns))
    raise ValueError(f"unsupported expression element {ast.dump(node)}")


def _parse_number(value: Number):
    """Evaluate a parameter to a Python float (double path)."""
    if isinstance(value, str):
        fns = {"num": float, "pi": lambda: math.pi, "sqrt": math.sqrt}
        return _eval_node(ast.parse(value.strip(), mode="eval"), fns)
    if isinstance(value, Fraction):
        return float(value)
    return value


def _to_mpfr(value: Number):
    """Evaluate a parameter in the active gmpy2 context.

    Strings are parsed at full precision, so ``"sqrt(2)"`` or ``"0.1"`` are
    exact to the working precision rather than rounded through a double.
    """
    if isinstance(value, str):
        fns = {
            "num": lambda v: gmpy2.mpfr(repr(v)) if isinstance(v, float) else gmpy2.mpfr(v),
            "pi": gmpy2.const_pi,
            "sqrt": gmpy2.sqrt,
        }
        return gmpy2.mpfr(_eval_node(ast.parse(value.strip(), mode="eval"), fns))
    if isinstance(value, Fraction):
        return gmpy2.mpfr(value.numerator) / value.denominator
    if isinstance(value, (np.floating, np.integer)):
        return gmpy2.mpfr(value.item())
    return gmpy2.mpfr(value)


def _to_mp(value):
    if isinstance(value, _MPC):
        return gmpy2.mpc(value)
    if isinstance(value, (complex, np.complexfloating)):
        return gmpy2.mpc(complex(value))
    return _to_mpfr(value)


def _to_python(value):
    if isinstance(value, _MPC):
        return complex(value)
    return float(value)


def parse_value(value: Number, prec: PrecisionLike = DOUBLE):
    """Evaluate a numeric parameter (number, fraction or expression string) at ``prec``.

    Must be called inside :func:`working_precision` for extended precision.
    """
    if resolve_precision(prec) == DOUBLE:
        return float(_parse_number(value))
    return _to_mpfr(value)


def as_float(value) -> float:
    if isinstance(value, str):
        return float(_parse_number(value))
    return float(value)
