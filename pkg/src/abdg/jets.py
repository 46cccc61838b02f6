"""Truncated bivariate Taylor arithmetic (forward-mode jets).

A ``MultiJet`` of order K stores the Taylor coefficients c_ij = (d^{i+j}f /
du^i dv^j) / (i! j!) of a scalar chart function about a base point, for all
i + j <= K.  Arithmetic on jets propagates every partial derivative up to
order K exactly (to rounding), which is what the downstream geometry uses
instead of finite differences.

Coefficients are stored packed by total degree: the entry for (i, j) with
d = i + j sits at index d(d+1)/2 + j.  Products use a precomputed index
table per order and a single ``bincount``, so the Cauchy product stays one
vectorized operation.

Elementary functions are composed through one code path: build the
univariate Taylor coefficients of g about the jet's value from the
function's derivative recurrence, then substitute the (value-free) jet by
Horner's rule.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DegenerateJet

__all__ = [
    "MultiJet",
    "jet_const",
    "lift_variable",
    "jet_arith",
    "jet_compose",
    "jsin", "jcos", "jexp", "jlog", "jsinh", "jcosh", "jtanh", "jsech",
    "jsqrt", "jrecip", "jatan", "jpow",
    "jet_smooth_value",
]

_TINY = 1e-300


def packed_size(order: int) -> int:
    return (order + 1) * (order + 2) // 2


def packed_index(i: int, j: int) -> int:
    d = i + j
    return d * (d + 1) // 2 + j


@lru_cache(maxsize=None)
def _degree_pairs(order: int) -> tuple[tuple[int, int], ...]:
    out = []
    for d in range(order + 1):
        for j in range(d + 1):
            out.append((d - j, j))
    return tuple(out)


@lru_cache(maxsize=None)
def _mul_table(order: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Index triples (ia, ib, ic) with pair(ia) + pair(ib) = pair(ic)."""
    pairs = _degree_pairs(order)
    ia, ib, ic = [], [], []
    for a, (i1, j1) in enumerate(pairs):
        for b, (i2, j2) in enumerate(pairs):
            if i1 + i2 + j1 + j2 <= order:
                ia.append(a)
                ib.append(b)
                ic.append(packed_index(i1 + i2, j1 + j2))
    return (np.asarray(ia, dtype=np.intp),
            np.asarray(ib, dtype=np.intp),
            np.asarray(ic, dtype=np.intp))


@lru_cache(maxsize=None)
def _du_table(order: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(src, dst, factor) implementing d/du: c'_{ij} = (i+1) c_{i+1,j}."""
    src, dst, fac = [], [], []
    for (i, j) in _degree_pairs(max(order - 1, 0)):
        src.append(packed_index(i + 1, j))
        dst.append(packed_index(i, j))
        fac.append(float(i + 1))
    return (np.asarray(src, dtype=np.intp), np.asarray(dst, dtype=np.intp),
            np.asarray(fac))


@lru_cache(maxsize=None)
def _dv_table(order: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    src, dst, fac = [], [], []
    for (i, j) in _degree_pairs(max(order - 1, 0)):
        src.append(packed_index(i, j + 1))
        dst.append(packed_index(i, j))
        fac.append(float(j + 1))
    return (np.asarray(src, dtype=np.intp), np.asarray(dst, dtype=np.intp),
            np.asarray(fac))


class MultiJet:
    """Immutable truncated Taylor expansion in two chart variables."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: np.ndarray):
        self.order = order
        self.coeffs = coeffs

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(value: float, order: int) -> "MultiJet":
        c = np.zeros(packed_size(order))
        c[0] = value
        return MultiJet(order, c)

    @staticmethod
    def variable(value: float, which: str, order: int) -> "MultiJet":
        if order < 0:
            raise ValueError("order must be >= 0")
        c = np.zeros(packed_size(order))
        c[0] = value
        if order >= 1:
            if which == "u":
                c[packed_index(1, 0)] = 1.0
            elif which == "v":
                c[packed_index(0, 1)] = 1.0
            else:
                raise ValueError("which must be 'u' or 'v'")
        return MultiJet(order, c)

    # -- accessors ---------------------------------------------------------

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def coeff(self, i: int, j: int) -> float:
        if i < 0 or j < 0 or i + j > self.order:
            return 0.0
        return float(self.coeffs[packed_index(i, j)])

    def partial(self, i: int, j: int) -> float:
        """Raw partial derivative d^{i+j} f / du^i dv^j at the base point."""
        return self.coeff(i, j) * math.factorial(i) * math.factorial(j)

    def truncated(self, order: int) -> "MultiJet":
        if order == self.order:
            return self
        if order > self.order:
            raise ValueError("cannot extend a jet to higher order")
        return MultiJet(order, self.coeffs[:packed_size(order)].copy())

    def du(self) -> "MultiJet":
        """Jet of the u-partial (order drops by one)."""
        if self.order == 0:
            return MultiJet.constant(0.0, 0)
        src, dst, fac = _du_table(self.order)
        c = np.zeros(packed_size(self.order - 1))
        c[dst] = fac * self.coeffs[src]
        return MultiJet(self.order - 1, c)

    def dv(self) -> "MultiJet":
        if self.order == 0:
            return MultiJet.constant(0.0, 0)
        src, dst, fac = _dv_table(self.order)
        c = np.zeros(packed_size(self.order - 1))
        c[dst] = fac * self.coeffs[src]
        return MultiJet(self.order - 1, c)

    # -- arithmetic --------------------------------------------------------

    def _pair(self, other) -> tuple["MultiJet", "MultiJet"]:
        if isinstance(other, MultiJet):
            if other.order == self.order:
                return self, other
            k = min(self.order, other.order)
            return self.truncated(k), other.truncated(k)
        return self, MultiJet.constant(float(other), self.order)

    def __add__(self, other):
        a, b = self._pair(other)
        return MultiJet(a.order, a.coeffs + b.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._pair(other)
        return MultiJet(a.order, a.coeffs - b.coeffs)

    def __rsub__(self, other):
        a, b = self._pair(other)
        return MultiJet(a.order, b.coeffs - a.coeffs)

    def __neg__(self):
        return MultiJet(self.order, -self.coeffs)

    def __mul__(self, other):
        if not isinstance(other, MultiJet):
            return MultiJet(self.order, self.coeffs * float(other))
        a, b = self._pair(other)
        ia, ib, ic = _mul_table(a.order)
        c = np.bincount(ic, weights=a.coeffs[ia] * b.coeffs[ib],
                        minlength=packed_size(a.order))
        return MultiJet(a.order, c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, MultiJet):
            d = float(other)
            if abs(d) < _TINY:
                raise DegenerateJet("division by zero scalar")
            return MultiJet(self.order, self.coeffs / d)
        a, b = self._pair(other)
        return a * jrecip(b)

    def __rtruediv__(self, other):
        return MultiJet.constant(float(other), self.order) / self

    def __pow__(self, n):
        return jpow(self, n)

    def __repr__(self):
        return f"MultiJet(order={self.order}, value={self.value!r})"


def jet_const(value: float, order: int) -> MultiJet:
    return MultiJet.constant(value, order)


def lift_variable(value: float, which: str, order: int) -> MultiJet:
    """Seed jet for a chart variable: value, unit first-order coefficient."""
    return MultiJet.variable(value, which, order)


def jet_arith(a: MultiJet, b: MultiJet, op: str) -> MultiJet:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


# -- univariate series for elementary functions ---------------------------

def _series_sin(a0: float, k: int) -> np.ndarray:
    g = np.empty(k + 1)
    for n in range(k + 1):
        g[n] = math.sin(a0 + n * math.pi / 2.0) / math.factorial(n)
    return g


def _series_cos(a0: float, k: int) -> np.ndarray:
    g = np.empty(k + 1)
    for n in range(k + 1):
        g[n] = math.cos(a0 + n * math.pi / 2.0) / math.factorial(n)
    return g


def _series_exp(a0: float, k: int) -> np.ndarray:
    e = math.exp(a0)
    return np.array([e / math.factorial(n) for n in range(k + 1)])


def _series_log(a0: float, k: int) -> np.ndarray:
    if a0 <= 0.0:
        raise DegenerateJet(f"log of non-positive jet value {a0}")
    g = np.empty(k + 1)
    g[0] = math.log(a0)
    for n in range(1, k + 1):
        g[n] = (-1.0) ** (n - 1) / (n * a0 ** n)
    return g


def _series_sinh(a0: float, k: int) -> np.ndarray:
    s, c = math.sinh(a0), math.cosh(a0)
    return np.array([(s if n % 2 == 0 else c) / math.factorial(n)
                     for n in range(k + 1)])


def _series_cosh(a0: float, k: int) -> np.ndarray:
    s, c = math.sinh(a0), math.cosh(a0)
    return np.array([(c if n % 2 == 0 else s) / math.factorial(n)
                     for n in range(k + 1)])


def _series_tanh(a0: float, k: int) -> np.ndarray:
    # y' = 1 - y^2 as a series recurrence
    t = np.zeros(k + 2)
    t[0] = math.tanh(a0)
    for n in range(k):
        conv = float(np.dot(t[: n + 1], t[n::-1]))
        t[n + 1] = ((1.0 if n == 0 else 0.0) - conv) / (n + 1)
    return t[: k + 1]


def _series_sech(a0: float, k: int) -> np.ndarray:
    # s' = -s t,  t' = 1 - t^2, advanced jointly
    s = np.zeros(k + 1)
    t = np.zeros(k + 1)
    s[0] = 1.0 / math.cosh(a0)
    t[0] = math.tanh(a0)
    for n in range(k):
        conv_st = float(np.dot(s[: n + 1], t[n::-1]))
        conv_tt = float(np.dot(t[: n + 1], t[n::-1]))
        s[n + 1] = -conv_st / (n + 1)
        t[n + 1] = ((1.0 if n == 0 else 0.0) - conv_tt) / (n + 1)
    return s


def _series_sqrt(a0: float, k: int) -> np.ndarray:
    if a0 <= 0.0:
        raise DegenerateJet(f"sqrt of non-positive jet value {a0}")
    g = np.empty(k + 1)
    g[0] = math.sqrt(a0)
    # binomial series: g_n = C(1/2, n) a0^{1/2 - n}
    coef = 1.0
    for n in range(1, k + 1):
        coef *= (0.5 - (n - 1)) / n
        g[n] = coef * a0 ** (0.5 - n)
    return g


def _series_recip(a0: float, k: int) -> np.ndarray:
    if abs(a0) < _TINY:
        raise DegenerateJet("reciprocal of zero-valued jet")
    return np.array([(-1.0) ** n / a0 ** (n + 1) for n in range(k + 1)])


def _series_atan(a0: float, k: int) -> np.ndarray:
    # y' = 1 / (1 + (a0 + t)^2); reciprocal of the quadratic w(t)
    w0 = 1.0 + a0 * a0
    w1, w2 = 2.0 * a0, 1.0
    r = np.zeros(k + 1)
    r[0] = 1.0 / w0
    for n in range(1, k + 1):
        acc = w1 * r[n - 1]
        if n >= 2:
            acc += w2 * r[n - 2]
        r[n] = -acc / w0
    y = np.zeros(k + 1)
    y[0] = math.atan(a0)
    for n in range(k):
        y[n + 1] = r[n] / (n + 1)
    return y


_SERIES: dict[str, Callable[[float, int], np.ndarray]] = {
    "sin": _series_sin,
    "cos": _series_cos,
    "exp": _series_exp,
    "log": _series_log,
    "sinh": _series_sinh,
    "cosh": _series_cosh,
    "tanh": _series_tanh,
    "sech": _series_sech,
    "sqrt": _series_sqrt,
    "recip": _series_recip,
    "atan": _series_atan,
}


def jet_compose(tag: str, a: MultiJet) -> MultiJet:
    """g(a) for an elementary-function tag, by univariate substitution.

    ``pow(n)`` is spelled ``jet_compose("pow", a, n)`` via :func:`jpow`.
    """
    gen = _SERIES.get(tag)
    if gen is None:
        raise ValueError(f"unknown elementary function tag {tag!r}")
    k = a.order
    g = gen(a.value, k)
    x = MultiJet(k, a.coeffs.copy())
    x.coeffs[0] = 0.0
    res = MultiJet.constant(float(g[k]), k)
    for n in range(k - 1, -1, -1):
        res = res * x + float(g[n])
    return res


def _dispatch(tag: str, fallback: Callable[[float], float]):
    def fn(x):
        if isinstance(x, MultiJet):
            return jet_compose(tag, x)
        return fallback(x)
    fn.__name__ = "j" + tag
    return fn


jsin = _dispatch("sin", math.sin)
jcos = _dispatch("cos", math.cos)
jexp = _dispatch("exp", math.exp)
jlog = _dispatch("log", math.log)
jsinh = _dispatch("sinh", math.sinh)
jcosh = _dispatch("cosh", math.cosh)
jtanh = _dispatch("tanh", math.tanh)
jsqrt = _dispatch("sqrt", math.sqrt)
jrecip = _dispatch("recip", lambda x: 1.0 / x)
jatan = _dispatch("atan", math.atan)


def jsech(x):
    if isinstance(x, MultiJet):
        return jet_compose("sech", x)
    return 1.0 / math.cosh(x)


def jpow(a, n):
    """a**n; integer exponents by repeated multiplication (exact for
    polynomials), real exponents through exp/log."""
    if not isinstance(a, MultiJet):
        return a ** n
    if isinstance(n, int) or (isinstance(n, float) and n.is_integer()):
        n = int(n)
        if n < 0:
            return jrecip(jpow(a, -n))
        res = MultiJet.constant(1.0, a.order)
        base = a
        while n:
            if n & 1:
                res = res * base
            base = base * base
            n >>= 1
        return res
    return jexp(jlog(a) * float(n))


def jet_smooth_value(x) -> float:
    """Value of a jet or passthrough for plain floats."""
    return x.value if isinstance(x, MultiJet) else float(x)


# -- small jet/scalar linear algebra (ambient R^3 and chart R^2) ----------

Vec3 = Sequence  # three jets or floats


def v_add(a, b):
    return [a[0] + b[0], a[1] + b[1], a[2] + b[2]]


def v_sub(a, b):
    return [a[0] - b[0], a[1] - b[1], a[2] - b[2]]


def v_scale(a, s):
    return [a[0] * s, a[1] * s, a[2] * s]


def v_dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def v_cross(a, b):
    return [a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]]


def det3(a, b, c):
    return v_dot(a, v_cross(b, c))


def v_values(a) -> np.ndarray:
    return np.array([jet_smooth_value(x) for x in a])


def solve3(cols: Sequence, rhs) -> list:
    """Solve [c0 c1 c2] x = rhs by Cramer's rule (entries may be jets)."""
    d = det3(cols[0], cols[1], cols[2])
    dv = jet_smooth_value(d)
    if abs(dv) < 1e-14:
        raise DegenerateJet("singular 3x3 jet system")
    inv = jrecip(d) if isinstance(d, MultiJet) else 1.0 / d
    x0 = det3(rhs, cols[1], cols[2])
    x1 = det3(cols[0], rhs, cols[2])
    x2 = det3(cols[0], cols[1], rhs)
    return [x0 * inv, x1 * inv, x2 * inv]


def solve2(a11, a12, a21, a22, b1, b2) -> tuple:
    """Solve a 2x2 system with jet or float entries."""
    d = a11 * a22 - a12 * a21
    dv = jet_smooth_value(d)
    if abs(dv) < 1e-14:
        raise DegenerateJet("singular 2x2 jet system")
    inv = jrecip(d) if isinstance(d, MultiJet) else 1.0 / d
    return ((b1 * a22 - b2 * a12) * inv, (a11 * b2 - a21 * b1) * inv)
