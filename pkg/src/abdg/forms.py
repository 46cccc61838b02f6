"""Moving frames and exterior calculus on a chart.

A pointwise 1-form is stored as its (du, dv) coefficients; when those
coefficients are jets the exterior derivative is exact (read off the jet
partials), otherwise a Richardson-extrapolated central difference over the
coefficient fields is used.

A frame (base; v1, v2, v3) pulls the ambient Maurer-Cartan form back to the
chart through two 3x3 solves per chart direction:

    d(base) = theta^i v_i,      d v_j = omega^i_j v_i

and the structure equations  d theta^s + omega^s_k ^ theta^k = 0,
d omega^i_j + omega^i_k ^ omega^k_j = 0  become residual scalars (the
du^dv coefficient, scaled by the largest wedge term).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BoundaryStencil, DegenerateExpansionBasis, SingularFrame
from .geometry import Rect
from .jets import MultiJet, jet_smooth_value, solve3, v_values

__all__ = [
    "FormValue", "ChartOneForm", "FrameFormMatrix",
    "maurer_cartan", "exterior_derivative", "structural_residuals",
    "structural_residuals_fd", "wedge_coeff",
]


@dataclass
class FormValue:
    """1-form at a point: a du + b dv, entries jets or floats."""

    a: object
    b: object

    def __call__(self, x: float, y: float):
        return self.a * x + self.b * y

    @property
    def a_val(self) -> float:
        return jet_smooth_value(self.a)

    @property
    def b_val(self) -> float:
        return jet_smooth_value(self.b)

    def d_coeff(self) -> float:
        """du^dv coefficient of the exterior derivative (jet path)."""
        if not isinstance(self.a, MultiJet) or not isinstance(self.b, MultiJet):
            raise ValueError("jet coefficients required for the exact path")
        if self.a.order < 1 or self.b.order < 1:
            raise ValueError("order-1 jets required for the exact path")
        return self.b.partial(1, 0) - self.a.partial(0, 1)


def wedge_coeff(w1: FormValue, w2: FormValue) -> float:
    """(w1 ^ w2)(du, dv)."""
    return jet_smooth_value(w1.a * w2.b - w1.b * w2.a)


@dataclass
class ChartOneForm:
    """1-form field on the chart; coefficients are (u, v, order) -> jet."""

    a: Callable[[float, float, int], object]
    b: Callable[[float, float, int], object]
    domain: Rect | None = None

    def at(self, p: tuple[float, float], order: int = 1) -> FormValue:
        return FormValue(self.a(p[0], p[1], order), self.b(p[0], p[1], order))

    def value_on(self, p: tuple[float, float], X: tuple[float, float]) -> float:
        w = self.at(p, 0)
        return w.a_val * X[0] + w.b_val * X[1]


def exterior_derivative(w: ChartOneForm, p: tuple[float, float],
                        step: float | None = None) -> float:
    """du^dv coefficient of dw at p.

    Jet path when the coefficient fields deliver order-1 jets; otherwise
    central differences with one Richardson sweep on the values.
    """
    if step is None:
        try:
            return w.at(p, 1).d_coeff()
        except Exception:
            step = 1e-4 * (w.domain.span if w.domain is not None else 1.0)
    u, v = p
    if w.domain is not None and not w.domain.contains(u, v, margin=step):
        raise BoundaryStencil(f"stencil of width {step} leaves domain at {p}")

    def aval(uu, vv):
        return jet_smooth_value(w.a(uu, vv, 0))

    def bval(uu, vv):
        return jet_smooth_value(w.b(uu, vv, 0))

    def central(h):
        dbu = (bval(u + h, v) - bval(u - h, v)) / (2 * h)
        dav = (aval(u, v + h) - aval(u, v - h)) / (2 * h)
        return dbu - dav

    d1 = central(step)
    d2 = central(step / 2.0)
    return (4.0 * d2 - d1) / 3.0


@dataclass
class FrameFormMatrix:
    """Pulled-back frame forms at a point.

    theta[i] and omega[i][j] are FormValue with jet coefficients; `frame`
    holds the evaluated columns (base, v1, v2, v3) as value arrays.
    """

    point: tuple[float, float]
    theta: list
    omega: list
    frame: tuple

    def omega_val(self, i: int, j: int) -> tuple[float, float]:
        w = self.omega[i][j]
        return (w.a_val, w.b_val)


def maurer_cartan(frame_builder: Callable[[float, float, int], tuple],
                  p: tuple[float, float], order: int = 3) -> FrameFormMatrix:
    """Solve d(base) and d v_j against the frame columns, jet-level.

    frame_builder(u, v, k) must return (base, v1, v2, v3) as jet triples of
    order k.  The returned coefficients are jets of order `order - 1`.
    """
    u, v = p
    base, v1, v2, v3 = frame_builder(u, v, order)
    cols = (v1, v2, v3)
    B = np.column_stack([v_values(c) for c in cols])
    if np.linalg.cond(B) > 1e12:
        raise SingularFrame(f"frame condition number above 1e12 at {p}")

    def solve_dir(vec, du: bool):
        rhs = [c.du() if du else c.dv() for c in vec]
        return solve3(cols, rhs)

    theta_u = solve_dir(base, True)
    theta_v = solve_dir(base, False)
    theta = [FormValue(theta_u[i], theta_v[i]) for i in range(3)]
    omega = [[None] * 3 for _ in range(3)]
    for j, vj in enumerate(cols):
        wu = solve_dir(vj, True)
        wv = solve_dir(vj, False)
        for i in range(3):
            omega[i][j] = FormValue(wu[i], wv[i])
    frame = (v_values(base), v_values(v1), v_values(v2), v_values(v3))
    return FrameFormMatrix((u, v), theta, omega, frame)


def _residual_pack(dval: float, terms: list[float]) -> tuple[float, float]:
    resid = dval + sum(terms)
    scale = max([abs(dval)] + [abs(t) for t in terms] + [1.0])
    return resid, scale


def structural_residuals(M: FrameFormMatrix) -> dict[str, float]:
    """12 scaled residuals of the structure equations at M's base point."""
    out: dict[str, float] = {}
    for s in range(3):
        dval = M.theta[s].d_coeff()
        terms = [wedge_coeff(M.omega[s][k], M.theta[k]) for k in range(3)]
        resid, scale = _residual_pack(dval, terms)
        out[f"theta{s + 1}"] = resid / scale
    for i in range(3):
        for j in range(3):
            dval = M.omega[i][j].d_coeff()
            terms = [wedge_coeff(M.omega[i][k], M.omega[k][j])
                     for k in range(3)]
            resid, scale = _residual_pack(dval, terms)
            out[f"omega{i + 1}{j + 1}"] = resid / scale
    return out


def structural_residuals_fd(M_field: Callable[[tuple[float, float]],
                                              FrameFormMatrix],
                            p: tuple[float, float], step: float,
                            domain: Rect | None = None) -> dict[str, float]:
    """Structure-equation residuals with finite-difference exterior
    derivatives (Richardson-extrapolated); wedge terms at p exactly.

    This is the opaque-field path; its residuals shrink with the step and
    are what the grid-convergence checks exercise.
    """
    u, v = p
    if domain is not None and not domain.contains(u, v, margin=step):
        raise BoundaryStencil(f"stencil of width {step} leaves domain at {p}")
    M0 = M_field(p)

    def coeffs(q):
        M = M_field(q)
        th = np.array([[w.a_val, w.b_val] for w in M.theta])
        om = np.array([[[M.omega[i][j].a_val, M.omega[i][j].b_val]
                        for j in range(3)] for i in range(3)])
        return th, om

    def d_all(h):
        th_pu, om_pu = coeffs((u + h, v))
        th_mu, om_mu = coeffs((u - h, v))
        th_pv, om_pv = coeffs((u, v + h))
        th_mv, om_mv = coeffs((u, v - h))
        dth = (th_pu[:, 1] - th_mu[:, 1]) / (2 * h) - \
              (th_pv[:, 0] - th_mv[:, 0]) / (2 * h)
        dom = (om_pu[:, :, 1] - om_mu[:, :, 1]) / (2 * h) - \
              (om_pv[:, :, 0] - om_mv[:, :, 0]) / (2 * h)
        return dth, dom

    dth1, dom1 = d_all(step)
    dth2, dom2 = d_all(step / 2.0)
    dth = (4.0 * dth2 - dth1) / 3.0
    dom = (4.0 * dom2 - dom1) / 3.0

    out: dict[str, float] = {}
    for s in range(3):
        terms = [wedge_coeff(M0.omega[s][k], M0.theta[k]) for k in range(3)]
        resid, scale = _residual_pack(float(dth[s]), terms)
        out[f"theta{s + 1}"] = resid / scale
    for i in range(3):
        for j in range(3):
            terms = [wedge_coeff(M0.omega[i][k], M0.omega[k][j])
                     for k in range(3)]
            resid, scale = _residual_pack(float(dom[i, j]), terms)
            out[f"omega{i + 1}{j + 1}"] = resid / scale
    return out


def expand_in_basis(w: FormValue, e1: FormValue, e2: FormValue):
    """Coefficients (x, y) with w = x e1 + y e2; refuses a degenerate basis."""
    det = e1.a * e2.b - e1.b * e2.a
    detv = jet_smooth_value(det)
    scale = max(abs(e1.a_val), abs(e1.b_val), abs(e2.a_val), abs(e2.b_val),
                1e-30) ** 2
    if abs(detv) < 1e-10 * scale:
        raise DegenerateExpansionBasis(
            f"expansion basis wedge {detv:.3e} below tolerance")
    inv = 1.0 / det if not isinstance(det, MultiJet) else None
    from .jets import jrecip
    invd = jrecip(det) if isinstance(det, MultiJet) else inv
    x = (w.a * e2.b - w.b * e2.a) * invd
    y = (e1.a * w.b - e1.b * w.a) * invd
    return x, y


def proportionality(w: FormValue, e: FormValue):
    """Least-squares scalar c with w ~= c e (jet-valued when the inputs
    are jets), plus the relative residual and the scaled wedge |w ^ e|."""
    ea, eb = e.a_val, e.b_val
    wa, wb = w.a_val, w.b_val
    denom_val = ea * ea + eb * eb
    if denom_val < 1e-60:
        raise DegenerateExpansionBasis("proportionality against zero form")
    from .jets import jrecip
    denom = e.a * e.a + e.b * e.b
    inv = jrecip(denom) if isinstance(denom, MultiJet) else 1.0 / denom
    c = (w.a * e.a + w.b * e.b) * inv
    c_val = jet_smooth_value(c)
    num = np.hypot(wa - c_val * ea, wb - c_val * eb)
    scale = max(np.hypot(wa, wb), np.hypot(ea, eb) * abs(c_val), 1e-30)
    wedge = abs(wa * eb - wb * ea) / max(denom_val, np.hypot(wa, wb) ** 2,
                                         1e-30)
    return c, num / scale, wedge
