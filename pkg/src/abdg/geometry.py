"""Single-surface affine differential geometry.

Everything here is chart-local: a surface is an evaluator producing jets of
its three ambient coordinates at a chart point, and all invariants (induced
connection, affine fundamental form, shape operator, transversal connection
form, induced volume, conormal) come out of two 3x3 linear solves performed
in jet arithmetic, so their chart derivatives are available exactly.

Conventions.  The ambient decomposition along the immersion is

    D_X f_* Y = f_*(nabla_X Y) + h(X, Y) xi
    D_X xi    = -f_*(S X) + tau(X) xi

with theta(X, Y) = det(f_*X, f_*Y, xi) the induced volume and
H = det_theta h = det[h_ij] / theta(du, dv)^2 its normalized determinant.
The conormal nu is the covector with nu(f_* .) = 0, nu(xi) = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (ConstructionFailed, DegenerateJet, DegenerateSurface,
                     NotImmersive, NotTransversal, ZeroScale)
from .jets import (MultiJet, det3, jet_const, jet_smooth_value, jpow, jrecip,
                   lift_variable, solve2, solve3, v_add, v_cross, v_dot,
                   v_scale, v_sub, v_values)

DEFAULT_ORDER = 5

TOL_IMMERSION = 1e-12
TOL_TRANSVERSAL = 1e-10
TOL_DEGENERATE = 1e-10
TOL_RECONSTRUCT = 1e-9
TOL_BLASCHKE = 1e-8


@dataclass(frozen=True)
class Rect:
    """Chart rectangle [u0, u1] x [v0, v1]."""

    u0: float
    u1: float
    v0: float
    v1: float

    def contains(self, u: float, v: float, margin: float = 0.0) -> bool:
        return (self.u0 + margin <= u <= self.u1 - margin
                and self.v0 + margin <= v <= self.v1 - margin)

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.u0 + self.u1), 0.5 * (self.v0 + self.v1))

    @property
    def span(self) -> float:
        return max(self.u1 - self.u0, self.v1 - self.v0)

    def grid(self, nu: int, nv: int) -> list[tuple[float, float]]:
        """Cell-center grid; keeps every point off the boundary."""
        du = (self.u1 - self.u0) / nu
        dv = (self.v1 - self.v0) / nv
        return [(self.u0 + (i + 0.5) * du, self.v0 + (j + 0.5) * dv)
                for i in range(nu) for j in range(nv)]


Evaluator = Callable[[float, float, int], list]

_MEMO_CAP = 40000


class _JetField:
    """Shared memoized evaluator wrapper for surfaces and transversals."""

    def __init__(self, evaluator: Evaluator, label: str):
        self.evaluator = evaluator
        self.label = label
        self._memo: dict[tuple[float, float, int], list] = {}

    def evaluate(self, u: float, v: float, order: int) -> list:
        key = (u, v, order)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        jets = self.evaluator(u, v, order)
        if len(self._memo) >= _MEMO_CAP:
            self._memo.clear()
        self._memo[key] = jets
        return jets

    def values(self, u: float, v: float) -> np.ndarray:
        return v_values(self.evaluate(u, v, 0))


class SurfaceMap(_JetField):
    """Chart rectangle -> affine 3-space, evaluated as jet triples."""

    def __init__(self, domain: Rect, evaluator: Evaluator, label: str = ""):
        super().__init__(evaluator, label)
        self.domain = domain

    def frame(self, u: float, v: float, order: int):
        """(f, f_u, f_v) jets; derivatives drop the order by one."""
        F = self.evaluate(u, v, order)
        fu = [c.du() for c in F]
        fv = [c.dv() for c in F]
        return F, fu, fv

    def check_immersion(self, u: float, v: float) -> float:
        _, fu, fv = self.frame(u, v, 1)
        cu = np.linalg.norm(v_values(fu))
        cv = np.linalg.norm(v_values(fv))
        cr = np.linalg.norm(v_values(v_cross(fu, fv)))
        if cr <= TOL_IMMERSION * max(cu * cv, 1e-30):
            raise NotImmersive(
                f"{self.label or 'surface'}: rank f_* < 2 at ({u}, {v})")
        return cr


class TransversalField(_JetField):
    """Nowhere-tangent ambient field along an immersion."""

    def __init__(self, evaluator: Evaluator, provenance: str = "explicit",
                 label: str = ""):
        super().__init__(evaluator, label)
        self.provenance = provenance


def euclidean_unit_normal(f: SurfaceMap) -> TransversalField:
    """Unit normal f_u x f_v / |f_u x f_v| as a jet-evaluable field."""

    def ev(u: float, v: float, order: int):
        _, fu, fv = f.frame(u, v, order + 1)
        cr = v_cross(fu, fv)
        n2 = v_dot(cr, cr)
        if jet_smooth_value(n2) <= 0.0:
            raise NotImmersive(f"unit normal undefined at ({u}, {v})")
        inv = jpow(n2, -0.5)
        return v_scale(cr, inv)

    return TransversalField(ev, provenance="euclidean-unit-normal",
                            label=f"n[{f.label}]")


def constant_field(vec: Sequence[float]) -> TransversalField:
    w = [float(x) for x in vec]

    def ev(u: float, v: float, order: int):
        return [jet_const(w[0], order), jet_const(w[1], order),
                jet_const(w[2], order)]

    return TransversalField(ev, provenance="explicit", label="const")


@dataclass
class GaussWeingartenData:
    """Per-point invariants of (f, xi); entries are jets.

    Index conventions (chart basis du=0, dv=1): ``h[i][j]``,
    ``Gamma[k][i][j]`` for nabla_{d_i} d_j = Gamma^k_{ij} d_k,
    ``S[k][i]`` for S d_i = S^k_i d_k, ``tau[i]``, ``nu[ambient]``.
    """

    point: tuple[float, float]
    h: list
    Gamma: list
    S: list
    tau: list
    theta12: MultiJet
    H: MultiJet
    nu: list
    eps: int

    @property
    def h_mat(self) -> np.ndarray:
        return np.array([[jet_smooth_value(self.h[i][j]) for j in (0, 1)]
                         for i in (0, 1)])

    @property
    def S_mat(self) -> np.ndarray:
        return np.array([[jet_smooth_value(self.S[k][i]) for i in (0, 1)]
                         for k in (0, 1)])

    @property
    def Gamma_arr(self) -> np.ndarray:
        return np.array([[[jet_smooth_value(self.Gamma[k][i][j])
                           for j in (0, 1)] for i in (0, 1)] for k in (0, 1)])

    @property
    def tau_vec(self) -> np.ndarray:
        return np.array([jet_smooth_value(t) for t in self.tau])

    @property
    def nu_vec(self) -> np.ndarray:
        return np.array([jet_smooth_value(c) for c in self.nu])

    @property
    def H_val(self) -> float:
        return jet_smooth_value(self.H)

    @property
    def theta12_val(self) -> float:
        return jet_smooth_value(self.theta12)

    @property
    def trS(self) -> float:
        return jet_smooth_value(self.S[0][0]) + jet_smooth_value(self.S[1][1])


def _conormal_jets(fu, fv, xi):
    # rows of [fu; fv; xi] become columns of the transposed system
    cols = [[fu[k], fv[k], xi[k]] for k in range(3)]
    return solve3(cols, [0.0, 0.0, 1.0])


def gauss_weingarten_jets(f: SurfaceMap, xi: TransversalField,
                          p: tuple[float, float],
                          order: int = DEFAULT_ORDER) -> GaussWeingartenData:
    """Jet-level Gauss/Weingarten decomposition.

    f is evaluated at `order`; xi at `order - 1` so that both sides of the
    two solves carry matching derivative depth.  Output tensors are jets of
    order `order - 2`.
    """
    u, v = p
    F, fu, fv = f.frame(u, v, order)
    X = xi.evaluate(u, v, order - 1)

    fuv = v_values(v_cross(fu, fv))
    cr = np.linalg.norm(fuv)
    su = np.linalg.norm(v_values(fu))
    sv = np.linalg.norm(v_values(fv))
    if cr <= TOL_IMMERSION * max(su * sv, 1e-30):
        raise NotImmersive(f"{f.label or 'surface'}: rank f_* < 2 at {p}")
    theta12 = det3(fu, fv, X)
    sx = np.linalg.norm(v_values(X))
    if abs(jet_smooth_value(theta12)) <= TOL_TRANSVERSAL * max(cr * sx, 1e-30):
        raise NotTransversal(
            f"{xi.label or 'field'} tangent to {f.label or 'surface'} at {p}")

    E = (fu, fv, X)
    sec = {
        (0, 0): [c.du().du() for c in F],
        (0, 1): [c.du().dv() for c in F],
        (1, 1): [c.dv().dv() for c in F],
    }
    Gamma = [[[None, None], [None, None]] for _ in range(2)]
    h = [[None, None], [None, None]]
    for (i, j), rhs in sec.items():
        g1, g2, hij = solve3(E, rhs)
        for (a, b) in ((i, j), (j, i)):
            Gamma[0][a][b] = g1
            Gamma[1][a][b] = g2
            h[a][b] = hij

    S = [[None, None], [None, None]]
    tau = [None, None]
    for i, Xi in enumerate(([c.du() for c in X], [c.dv() for c in X])):
        a, b, c = solve3(E, Xi)
        S[0][i] = -a
        S[1][i] = -b
        tau[i] = c

    H = (h[0][0] * h[1][1] - h[0][1] * h[0][1]) * jrecip(theta12 * theta12)
    nu = _conormal_jets(fu, fv, X)
    eps = int(np.sign(jet_smooth_value(H))) if jet_smooth_value(H) != 0 else 0
    return GaussWeingartenData(p, h, Gamma, S, tau, theta12, H, nu, eps)


def _reconstruction_residual(f: SurfaceMap, xi: TransversalField,
                             gw: GaussWeingartenData,
                             order: int) -> float:
    u, v = gw.point
    F, fu, fv = f.frame(u, v, order)
    X = xi.evaluate(u, v, order - 1)
    fuv_ = {
        (0, 0): [c.du().du() for c in F],
        (0, 1): [c.du().dv() for c in F],
        (1, 1): [c.dv().dv() for c in F],
    }
    scale = max(np.linalg.norm(v_values(fu)), np.linalg.norm(v_values(fv)),
                np.linalg.norm(v_values(X)), 1e-30) ** 1
    worst = 0.0
    for (i, j), rhs in fuv_.items():
        model = v_add(v_add(v_scale(fu, gw.Gamma[0][i][j]),
                            v_scale(fv, gw.Gamma[1][i][j])),
                      v_scale(X, gw.h[i][j]))
        r = np.linalg.norm(v_values(v_sub(rhs, model)))
        worst = max(worst, r / max(scale, np.linalg.norm(v_values(rhs)), 1e-30))
    for i, Xi in enumerate(([c.du() for c in X], [c.dv() for c in X])):
        model = v_add(v_scale(fu, -gw.S[0][i]),
                      v_add(v_scale(fv, -gw.S[1][i]), v_scale(X, gw.tau[i])))
        r = np.linalg.norm(v_values(v_sub(Xi, model)))
        worst = max(worst, r / max(scale, np.linalg.norm(v_values(Xi)), 1e-30))
    return worst


def gauss_weingarten(f: SurfaceMap, xi: TransversalField,
                     p: tuple[float, float],
                     order: int = DEFAULT_ORDER) -> GaussWeingartenData:
    """Decomposition with the reconstruction contract enforced."""
    gw = gauss_weingarten_jets(f, xi, p, order)
    resid = _reconstruction_residual(f, xi, gw, min(order, 3))
    if resid > TOL_RECONSTRUCT:
        raise ConstructionFailed(
            f"Gauss/Weingarten reconstruction residual {resid:.3e} at {p}")
    return gw


def conormal(f: SurfaceMap, xi: TransversalField, p: tuple[float, float],
             order: int = 2) -> np.ndarray:
    """Covector nu with nu(f_u) = nu(f_v) = 0, nu(xi) = 1 (values)."""
    u, v = p
    _, fu, fv = f.frame(u, v, order)
    X = xi.evaluate(u, v, order - 1)
    theta12 = jet_smooth_value(det3(fu, fv, X))
    cr = np.linalg.norm(v_values(v_cross(fu, fv)))
    sx = np.linalg.norm(v_values(X))
    if abs(theta12) <= TOL_TRANSVERSAL * max(cr * sx, 1e-30):
        raise NotTransversal(f"conormal solve singular at {p}")
    nu = _conormal_jets(fu, fv, X)
    return np.array([jet_smooth_value(c) for c in nu])


def cross_product_seed(f: SurfaceMap) -> TransversalField:
    """Volume-form cross product f_u x f_v; transversal for any immersion."""

    def ev(u: float, v: float, order: int):
        _, fu, fv = f.frame(u, v, order + 1)
        return v_cross(fu, fv)

    return TransversalField(ev, provenance="cross-product-seed",
                            label=f"seed[{f.label}]")


def blaschke_normal(f: SurfaceMap, p: tuple[float, float],
                    orientation: int = 1, order: int = DEFAULT_ORDER
                    ) -> tuple[TransversalField, GaussWeingartenData]:
    """Affine normal: the transversal field with tau = 0, |det_theta h| = 1.

    Construction: seed with the cross product, rescale by |H0|^{1/4}, then
    kill the transversal connection form with a tangential correction Z
    solved from h0 Z = -(phi tau0 + dphi).  The returned field is
    jet-evaluable (it consumes three extra derivative orders of f).
    """

    def field_jets(u: float, v: float, k: int):
        K = k + 3
        F, fu, fv = f.frame(u, v, K + 1)
        xi0 = v_cross(fu, fv)
        E = (fu, fv, xi0)
        sec = {
            (0, 0): [c.du().du() for c in F],
            (0, 1): [c.du().dv() for c in F],
            (1, 1): [c.dv().dv() for c in F],
        }
        h = {}
        for key, rhs in sec.items():
            _, _, hij = solve3(E, rhs)
            h[key] = hij
        theta12 = det3(fu, fv, xi0)
        deth = h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(0, 1)]
        scale = max(abs(jet_smooth_value(h[(0, 0)])),
                    abs(jet_smooth_value(h[(0, 1)])),
                    abs(jet_smooth_value(h[(1, 1)])), 1e-30)
        if abs(jet_smooth_value(deth)) <= TOL_DEGENERATE * scale * scale:
            raise DegenerateSurface(
                f"{f.label or 'surface'} degenerate at ({u}, {v})")
        H0 = deth * jrecip(theta12 * theta12)
        absH0 = H0 if jet_smooth_value(H0) > 0 else -H0
        phi = jpow(absH0, 0.25)
        tau = [None, None]
        for i, Xi in enumerate(([c.du() for c in xi0], [c.dv() for c in xi0])):
            _, _, c = solve3(E, Xi)
            tau[i] = c
        rhs1 = -(phi * tau[0] + phi.du())
        rhs2 = -(phi * tau[1] + phi.dv())
        z1, z2 = solve2(h[(0, 0)], h[(0, 1)], h[(0, 1)], h[(1, 1)],
                        rhs1, rhs2)
        xi_b = v_add(v_scale(xi0, phi),
                     v_add(v_scale(fu, z1), v_scale(fv, z2)))
        return [c.truncated(min(c.order, k)) for c in xi_b]

    sign = 1.0
    field = TransversalField(
        lambda u, v, k: v_scale(field_jets(u, v, k), sign),
        provenance="blaschke", label=f"blaschke[{f.label}]")
    gw = gauss_weingarten_jets(f, field, p, order)
    if orientation * np.sign(gw.theta12_val) < 0:
        sign = -1.0
        field = TransversalField(
            lambda u, v, k: v_scale(field_jets(u, v, k), sign),
            provenance="blaschke", label=f"blaschke[{f.label}]")
        gw = gauss_weingarten_jets(f, field, p, order)
    tau_resid = float(np.max(np.abs(gw.tau_vec)))
    det_resid = abs(abs(gw.H_val) - 1.0)
    if tau_resid > TOL_BLASCHKE or det_resid > TOL_BLASCHKE:
        raise ConstructionFailed(
            f"affine normal residuals tau={tau_resid:.2e} "
            f"|det_theta h|-1={det_resid:.2e} at {p}")
    return field, gw


def changed_transversal(f: SurfaceMap, xi: TransversalField, lam, Z,
                        label: str = "changed") -> TransversalField:
    """Field lam * xi + f_*(Z); lam scalar (const or (u,v,k)->jet), Z chart
    pair (const or (u,v,k)->(jet, jet)) or None."""

    def ev(u: float, v: float, k: int):
        X = xi.evaluate(u, v, k)
        lam_j = lam(u, v, k) if callable(lam) else lam
        out = v_scale(X, lam_j)
        if Z is not None:
            _, fu, fv = f.frame(u, v, k + 1)
            z1, z2 = Z(u, v, k) if callable(Z) else Z
            out = v_add(out, v_add(v_scale(fu, z1), v_scale(fv, z2)))
        return out

    return TransversalField(ev, provenance="explicit", label=label)


def transversal_change(f: SurfaceMap, xi: TransversalField, lam, Z,
                       p: tuple[float, float],
                       order: int = DEFAULT_ORDER) -> GaussWeingartenData:
    """Data for xi~ = lam xi + f_* Z, recomputed from scratch.

    The closed-form change rules (h/lam, det rule H/lam^4, ...) are treated
    as predictions to test against this recomputation, not as the
    implementation.
    """
    lam0 = jet_smooth_value(lam(p[0], p[1], 0) if callable(lam) else lam)
    if abs(lam0) < 1e-14:
        raise ZeroScale(f"transversal rescaling vanishes at {p}")
    field = changed_transversal(f, xi, lam, Z)
    return gauss_weingarten(f, xi=field, p=p, order=order)
