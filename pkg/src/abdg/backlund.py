"""Pair-level machinery for two surfaces joined by a tangent congruence.

A pair is two immersions f, fhat on a shared chart with transversal fields
xi, xihat.  When the connecting vector d = fhat - f is tangent to both
surfaces, the adapted frames of the congruence are

    v1 = d = f_* X1,   v2 = f_* X2 in span{xi, xihat},   v3 = xi

(and the hatted analogue), normalized so det(v1, v2, v3) = 1.  The scalar
invariants carried by the frame are A = nu(xihat), Ahat = nuhat(xi) and
W = det(d, xi, xihat); the conformality invariant of the congruence is

    psi = ((1 - A Ahat) / W)^4 / (H Hhat),

independent of the transversal gauge.  The condition checker evaluates the
seven hypotheses (tangency/separation, spherical-representation rank,
W != 0, constancy of A and Ahat, the psi = 1 normalization, the volume
balance det(f_*Y, xi, xihat) = det(fhat_*Y, xi, xihat), and dW ^ dH = 0)
and the conclusions (conformal fundamental forms, locally symmetric
induced connections, matching curvature-image dimensions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (AlphaZero, BoundaryStencil, CoincidentPoints,
                     DegenerateExpansionBasis, DegenerateSurface,
                     GammaCritical, InconsistentSignature, NotParallel,
                     NotTangent, SignChoiceFailed, Unclassifiable, ZeroW)
from .forms import (FormValue, FrameFormMatrix, expand_in_basis,
                    maurer_cartan, proportionality, structural_residuals,
                    wedge_coeff)
from .geometry import (DEFAULT_ORDER, GaussWeingartenData, Rect, SurfaceMap,
                       TransversalField, blaschke_normal,
                       gauss_weingarten_jets)
from .jets import (MultiJet, det3, jet_smooth_value, jrecip, solve3, v_add,
                   v_cross, v_dot, v_scale, v_sub, v_values)

TOL_TANGENCY = 1e-8
TOL_W = 1e-10
TOL_ALGEBRAIC = 1e-6
TOL_DIFFERENTIAL = 1e-5
TOL_RANK = 1e-7


@dataclass
class SurfacePair:
    """Two immersions on a shared chart with their transversal fields."""

    f: SurfaceMap
    fhat: SurfaceMap
    xi: TransversalField
    xihat: TransversalField
    label: str = ""
    warnings: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def domain(self) -> Rect:
        return self.f.domain

    def with_fields(self, xi=None, xihat=None, label=None) -> "SurfacePair":
        return SurfacePair(self.f, self.fhat,
                           xi if xi is not None else self.xi,
                           xihat if xihat is not None else self.xihat,
                           label or self.label, list(self.warnings),
                           dict(self.meta))


# ---------------------------------------------------------------------------
# per-point bundle shared by all pair operations


@dataclass
class PairPoint:
    """Everything the pair operations need at one chart point (jets)."""

    p: tuple[float, float]
    order: int
    F: list
    fu: list
    fv: list
    Fh: list
    fhu: list
    fhv: list
    xi: list
    xih: list
    d: list
    W: MultiJet
    A: MultiJet
    Ahat: MultiJet
    nu: list
    nuhat: list
    sep: float
    tangency_f: float
    tangency_fh: float
    scale: float
    _gw: GaussWeingartenData | None = None
    _gwh: GaussWeingartenData | None = None
    _pair: SurfacePair | None = None

    @property
    def A_val(self) -> float:
        return jet_smooth_value(self.A)

    @property
    def Ahat_val(self) -> float:
        return jet_smooth_value(self.Ahat)

    @property
    def W_val(self) -> float:
        return jet_smooth_value(self.W)

    def gw(self) -> GaussWeingartenData:
        if self._gw is None:
            self._gw = gauss_weingarten_jets(self._pair.f, self._pair.xi,
                                             self.p, self.order)
        return self._gw

    def gwh(self) -> GaussWeingartenData:
        if self._gwh is None:
            self._gwh = gauss_weingarten_jets(self._pair.fhat,
                                              self._pair.xihat, self.p,
                                              self.order)
        return self._gwh


def pair_point(pair: SurfacePair, p: tuple[float, float],
               order: int = DEFAULT_ORDER) -> PairPoint:
    u, v = p
    F, fu, fv = pair.f.frame(u, v, order)
    Fh, fhu, fhv = pair.fhat.frame(u, v, order)
    xi = pair.xi.evaluate(u, v, order - 1)
    xih = pair.xihat.evaluate(u, v, order - 1)
    d = v_sub(Fh, F)

    dval = v_values(d)
    scale = max(np.linalg.norm(v_values(fu)), np.linalg.norm(v_values(fv)),
                np.linalg.norm(v_values(fhu)), np.linalg.norm(v_values(fhv)),
                1e-30)
    sep = float(np.linalg.norm(dval))

    cr = v_values(v_cross(fu, fv))
    crh = v_values(v_cross(fhu, fhv))
    tf = abs(float(dval @ cr)) / max(sep * np.linalg.norm(cr), 1e-30)
    tfh = abs(float(dval @ crh)) / max(sep * np.linalg.norm(crh), 1e-30)

    W = det3(d, xi, xih)
    nu = _conormal(fu, fv, xi)
    nuh = _conormal(fhu, fhv, xih)
    A = _pair_dot(nu, xih)
    Ahat = _pair_dot(nuh, xi)
    return PairPoint(p, order, F, fu, fv, Fh, fhu, fhv, xi, xih, d, W, A,
                     Ahat, nu, nuh, sep, tf, tfh, scale, _pair=pair)


def _conormal(fu, fv, xi):
    cols = [[fu[k], fv[k], xi[k]] for k in range(3)]
    return solve3(cols, [0.0, 0.0, 1.0])


def _pair_dot(cov, vec):
    return cov[0] * vec[0] + cov[1] * vec[1] + cov[2] * vec[2]


def _w_scale(pp: PairPoint) -> float:
    return max(pp.sep * np.linalg.norm(v_values(pp.xi))
               * np.linalg.norm(v_values(pp.xih)), 1e-30)


def _require_tangent(pp: PairPoint, tol: float = TOL_TANGENCY):
    if pp.sep <= 1e-9 * pp.scale:
        raise CoincidentPoints(f"f = fhat at {pp.p}")
    worst = max(pp.tangency_f, pp.tangency_fh)
    if worst > tol:
        raise NotTangent(
            f"connecting vector off both tangent planes at {pp.p}: "
            f"residual {worst:.3e}")


def _require_w(pp: PairPoint):
    if abs(pp.W_val) <= TOL_W * _w_scale(pp):
        raise ZeroW(f"det(fhat - f, xi, xihat) ~ 0 at {pp.p}")


# ---------------------------------------------------------------------------
# pair frame


@dataclass
class PairFrame:
    """Adapted congruence frame at a point; chart vectors are jet pairs."""

    point: tuple[float, float]
    X1: tuple
    X2: tuple
    X1hat: tuple
    X2hat: tuple
    A: MultiJet
    Ahat: MultiJet
    W: MultiJet
    v2: list
    v2hat: list
    relation_residual: float

    @property
    def A_val(self) -> float:
        return jet_smooth_value(self.A)

    @property
    def Ahat_val(self) -> float:
        return jet_smooth_value(self.Ahat)

    @property
    def W_val(self) -> float:
        return jet_smooth_value(self.W)

    def X_vals(self, name: str) -> np.ndarray:
        X = getattr(self, name)
        return np.array([jet_smooth_value(X[0]), jet_smooth_value(X[1])])


def solve_pair_frame(pair: SurfacePair, p: tuple[float, float],
                     order: int = DEFAULT_ORDER,
                     pp: PairPoint | None = None) -> PairFrame:
    """Adapted frame: f_*X1 = d = fhat_*X1hat, f_*X2 in span{xi, xihat},
    det(f_*X1, f_*X2, xi) = 1, and the hatted analogue."""
    pp = pp or pair_point(pair, p, order)
    _require_tangent(pp)
    _require_w(pp)

    s = solve3((pp.fu, pp.fv, pp.xi), pp.d)
    X1 = (s[0], s[1])
    sh = solve3((pp.fhu, pp.fhv, pp.xih), pp.d)
    X1hat = (sh[0], sh[1])

    invW = jrecip(pp.W)
    # xihat = t0 f_u + t1 f_v + A xi  =>  f_* X2 = -(t0 f_u + t1 f_v)/W
    t = solve3((pp.fu, pp.fv, pp.xi), pp.xih)
    X2 = (-t[0] * invW, -t[1] * invW)
    v2 = v_scale(v_add(v_scale(pp.fu, t[0]), v_scale(pp.fv, t[1])), -invW)
    # xi = r0 fh_u + r1 fh_v + Ahat xihat  =>  fhat_* X2hat = (xi - Ahat xihat)/W
    r = solve3((pp.fhu, pp.fhv, pp.xih), pp.xi)
    X2hat = (r[0] * invW, r[1] * invW)
    v2hat = v_scale(v_add(v_scale(pp.fhu, r[0]), v_scale(pp.fhv, r[1])), invW)

    # frame relations: fhat_* X2hat = Ahat f_*X2 + ((1 - A Ahat)/W) xi
    #                  xihat        = -W f_*X2 + A xi
    one_m = 1.0 - pp.A_val * pp.Ahat_val
    rel1 = v_values(v2hat) - (pp.Ahat_val * v_values(v2)
                              + (one_m / pp.W_val) * v_values(pp.xi))
    rel2 = v_values(pp.xih) - (-pp.W_val * v_values(v2)
                               + pp.A_val * v_values(pp.xi))
    rel = max(np.linalg.norm(rel1), np.linalg.norm(rel2))
    rel /= max(np.linalg.norm(v_values(pp.xih)), 1.0)
    return PairFrame(p, X1, X2, X1hat, X2hat, pp.A, pp.Ahat, pp.W, v2, v2hat,
                     rel)


def pair_frame_forms(pair: SurfacePair, p: tuple[float, float],
                     order: int = 3) -> tuple[FrameFormMatrix,
                                              FrameFormMatrix]:
    """Maurer-Cartan forms of the two adapted frames (jet coefficients)."""

    def builder(u, v, k):
        pp = pair_point(pair, (u, v), k + 1)
        fr = solve_pair_frame(pair, (u, v), k + 1, pp=pp)
        return pp.F, pp.d, fr.v2, pp.xi

    def builder_hat(u, v, k):
        pp = pair_point(pair, (u, v), k + 1)
        fr = solve_pair_frame(pair, (u, v), k + 1, pp=pp)
        return pp.Fh, pp.d, fr.v2hat, pp.xih

    return (maurer_cartan(builder, p, order),
            maurer_cartan(builder_hat, p, order))


# ---------------------------------------------------------------------------
# scalar invariants


def _H_checked(pp: PairPoint, hatted: bool) -> MultiJet:
    gw = pp.gwh() if hatted else pp.gw()
    scale = float(np.max(np.abs(gw.h_mat))) or 1e-30
    if abs(np.linalg.det(gw.h_mat)) <= 1e-10 * scale * scale:
        raise DegenerateSurface(
            f"{'fhat' if hatted else 'f'} degenerate at {pp.p}")
    return gw.H


def psi(pair: SurfacePair, p: tuple[float, float],
        order: int = DEFAULT_ORDER, pp: PairPoint | None = None) -> float:
    """Gauge-invariant conformality scalar ((1 - A Ahat)/W)^4 / (H Hhat)."""
    pp = pp or pair_point(pair, p, order)
    _require_w(pp)
    H = jet_smooth_value(_H_checked(pp, False))
    Hh = jet_smooth_value(_H_checked(pp, True))
    q = (1.0 - pp.A_val * pp.Ahat_val) / pp.W_val
    return q ** 4 / (H * Hh)


def conformality_defect(pair: SurfacePair, p: tuple[float, float],
                        order: int = DEFAULT_ORDER,
                        pp: PairPoint | None = None
                        ) -> tuple[float, float]:
    """(relative non-proportionality of h and hhat, psi - 1)."""
    pp = pp or pair_point(pair, p, order)
    h = pp.gw().h_mat
    hh = pp.gwh().h_mat
    for m, hat in ((h, False), (hh, True)):
        scale = float(np.max(np.abs(m))) or 1e-30
        if abs(np.linalg.det(m)) <= 1e-10 * scale * scale:
            raise DegenerateSurface(
                f"{'fhat' if hat else 'f'} degenerate at {p}")
    lam = float(np.tensordot(hh, h) / np.tensordot(h, h))
    defect = float(np.linalg.norm(hh - lam * h) / np.linalg.norm(hh))
    try:
        psi_m1 = psi(pair, p, order, pp=pp) - 1.0
    except ZeroW:
        psi_m1 = float("nan")  # parallel transversals: psi undefined
    return defect, psi_m1


@dataclass
class SphericalRank:
    rank: int
    wedge_value: float
    jacobian_det: float
    identity_residual: float
    chart_index: int


def spherical_rank(pair: SurfacePair, p: tuple[float, float],
                   order: int = 4,
                   pp: PairPoint | None = None) -> SphericalRank:
    """Rank of p -> direction of (fhat - f), against the frame criterion.

    The wedge omega^2_1 ^ omega^3_1 is computed for an adapted frame with
    v1 = d; the cross-check is the Jacobian of the projectivized direction
    map in the chart of its largest coordinate.  The two agree in vanishing
    and sign through the determinant identity

        d(v^i/v^k) ^ d(v^j/v^k) = +- det(frame) / (v^k)^3 * w21 ^ w31.
    """
    pp = pp or pair_point(pair, p, order)
    _require_tangent(pp)

    def builder(u, v, k):
        q = pair_point(pair, (u, v), k + 1) if (u, v) != p or k + 1 > pp.order \
            else pp
        try:
            fr = solve_pair_frame(pair, (u, v), q.order, pp=q)
            v2 = fr.v2
        except ZeroW:
            s = solve3((q.fu, q.fv, q.xi), q.d)
            y = (-s[1], s[0])
            gamma = det3(q.d, v_add(v_scale(q.fu, y[0]), v_scale(q.fv, y[1])),
                         q.xi)
            v2 = v_scale(v_add(v_scale(q.fu, y[0]), v_scale(q.fv, y[1])),
                         jrecip(gamma))
        return q.F, q.d, v2, q.xi

    M = maurer_cartan(builder, p, order=min(order, 2))
    wedge = wedge_coeff(M.omega[1][0], M.omega[2][0])

    dval = v_values(pp.d)
    k = int(np.argmax(np.abs(dval)))
    i, j = [x for x in range(3) if x != k]
    invk = jrecip(pp.d[k])
    q1 = pp.d[i] * invk
    q2 = pp.d[j] * invk
    J = np.array([[q1.partial(1, 0), q1.partial(0, 1)],
                  [q2.partial(1, 0), q2.partial(0, 1)]])
    jac = float(np.linalg.det(J))
    sv = np.linalg.svd(J, compute_uv=False)
    floor = 1e-9 * max(pp.scale / max(pp.sep, 1e-30), 1.0)
    rank = int(np.sum(sv > max(TOL_RANK * sv[0], floor)))

    # identity: jac = sign * det(frame) / d_k^3 * wedge
    sign = {2: 1.0, 1: -1.0, 0: 1.0}[k]
    frame_det = float(np.linalg.det(np.column_stack(M.frame[1:])))
    pred = sign * frame_det / jet_smooth_value(pp.d[k]) ** 3 * wedge
    ident = abs(jac - pred) / max(abs(jac), abs(pred), 1e-12)
    return SphericalRank(rank, wedge, jac, ident, k)


# ---------------------------------------------------------------------------
# parallel-transversal criterion


@dataclass
class ParallelCriterion:
    lam: float
    beta: float
    defect: float
    lam_residual: float
    beta_zero: bool
    X2: tuple
    X2hat: tuple


def parallel_transversal_criterion(pair: SurfacePair, p: tuple[float, float],
                                   order: int = 4,
                                   X2_shift: float = 0.0,
                                   pp: PairPoint | None = None
                                   ) -> ParallelCriterion:
    """Recover (lam, beta) from fhat_*X2hat = lam f_*X2 + beta xi with
    xihat = xi / lam, and report H Hhat - beta^4.

    ``X2_shift`` replaces X2 by X2 + t X1 (the recovered scalars must not
    move).
    """
    pp = pp or pair_point(pair, p, order)
    _require_tangent(pp)
    xiv = v_values(pp.xi)
    xihv = v_values(pp.xih)
    para = np.linalg.norm(np.cross(xiv, xihv)) / max(
        np.linalg.norm(xiv) * np.linalg.norm(xihv), 1e-30)
    if para > 1e-8:
        raise NotParallel(f"xi and xihat not parallel at {p}: {para:.3e}")
    lam_field = float(xiv @ xiv) / float(xiv @ xihv)

    H = jet_smooth_value(_H_checked(pp, False))
    Hh = jet_smooth_value(_H_checked(pp, True))

    s = solve3((pp.fu, pp.fv, pp.xi), pp.d)
    X1 = np.array([jet_smooth_value(s[0]), jet_smooth_value(s[1])])
    y_raw = np.array([-X1[1], X1[0]])
    fu_v, fv_v = v_values(pp.fu), v_values(pp.fv)
    f_y = y_raw[0] * fu_v + y_raw[1] * fv_v
    gamma = float(np.linalg.det(np.column_stack([v_values(pp.d), f_y, xiv])))
    X2 = y_raw / gamma + X2_shift * X1
    f_X2 = X2[0] * fu_v + X2[1] * fv_v

    # unknowns (y1hat, y2hat, lam, beta):
    #   fhat_*Yhat - lam f_*X2 - beta xi = 0  and  theta_hat(X1hat, Yhat) = 1
    fhu_v, fhv_v = v_values(pp.fhu), v_values(pp.fhv)
    M = np.zeros((4, 4))
    M[:3, 0] = fhu_v
    M[:3, 1] = fhv_v
    M[:3, 2] = -f_X2
    M[:3, 3] = -xiv
    M[3, 0] = float(np.linalg.det(np.column_stack(
        [v_values(pp.d), fhu_v, xihv])))
    M[3, 1] = float(np.linalg.det(np.column_stack(
        [v_values(pp.d), fhv_v, xihv])))
    rhs = np.array([0.0, 0.0, 0.0, 1.0])
    sol = np.linalg.solve(M, rhs)
    lam, beta = float(sol[2]), float(sol[3])

    lam_res = abs(lam - lam_field) / max(abs(lam_field), 1e-30)
    scale = np.linalg.norm(xiv) * abs(lam)
    beta_zero = abs(beta) <= 1e-10 * max(scale, 1.0)
    defect = H * Hh - beta ** 4
    return ParallelCriterion(lam, beta, defect, lam_res, beta_zero,
                             (float(X2[0]), float(X2[1])),
                             (float(sol[0]), float(sol[1])))


# ---------------------------------------------------------------------------
# curvature of an induced connection


def gw_field(f: SurfaceMap, xi: TransversalField,
             order: int = DEFAULT_ORDER) -> Callable:
    return lambda p: gauss_weingarten_jets(f, xi, p, order)


def curvature_jets(gw: GaussWeingartenData):
    """R[l][k][i][j] jets from the Christoffel jets (order drops by 1)."""
    G = gw.Gamma
    R = [[[[None, None] for _ in (0, 1)] for _ in (0, 1)] for _ in (0, 1)]
    dG = [[[ (G[l][i][j].du(), G[l][i][j].dv()) for j in (0, 1)]
           for i in (0, 1)] for l in (0, 1)]
    for l in (0, 1):
        for k in (0, 1):
            for i in (0, 1):
                for j in (0, 1):
                    term = dG[l][j][k][i] - dG[l][i][k][j]
                    acc = term
                    for m in (0, 1):
                        acc = acc + (G[l][i][m].truncated(term.order)
                                     * G[m][j][k].truncated(term.order)
                                     - G[l][j][m].truncated(term.order)
                                     * G[m][i][k].truncated(term.order))
                    R[l][k][i][j] = acc
    return R


def connection_curvature(gwf: Callable, p: tuple[float, float]
                         ) -> tuple[np.ndarray, np.ndarray]:
    """(R, Ric) values; R[l, k, i, j] for R(d_i, d_j) d_k = R^l d_l,
    Ric[j, k] = trace(X -> R(X, d_j) d_k)."""
    gw = gwf(p)
    Rj = curvature_jets(gw)
    R = np.array([[[[jet_smooth_value(Rj[l][k][i][j]) for j in (0, 1)]
                    for i in (0, 1)] for k in (0, 1)] for l in (0, 1)])
    Ric = np.array([[sum(R[i, k, i, j] for i in (0, 1)) for k in (0, 1)]
                    for j in (0, 1)])
    return R, Ric


def apply_R(R: np.ndarray, X, Y, Z) -> np.ndarray:
    """Chart components of R(X, Y)Z."""
    out = np.zeros(2)
    for l in (0, 1):
        out[l] = sum(R[l, k, i, j] * Z[k] * X[i] * Y[j]
                     for k in (0, 1) for i in (0, 1) for j in (0, 1))
    return out


@dataclass
class CovariantCurvature:
    nablaR: np.ndarray
    norm: float
    dim_imR: int
    R: np.ndarray


def covariant_derivative_R(gwf: Callable, p: tuple[float, float],
                           method: str = "jet", step: float = 1e-3
                           ) -> CovariantCurvature:
    """nabla R of a (1,3) curvature tensor; norm in a theta-unimodular
    frame; image dimension by singular values (relative cutoff 1e-7)."""
    gw = gwf(p)
    G = gw.Gamma_arr

    if method in ("jet", "auto"):
        try:
            Rj = curvature_jets(gw)
            if Rj[0][0][0][1].order < 1:
                raise ValueError("insufficient jet order for nabla R")
            R = np.array([[[[jet_smooth_value(Rj[l][k][i][j])
                             for j in (0, 1)] for i in (0, 1)]
                           for k in (0, 1)] for l in (0, 1)])
            dR = np.empty((2, 2, 2, 2, 2))
            for l in (0, 1):
                for k in (0, 1):
                    for i in (0, 1):
                        for j in (0, 1):
                            dR[l, k, i, j, 0] = Rj[l][k][i][j].partial(1, 0)
                            dR[l, k, i, j, 1] = Rj[l][k][i][j].partial(0, 1)
        except Exception:
            if method == "jet":
                raise
            method = "fd"
    if method == "fd":
        R, _ = connection_curvature(gwf, p)
        dR = np.empty((2, 2, 2, 2, 2))
        for m, e in enumerate(((1.0, 0.0), (0.0, 1.0))):
            def Rat(t):
                q = (p[0] + t * e[0], p[1] + t * e[1])
                return connection_curvature(gwf, q)[0]
            d1 = (Rat(step) - Rat(-step)) / (2 * step)
            d2 = (Rat(step / 2) - Rat(-step / 2)) / step
            dR[..., m] = (4.0 * d2 - d1) / 3.0

    nab = np.empty((2, 2, 2, 2, 2))
    for m in (0, 1):
        corr = (np.einsum("ln,nkij->lkij", G[:, m, :], R)
                - np.einsum("nk,lnij->lkij", G[:, m, :], R)
                - np.einsum("ni,lknj->lkij", G[:, m, :], R)
                - np.einsum("nj,lkin->lkij", G[:, m, :], R))
        nab[..., m] = dR[..., m] + corr

    unit = abs(gw.theta12_val) ** 1.5
    norm = float(np.max(np.abs(nab))) * unit

    M2 = R[:, :, 0, 1]
    sv = np.linalg.svd(M2, compute_uv=False)
    floor = 1e-9 * (1.0 + float(np.max(np.abs(G))) ** 2
                    + float(np.max(np.abs(dR))))
    if sv[0] <= floor:
        dim = 0
    else:
        dim = int(np.sum(sv > TOL_RANK * sv[0]))
    return CovariantCurvature(nab, norm, dim, R)


# ---------------------------------------------------------------------------
# frame coefficient expansions (pair-frame gauge scalars)


@dataclass
class FrameCoefficients:
    s: float
    t: float
    u: float
    v: float
    alpha: MultiJet
    beta: float
    x: float
    y: float
    alpha_residual: float
    alpha_wedge: float
    beta_residual: float
    s_consistency: float
    x_consistency: float
    omega11_max: float

    @property
    def alpha_val(self) -> float:
        return jet_smooth_value(self.alpha)


def frame_coefficients(pair: SurfacePair, p: tuple[float, float],
                       order: int = 3,
                       forms: tuple | None = None,
                       pp: PairPoint | None = None) -> FrameCoefficients:
    """Expand theta^1, omega^3_2, omega^1_2, omega^1_3 and the hatted
    omega^3_2 in the (omega^2_1, omega^3_1) coframe."""
    pp = pp or pair_point(pair, p, max(order + 1, 4))
    M, Mh = forms or pair_frame_forms(pair, p, order)
    e1 = M.omega[1][0]
    e2 = M.omega[2][0]

    s_j, t_j = expand_in_basis(M.theta[0], e1, e2)
    u_j, v_j = expand_in_basis(M.omega[2][1], e1, e2)
    alpha, alpha_res, alpha_wedge = proportionality(M.omega[0][1], e1)
    beta, beta_res, _ = proportionality(M.omega[0][2], e2)
    x_j, y_j = expand_in_basis(Mh.omega[2][1], e1, e2)

    A, Ah, W = pp.A_val, pp.Ahat_val, pp.W_val
    H = jet_smooth_value(pp.gw().H)
    one_m = 1.0 - A * Ah
    s, t = jet_smooth_value(s_j), jet_smooth_value(t_j)
    uu, vv = jet_smooth_value(u_j), jet_smooth_value(v_j)
    x, y = jet_smooth_value(x_j), jet_smooth_value(y_j)
    s_cons = abs(s - (Ah * W * uu / one_m + vv)) / (1.0 + abs(s))
    x_cons = abs(x + one_m ** 2 / (W ** 2 * H) * uu) / (1.0 + abs(x))
    w11 = M.omega[0][0]
    omega11_max = max(abs(w11.a_val), abs(w11.b_val))
    return FrameCoefficients(s, t, uu, vv, alpha,
                             jet_smooth_value(beta), x, y,
                             alpha_res, alpha_wedge, beta_res,
                             s_cons, x_cons, omega11_max)


# ---------------------------------------------------------------------------
# case classification and metric reconstruction


_CASES = {
    "euclidean": -1,
    "lorentz-timelike-congruence": 1,
    "lorentz-spacelike-timelike": 1,
    "lorentz-spacelike-spacelike": 1,
    "lorentz-mixed": -1,
}


def classify_case(A: float, Ahat: float, alpha: float
                  ) -> tuple[str, int]:
    """Case label and metric sign delta from (A, Ahat, alpha)."""
    prod = A * Ahat
    if abs(prod) < 1e-12 or abs(prod - 1.0) < 1e-12:
        raise Unclassifiable(f"A Ahat = {prod} on a case boundary")
    if alpha == 0.0:
        raise Unclassifiable("alpha = 0 admits no metric case")
    if 0.0 < prod < 1.0:
        case = "euclidean" if alpha < 0 else "lorentz-timelike-congruence"
    elif prod > 1.0:
        case = ("lorentz-spacelike-timelike" if alpha > 0
                else "lorentz-spacelike-spacelike")
    else:
        case = "lorentz-mixed"
    return case, _CASES[case]


@dataclass
class MetricReconstruction:
    G: np.ndarray
    delta: int
    DG_residual: float
    kappa: float
    kappahat: float
    L2: float
    angle_invariant: float
    case: str
    angle_cos: float | None


def metric_reconstruction(pair: SurfacePair, p: tuple[float, float],
                          frame: PairFrame | None = None,
                          coeffs: FrameCoefficients | None = None,
                          order: int = DEFAULT_ORDER) -> MetricReconstruction:
    """Assemble the parallel ambient bilinear form G from the frame and
    check DG = 0, the sectional curvatures and the angle invariant."""
    pp = pair_point(pair, p, order)
    frame = frame or solve_pair_frame(pair, p, order, pp=pp)
    coeffs = coeffs or frame_coefficients(pair, p, pp=pp)
    alpha = coeffs.alpha
    alpha_val = coeffs.alpha_val
    A, Ah, W = pp.A, pp.Ahat, pp.W
    A_val, Ah_val = pp.A_val, pp.Ahat_val
    scale_a = max(abs(coeffs.u), abs(coeffs.v), 1.0)
    if abs(alpha_val) < 1e-8 * scale_a:
        raise AlphaZero(
            f"alpha ~ 0 at {p}: curvature image is one-dimensional, "
            "no metric branch")
    if abs(A_val) < 1e-12:
        raise AlphaZero(f"A = 0 at {p}: metric normalization undefined")
    case, delta = classify_case(A_val, Ah_val, alpha_val)

    one_m = 1.0 - A * Ah
    m11 = -one_m * float(delta)
    m22 = alpha * one_m * float(delta)
    m33 = alpha * Ah * jrecip(A) * W * W * float(delta)

    # ambient G = P^{-T} diag(m) P^{-1} with P = [d, f_*X2, xi]
    cols = (pp.d, frame.v2, pp.xi)
    e = [[1.0 if i == j else 0.0 for j in range(3)] for i in range(3)]
    Pinv_rows = [solve3(cols, e[i]) for i in range(3)]  # rows of P^{-1}

    def Gij(i, j):
        r_i = [Pinv_rows[0][i], Pinv_rows[1][i], Pinv_rows[2][i]]
        r_j = [Pinv_rows[0][j], Pinv_rows[1][j], Pinv_rows[2][j]]
        return (m11 * r_i[0] * r_j[0] + m22 * r_i[1] * r_j[1]
                + m33 * r_i[2] * r_j[2])

    Gjets = [[Gij(i, j) for j in range(3)] for i in range(3)]
    Gv = np.array([[jet_smooth_value(Gjets[i][j]) for j in range(3)]
                   for i in range(3)])
    gscale = float(np.max(np.abs(Gv))) or 1.0
    dg = 0.0
    for i in range(3):
        for j in range(3):
            dg = max(dg, abs(Gjets[i][j].partial(1, 0)),
                     abs(Gjets[i][j].partial(0, 1)))
    DG_residual = dg / gscale

    sig = np.sort(np.linalg.eigvalsh(Gv))
    npos = int(np.sum(sig > 1e-10 * gscale))
    nneg = int(np.sum(sig < -1e-10 * gscale))
    want = (3, 0) if case == "euclidean" else (2, 1)
    if (npos, nneg) != want:
        raise InconsistentSignature(
            f"case {case} expects signature {want}, got ({npos}, {nneg})")

    # g(R(X1,X2)X2, X1) / (g11 g22 - g12^2), metric g = G(f_* ., f_* .)
    def sectional(gwf_, Xa, Xb, bu, bv):
        R, _ = connection_curvature(gwf_, p)
        rz = apply_R(R, Xa, Xb, Xb)
        vecs = {
            "a": Xa[0] * bu + Xa[1] * bv,
            "b": Xb[0] * bu + Xb[1] * bv,
            "r": rz[0] * bu + rz[1] * bv,
        }
        g = lambda x, y: float(x @ Gv @ y)
        num = g(vecs["r"], vecs["a"])
        den = g(vecs["a"], vecs["a"]) * g(vecs["b"], vecs["b"]) \
            - g(vecs["a"], vecs["b"]) ** 2
        return num / den

    bu, bv = v_values(pp.fu), v_values(pp.fv)
    bhu, bhv = v_values(pp.fhu), v_values(pp.fhv)
    X1c, X2c = frame.X_vals("X1"), frame.X_vals("X2")
    X1h, X2h = frame.X_vals("X1hat"), frame.X_vals("X2hat")
    gwf_f = gw_field(pair.f, pair.xi, order)
    gwf_h = gw_field(pair.fhat, pair.xihat, order)
    kappa = sectional(gwf_f, X1c, X2c, bu, bv)
    kappahat = sectional(gwf_h, X1h, X2h, bhu, bhv)

    dvec = v_values(pp.d)
    xiv, xihv = v_values(pp.xi), v_values(pp.xih)
    L2 = float(dvec @ Gv @ dvec)
    gxx = float(xiv @ Gv @ xiv)
    gxh = float(xiv @ Gv @ xihv)
    ghh = float(xihv @ Gv @ xihv)
    angle_cos = None
    if case in ("euclidean", "lorentz-timelike-congruence"):
        angle_cos = gxh / math.sqrt(gxx * ghh)
        angle_invariant = angle_cos ** 2
    elif case == "lorentz-mixed":
        angle_invariant = gxh ** 2 / (-gxx * ghh)
    else:
        angle_invariant = gxh ** 2 / (gxx * ghh)
    return MetricReconstruction(Gv, delta, DG_residual, kappa, kappahat, L2,
                                angle_invariant, case, angle_cos)


# ---------------------------------------------------------------------------
# affine minimality (trace of the Blaschke shape operator)


def affine_minimality(f: SurfaceMap, p: tuple[float, float],
                      order: int = DEFAULT_ORDER) -> tuple[float, float]:
    """(tr S, 2-form proxy) for the affine normal; the proxy evaluates
    (-theta^2 ^ omega^1_3 + theta^1 ^ omega^2_3) / (theta^1 ^ theta^2)
    on the adapted frame (f; f_u, f_v, xi)."""
    xi_b, gw = blaschke_normal(f, p, order=order)
    trS = gw.trS

    def builder(u, v, k):
        F, fu, fv = f.frame(u, v, k + 1)
        return F, fu, fv, xi_b.evaluate(u, v, k)

    M = maurer_cartan(builder, p, order=2)
    num = (-wedge_coeff(M.theta[1], M.omega[0][2])
           + wedge_coeff(M.theta[0], M.omega[1][2]))
    den = wedge_coeff(M.theta[0], M.theta[1])
    return trS, -num / den


# ---------------------------------------------------------------------------
# normal-form residual system (both conormal invariants identically zero)


@dataclass
class A00State:
    """Scalar fields (gamma, H, alpha, beta) on a chart with constant W.

    Evaluators are (u, v, order) -> jet; the chart variables play the
    local coordinates (x, y) of the normal form.
    """

    gamma: Callable
    H: Callable
    alpha: Callable
    beta: Callable
    W: float
    domain: Rect


@dataclass
class A00Report:
    eq_alpha: float
    eq_beta: float
    eq_alpha_y: float
    eq_beta_x: float
    identity: float
    dalpha_max: float
    dbeta_max: float
    nabla_symmetric: bool
    nablahat_symmetric: bool
    witness: tuple[float, float]


def a00_residuals(state: A00State, grid: tuple[int, int] = (8, 8),
                  tol_diff: float = TOL_DIFFERENTIAL) -> A00Report:
    """Residuals of the coupled system

        alpha = W^2 H_y e^{-2g} g_y + W^2 H (e^{-2g} g_y)_y + (e^{2g} g_x)_x
        beta  = -W^2 (e^{-2g} g_y)_y - (1/H)(e^{2g} g_x)_x
                + (H_x/H^2) e^{2g} g_x
        alpha_y = (alpha + beta H) g_y
        beta_x  = -(1/H)(alpha + beta H) g_x

    plus the derived identity
        alpha + beta H = W^2 H_y e^{-2g} g_y + (H_x/H) e^{2g} g_x,
    and the local-symmetry verdicts (alpha const / beta const).
    """
    from .jets import jexp
    W2 = state.W ** 2
    worst = dict(eq_alpha=0.0, eq_beta=0.0, eq_alpha_y=0.0, eq_beta_x=0.0,
                 identity=0.0, dalpha=0.0, dbeta=0.0)
    witness = state.domain.center
    pts = state.domain.grid(*grid)
    a_scale = 1e-30
    b_scale = 1e-30
    for (u, v) in pts:
        g = state.gamma(u, v, 3)
        H = state.H(u, v, 2)
        al = state.alpha(u, v, 1)
        be = state.beta(u, v, 1)
        gx, gy = g.du(), g.dv()
        if abs(gx.value) < 1e-10 or abs(gy.value) < 1e-10:
            raise GammaCritical(
                f"gamma_x or gamma_y vanishes at ({u}, {v})")
        Hv = H.value
        if abs(Hv) < 1e-12:
            raise GammaCritical(f"H vanishes at ({u}, {v})")
        em = jexp(-2.0 * g.truncated(2))
        ep = jexp(2.0 * g.truncated(2))
        term_y = em * gy.truncated(2)
        term_x = ep * gx.truncated(2)
        Hx, Hy = H.du(), H.dv()
        expr_alpha = (W2 * Hy * em.truncated(1) * gy.truncated(1)
                      + W2 * H.truncated(1) * term_y.dv()
                      + term_x.du())
        invH = jrecip(H)
        expr_beta = (-W2 * term_y.dv() - invH.truncated(1) * term_x.du()
                     + Hx * invH.truncated(1) * invH.truncated(1)
                     * term_x.truncated(1))
        r_a = abs(al.value - expr_alpha.value)
        r_b = abs(be.value - expr_beta.value)
        combo = al.value + be.value * Hv
        r_ay = abs(al.partial(0, 1) - combo * gy.value)
        r_bx = abs(be.partial(1, 0) + combo * gx.value / Hv)
        ident_rhs = (W2 * Hy.value * em.value * gy.value
                     + Hx.value / Hv * ep.value * gx.value)
        r_id = abs(combo - ident_rhs)
        da = max(abs(al.partial(1, 0)), abs(al.partial(0, 1)))
        db = max(abs(be.partial(1, 0)), abs(be.partial(0, 1)))
        a_scale = max(a_scale, abs(al.value))
        b_scale = max(b_scale, abs(be.value))
        for key, val in (("eq_alpha", r_a), ("eq_beta", r_b),
                         ("eq_alpha_y", r_ay), ("eq_beta_x", r_bx),
                         ("identity", r_id), ("dalpha", da), ("dbeta", db)):
            if val > worst[key]:
                worst[key] = val
                if key in ("eq_alpha", "eq_beta"):
                    witness = (u, v)
    return A00Report(worst["eq_alpha"], worst["eq_beta"],
                     worst["eq_alpha_y"], worst["eq_beta_x"],
                     worst["identity"], worst["dalpha"], worst["dbeta"],
                     worst["dalpha"] <= tol_diff * (1.0 + a_scale),
                     worst["dbeta"] <= tol_diff * (1.0 + b_scale),
                     witness)


# ---------------------------------------------------------------------------
# condition checker


@dataclass
class Tolerances:
    """Documented defaults: algebraic identities at 1e-6, differentiated
    quantities at 1e-5 (one extra order of truncation error), tangency at
    1e-8, margins relative to local scale."""

    tangency: float = TOL_TANGENCY
    separation: float = 1e-8
    algebraic: float = TOL_ALGEBRAIC
    differential: float = TOL_DIFFERENTIAL
    rank_margin: float = 1e-8
    w_margin: float = 1e-8
    nablaR: float = TOL_DIFFERENTIAL

    def overridden(self, **kw) -> "Tolerances":
        t = Tolerances(self.tangency, self.separation, self.algebraic,
                       self.differential, self.rank_margin, self.w_margin,
                       self.nablaR)
        for k, v in kw.items():
            if v is not None:
                setattr(t, k, float(v))
        return t


@dataclass
class ConditionRecord:
    key: str
    label: str
    kind: str                     # "residual" (worst < tol) | "margin" (worst > tol)
    satisfied: bool
    worst: float
    tolerance: float
    witness: tuple[float, float]
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "name": self.key, "label": self.label, "kind": self.kind,
            "satisfied": bool(self.satisfied), "worst_residual": self.worst,
            "tolerance": self.tolerance,
            "witness_point": list(self.witness), "note": self.note,
        }


@dataclass
class ConditionReport:
    conditions: dict
    conclusions: dict
    grid: tuple[int, int]
    errors: list

    @property
    def all_satisfied(self) -> bool:
        return all(r.satisfied for r in self.conditions.values())

    def as_dict(self) -> dict:
        return {
            "grid": list(self.grid),
            "all_satisfied": bool(self.all_satisfied),
            "conditions": {k: r.as_dict()
                           for k, r in sorted(self.conditions.items())},
            "conclusions": self.conclusions,
            "errors": list(self.errors),
        }


class _Worst:
    """Deterministic worst-value tracker (first witness wins ties)."""

    def __init__(self, largest: bool):
        self.largest = largest
        self.value = None
        self.witness = None

    def update(self, value: float, p) -> None:
        if self.value is None or (value > self.value if self.largest
                                  else value < self.value):
            self.value = value
            self.witness = p


def _wedge21_31(pair: SurfacePair, pp: PairPoint) -> tuple[float, float]:
    """(omega^2_1 ^ omega^3_1)(du, dv) for an adapted frame with v1 = d,
    plus the scaled magnitude used as the rank margin.

    The frame only needs independent columns, so no tangency or pair-frame
    prerequisites apply: v2 is the span vector (A xi - xihat)/W when W is
    usable and a unimodular tangent completion otherwise.
    """
    if abs(pp.W_val) > TOL_W * _w_scale(pp):
        v2 = v_scale(v_sub(v_scale(pp.xi, pp.A), pp.xih), jrecip(pp.W))
    else:
        s = solve3((pp.fu, pp.fv, pp.xi), pp.d)
        y = (-s[1], s[0])
        w = v_add(v_scale(pp.fu, y[0]), v_scale(pp.fv, y[1]))
        v2 = v_scale(w, jrecip(det3(pp.d, w, pp.xi)))
    cols = (pp.d, v2, pp.xi)
    qu = [c.du() for c in pp.d]
    qv = [c.dv() for c in pp.d]
    su = solve3(cols, qu)
    sv = solve3(cols, qv)
    w21 = (jet_smooth_value(su[1]), jet_smooth_value(sv[1]))
    w31 = (jet_smooth_value(su[2]), jet_smooth_value(sv[2]))
    wedge = w21[0] * w31[1] - w21[1] * w31[0]
    scale = max(np.hypot(*w21) * np.hypot(*w31), 1e-30)
    return wedge, abs(wedge) / scale


def _volume_balance(pp: PairPoint) -> float:
    """Condition 6 residual: det((fhat_* - f_*) Y, xi, xihat) scaled."""
    xiv, xihv = v_values(pp.xi), v_values(pp.xih)
    cross = np.cross(xiv, xihv)
    scale = max(np.linalg.norm(cross) * pp.scale, 1e-30)
    worst = 0.0
    for Y, Yh in ((pp.fu, pp.fhu), (pp.fv, pp.fhv)):
        q = v_values(Yh) - v_values(Y)
        worst = max(worst, abs(float(q @ cross)) / scale)
    return worst


def backlund_condition_report(pair: SurfacePair,
                              grid: tuple[int, int] = (16, 16),
                              tols: Tolerances | None = None,
                              order: int = 4,
                              conclusions: bool = True,
                              conclusion_grid: tuple[int, int] = (5, 5),
                              conclusion_order: int = DEFAULT_ORDER,
                              threads: int = 1) -> ConditionReport:
    """Evaluate the seven congruence conditions over a cell-center grid.

    Per-point failures of a prerequisite (ZeroW, degenerate form, ...) are
    downgraded to a failure of the condition they feed, with the location
    kept as witness.  Conclusions (conformality defect, psi - 1, nabla R
    norms, curvature image dimensions, case label) run on a coarser
    sub-grid.
    """
    tols = tols or Tolerances()
    pts = pair.domain.grid(*grid)
    errors: list = []

    tang = _Worst(True)
    sep = _Worst(False)
    wedge_m = _Worst(False)
    wmarg = _Worst(False)
    psi_res = _Worst(True)
    bal = _Worst(True)
    wh_wedge = _Worst(True)
    A_vals: list = []
    failed: dict = {}

    def eval_point(p):
        out = {"p": p}
        try:
            pp = pair_point(pair, p, order)
        except Exception as exc:  # total failure at this point
            out["fatal"] = f"{type(exc).__name__}: {exc}"
            return out
        out["tang"] = max(pp.tangency_f, pp.tangency_fh)
        out["sep"] = pp.sep / pp.scale
        out["A"] = (pp.A_val, pp.Ahat_val)
        out["wmarg"] = abs(pp.W_val) / _w_scale(pp)
        try:
            out["wedge"] = _wedge21_31(pair, pp)[1]
        except Exception as exc:
            out["err_wedge"] = f"{type(exc).__name__}: {exc}"
        try:
            H = pp.gw().H
            Hh = pp.gwh().H
            one_m = 1.0 - pp.A_val * pp.Ahat_val
            lhs = pp.W_val ** 4 * jet_smooth_value(H) * jet_smooth_value(Hh)
            out["psi_res"] = abs(lhs - one_m ** 4) / (1.0 + one_m ** 4)
            dW = np.array([pp.W.partial(1, 0), pp.W.partial(0, 1)])
            dH = np.array([H.partial(1, 0), H.partial(0, 1)])
            wedge7 = dW[0] * dH[1] - dW[1] * dH[0]
            out["wh"] = abs(wedge7) / ((1.0 + np.linalg.norm(dW))
                                       * (1.0 + np.linalg.norm(dH)))
        except Exception as exc:
            out["err_gw"] = f"{type(exc).__name__}: {exc}"
        out["bal"] = _volume_balance(pp)
        return out

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(eval_point, pts))
    else:
        results = [eval_point(p) for p in pts]

    for out in results:
        p = out["p"]
        if "fatal" in out:
            errors.append(f"{p}: {out['fatal']}")
            for key in ("1", "2", "3", "4", "5", "6", "7"):
                failed.setdefault(key, (p, out["fatal"]))
            continue
        tang.update(out["tang"], p)
        sep.update(out["sep"], p)
        wmarg.update(out["wmarg"], p)
        A_vals.append((p, out["A"]))
        bal.update(out["bal"], p)
        if "wedge" in out:
            wedge_m.update(out["wedge"], p)
        else:
            errors.append(f"{p}: {out['err_wedge']}")
            failed.setdefault("2", (p, out["err_wedge"]))
        if "psi_res" in out:
            psi_res.update(out["psi_res"], p)
            wh_wedge.update(out["wh"], p)
        else:
            errors.append(f"{p}: {out['err_gw']}")
            failed.setdefault("5", (p, out["err_gw"]))
            failed.setdefault("7", (p, out["err_gw"]))

    center = pair.domain.center
    conditions: dict = {}

    def record(key, label, kind, worst, tol, witness, extra_ok=True,
               note=""):
        if key in failed:
            w, msg = failed[key]
            conditions[key] = ConditionRecord(key, label, kind, False,
                                              float("inf"), tol, w, msg)
            return
        ok = (worst < tol) if kind == "residual" else (worst > tol)
        conditions[key] = ConditionRecord(key, label, kind,
                                          bool(ok and extra_ok),
                                          float(worst), tol, witness, note)

    sep_ok = sep.value is not None and sep.value > tols.separation
    record("1", "separation and bitangency", "residual",
           tang.value if tang.value is not None else float("inf"),
           tols.tangency, tang.witness or center, extra_ok=sep_ok,
           note=f"min |fhat-f|/scale = {sep.value:.3e}" if sep.value
           is not None else "")

    record("2", "spherical representation rank 2", "margin",
           wedge_m.value if wedge_m.value is not None else 0.0,
           tols.rank_margin, wedge_m.witness or center)

    record("3", "congruence volume W nonzero", "margin",
           wmarg.value if wmarg.value is not None else 0.0,
           tols.w_margin, wmarg.witness or center)

    if A_vals:
        As = np.array([a for _, a in A_vals])
        meanA, meanAh = As[:, 0].mean(), As[:, 1].mean()
        devs = np.maximum(np.abs(As[:, 0] - meanA) / (1.0 + abs(meanA)),
                          np.abs(As[:, 1] - meanAh) / (1.0 + abs(meanAh)))
        idx = int(np.argmax(devs))
        nonzero = max(abs(meanA), abs(meanAh)) > 1e-10
        record("4", "conormal invariants constant and not both zero",
               "residual", float(devs[idx]), tols.algebraic,
               A_vals[idx][0], extra_ok=nonzero,
               note=f"A = {meanA:.6g}, Ahat = {meanAh:.6g}")
    else:
        record("4", "conormal invariants constant and not both zero",
               "residual", float("inf"), tols.algebraic, center)

    record("5", "volume-normalized conformality (psi = 1)", "residual",
           psi_res.value if psi_res.value is not None else float("inf"),
           tols.algebraic, psi_res.witness or center)

    record("6", "volume balance of the two differentials", "residual",
           bal.value if bal.value is not None else float("inf"),
           tols.algebraic, bal.witness or center)

    record("7", "dW wedge dH = 0", "residual",
           wh_wedge.value if wh_wedge.value is not None else float("inf"),
           tols.differential, wh_wedge.witness or center)

    concl: dict = {}
    if conclusions:
        cpts = pair.domain.grid(*conclusion_grid)
        defect_w = _Worst(True)
        psi_w = _Worst(True)
        nr_w = _Worst(True)
        nrh_w = _Worst(True)
        dims: list = []
        dimsh: list = []
        gwf_f = gw_field(pair.f, pair.xi, conclusion_order)
        gwf_h = gw_field(pair.fhat, pair.xihat, conclusion_order)
        for p in cpts:
            try:
                dfc, psi_m1 = conformality_defect(pair, p, conclusion_order)
                defect_w.update(dfc, p)
                psi_w.update(abs(psi_m1), p)
            except Exception as exc:
                errors.append(f"{p}: conclusions: "
                              f"{type(exc).__name__}: {exc}")
                continue
            try:
                cc = covariant_derivative_R(gwf_f, p)
                cch = covariant_derivative_R(gwf_h, p)
                nr_w.update(cc.norm, p)
                nrh_w.update(cch.norm, p)
                dims.append(cc.dim_imR)
                dimsh.append(cch.dim_imR)
            except Exception as exc:
                errors.append(f"{p}: curvature: {type(exc).__name__}: {exc}")
        concl["conformality_defect"] = defect_w.value
        concl["psi_minus_1"] = psi_w.value
        concl["nablaR_norm"] = nr_w.value
        concl["nablaRhat_norm"] = nrh_w.value
        concl["dim_imR"] = int(max(dims)) if dims else None
        concl["dim_imRhat"] = int(max(dimsh)) if dimsh else None
        try:
            mr = metric_reconstruction(pair, center, order=conclusion_order)
            concl["case"] = mr.case
            concl["delta"] = mr.delta
        except Exception as exc:
            concl["case"] = None
            concl["case_note"] = f"{type(exc).__name__}: {exc}"
    return ConditionReport(conditions, concl, grid, errors)


# ---------------------------------------------------------------------------
# Blaschke-normal pair check (both fields are affine normals)


def blaschke_pair_check(f: SurfaceMap, fhat: SurfaceMap,
                        grid: tuple[int, int] = (8, 8),
                        tols: Tolerances | None = None,
                        order: int = DEFAULT_ORDER) -> ConditionReport:
    """Equip both surfaces with affine normals, fix signs by the volume
    normalization W = 1 - A Ahat where possible, and evaluate the
    affine-normal condition list (i)-(vii)."""
    tols = tols or Tolerances()
    domain = f.domain
    center = domain.center
    base_xi, _ = blaschke_normal(f, center, order=order)
    base_xih, _ = blaschke_normal(fhat, center, order=order)

    def flipped(field_, s):
        if s > 0:
            return field_
        return TransversalField(
            lambda u, v, k: v_scale(field_.evaluate(u, v, k), -1.0),
            provenance="blaschke", label=field_.label + "[-]")

    best = None
    for s1 in (1.0, -1.0):
        for s2 in (1.0, -1.0):
            pair_try = SurfacePair(f, fhat, flipped(base_xi, s1),
                                   flipped(base_xih, s2),
                                   label="blaschke-pair")
            try:
                pp = pair_point(pair_try, center, 3)
            except Exception:
                continue
            miss = abs(pp.W_val - (1.0 - pp.A_val * pp.Ahat_val))
            if best is None or miss < best[0] - 1e-15:
                best = (miss, pair_try, pp)
    if best is None:
        raise SignChoiceFailed("no orientation yields a usable pair frame")
    _, pair, pp0 = best
    if (abs(pp0.W_val) < 1e-12 and
            abs(1.0 - pp0.A_val * pp0.Ahat_val) < 1e-12):
        raise SignChoiceFailed(
            "volume and conormal normalizations both degenerate")

    pts = domain.grid(*grid)
    tang = _Worst(True)
    sep = _Worst(False)
    wedge_m = _Worst(False)
    wmarg = _Worst(False)
    wvar_vals: list = []
    A_vals: list = []
    vres = _Worst(True)
    eps_vals: list = []
    seven = _Worst(True)
    errors: list = []
    for p in pts:
        try:
            pp = pair_point(pair, p, 3)
            tang.update(max(pp.tangency_f, pp.tangency_fh), p)
            sep.update(pp.sep / pp.scale, p)
            wedge_m.update(_wedge21_31(pair, pp)[1], p)
            wmarg.update(abs(pp.W_val) / _w_scale(pp), p)
            wvar_vals.append((p, pp.W_val))
            A_vals.append((p, (pp.A_val, pp.Ahat_val)))
            one_m = 1.0 - pp.A_val * pp.Ahat_val
            vres.update(abs(abs(pp.W_val) - abs(one_m)) / (1.0 + abs(one_m)),
                        p)
            eps = pp.gw().eps
            epsh = pp.gwh().eps
            eps_vals.append((p, eps, epsh))
            seven.update(abs(pp.Ahat_val + eps * pp.A_val), p)
        except Exception as exc:
            errors.append(f"{p}: {type(exc).__name__}: {exc}")

    conditions: dict = {}

    def rec(key, label, kind, worst, tol, witness, ok_extra=True, note=""):
        ok = (worst < tol) if kind == "residual" else (worst > tol)
        conditions[key] = ConditionRecord(key, label, kind,
                                          bool(ok and ok_extra),
                                          float(worst), tol, witness, note)

    sep_ok = sep.value is not None and sep.value > tols.separation
    rec("i", "separation and bitangency", "residual",
        tang.value if tang.value is not None else float("inf"),
        tols.tangency, tang.witness or center, ok_extra=sep_ok)
    rec("ii", "spherical representation rank 2", "margin",
        wedge_m.value if wedge_m.value is not None else 0.0,
        tols.rank_margin, wedge_m.witness or center)
    if A_vals:
        As = np.array([a for _, a in A_vals])
        meanA, meanAh = As[:, 0].mean(), As[:, 1].mean()
        devs = np.maximum(np.abs(As[:, 0] - meanA) / (1.0 + abs(meanA)),
                          np.abs(As[:, 1] - meanAh) / (1.0 + abs(meanAh)))
        idx = int(np.argmax(devs))
        rec("iii", "conormal invariants constant", "residual",
            float(devs[idx]), tols.algebraic, A_vals[idx][0],
            note=f"A = {meanA:.6g}, Ahat = {meanAh:.6g}")
    else:
        rec("iii", "conormal invariants constant", "residual", float("inf"),
            tols.algebraic, center)
    if wvar_vals:
        Ws = np.array([w for _, w in wvar_vals])
        meanW = Ws.mean()
        dev = np.abs(Ws - meanW) / (1.0 + abs(meanW))
        idx = int(np.argmax(dev))
        wnz = wmarg.value is not None and wmarg.value > tols.w_margin
        rec("iv", "congruence volume W a nonzero constant", "residual",
            float(dev[idx]), tols.algebraic, wvar_vals[idx][0],
            ok_extra=wnz,
            note=f"W = {meanW:.6g}, min margin = {wmarg.value:.3e}")
    else:
        rec("iv", "congruence volume W a nonzero constant", "residual",
            float("inf"), tols.algebraic, center)
    rec("v", "|W| = |1 - A Ahat|", "residual",
        vres.value if vres.value is not None else float("inf"),
        tols.algebraic, vres.witness or center)
    eps_ok = bool(eps_vals) and all(e == eh for _, e, eh in eps_vals)
    eps_wit = next(((p) for p, e, eh in eps_vals if e != eh), center)
    rec("vi", "matching fundamental-form signs", "residual",
        0.0 if eps_ok else 1.0, 0.5, eps_wit,
        note="eps = eps_hat" if eps_ok else "sign mismatch")
    rec("vii", "Ahat + eps A = 0", "residual",
        seven.value if seven.value is not None else float("inf"),
        tols.algebraic, seven.witness or center)

    concl: dict = {}
    if all(r.satisfied for r in conditions.values()):
        dw = _Worst(True)
        gwf_f = gw_field(f, pair.xi, order + 1)
        gwf_h = gw_field(fhat, pair.xihat, order + 1)
        nr = _Worst(True)
        nrh = _Worst(True)
        for p in domain.grid(3, 3):
            try:
                dfc, _ = conformality_defect(pair, p, order)
                dw.update(dfc, p)
                nr.update(covariant_derivative_R(gwf_f, p, method="fd",
                                                 step=1e-3 * domain.span).norm,
                          p)
                nrh.update(covariant_derivative_R(gwf_h, p, method="fd",
                                                  step=1e-3 * domain.span).norm,
                           p)
            except Exception as exc:
                errors.append(f"{p}: conclusions: "
                              f"{type(exc).__name__}: {exc}")
        concl["conformality_defect"] = dw.value
        concl["nablaR_norm"] = nr.value
        concl["nablaRhat_norm"] = nrh.value
    return ConditionReport(conditions, concl, grid, errors)
