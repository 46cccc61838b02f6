"""Built-in analytic surfaces and surface pairs.

Every builder produces jet-evaluable closed forms and self-validates on a
small probe grid before returning; a catalog object that fails its own
checks raises ConstructionFailed instead of flowing downstream.

The classical pair is a constant-negative-curvature surface and its line
congruence transform, built in asymptotic Chebyshev coordinates from a
one-soliton solution of the sine-Gordon equation; the transform angle
solves the congruence system

    theta_u = w_u + sin(theta)/b,    theta_v = b sin(theta - w)

with b = tan(sigma/2), realized in closed form through the two-soliton
superposition.  The self-validation contract (constant length, bitangency,
constant normal angle) is what pins the construction, not any particular
formula.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .backlund import A00State, SurfacePair
from .errors import (ConstructionFailed, ParamOutOfRange, UnknownEntry)
from .geometry import (Rect, SurfaceMap, TransversalField,
                       euclidean_unit_normal)
from .jets import (MultiJet, det3, jatan, jcos, jcosh, jet_const,
                   jet_smooth_value, jexp, jlog, jpow, jrecip, jsech, jsin,
                   jsinh, jsqrt, jtanh, lift_variable, solve2, solve3, v_add,
                   v_cross, v_dot, v_scale, v_sub, v_values)

VALIDATION_TOL = 1e-8


@dataclass(frozen=True)
class ParamSpec:
    default: object
    doc: str
    lo: float | None = None
    hi: float | None = None


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    kind: str                    # "surface" | "pair"
    params: dict
    builder: Callable
    notes: str


def _charts(u: float, v: float, order: int):
    return lift_variable(u, "u", order), lift_variable(v, "v", order)


def _check_params(entry: CatalogEntry, kw: dict) -> dict:
    out = {}
    for key, spec in entry.params.items():
        val = kw.pop(key, spec.default)
        if isinstance(spec.default, (int, float)) and val is not None:
            val = float(val) if isinstance(spec.default, float) else val
            if spec.lo is not None and val < spec.lo:
                raise ParamOutOfRange(f"{entry.name}: {key} = {val} < {spec.lo}")
            if spec.hi is not None and val > spec.hi:
                raise ParamOutOfRange(f"{entry.name}: {key} = {val} > {spec.hi}")
        out[key] = val
    if kw:
        raise ParamOutOfRange(f"{entry.name}: unknown parameters {sorted(kw)}")
    return out


# ---------------------------------------------------------------------------
# surfaces


def _build_elliptic_paraboloid(**kw) -> SurfaceMap:
    half = float(kw.get("halfwidth", 1.0))

    def ev(u, v, k):
        U, V = _charts(u, v, k)
        return [U, V, (U * U + V * V) * 0.5]

    return SurfaceMap(Rect(-half, half, -half, half), ev,
                      label="elliptic-paraboloid")


def _build_hyperbolic_paraboloid(**kw) -> SurfaceMap:
    half = float(kw.get("halfwidth", 1.0))

    def ev(u, v, k):
        U, V = _charts(u, v, k)
        return [U, V, U * V]

    return SurfaceMap(Rect(-half, half, -half, half), ev,
                      label="hyperbolic-paraboloid")


def _build_unit_sphere(**kw) -> SurfaceMap:
    # polar-angle chart away from the poles
    def ev(u, v, k):
        U, V = _charts(u, v, k)
        return [jsin(V) * jcos(U), jsin(V) * jsin(U), jcos(V)]

    return SurfaceMap(Rect(0.2, 1.4, 0.6, 1.6), ev, label="unit-sphere")


def _build_pseudosphere(**kw) -> SurfaceMap:
    def ev(u, v, k):
        U, V = _charts(u, v, k)
        s = jsech(U)
        return [s * jcos(V), s * jsin(V), U - jtanh(U)]

    return SurfaceMap(Rect(0.5, 2.5, 0.1, 2.0), ev, label="pseudosphere")


_GRAPH_FUNCS = {
    "sin": jsin, "cos": jcos, "exp": jexp, "log": jlog, "sinh": jsinh,
    "cosh": jcosh, "tanh": jtanh, "sech": jsech, "sqrt": jsqrt,
    "atan": jatan,
}

_GRAPH_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name,
                ast.Constant, ast.Load, ast.Add, ast.Sub, ast.Mult, ast.Div,
                ast.Pow, ast.USub, ast.UAdd)


def _compile_graph_expression(expr: str) -> Callable:
    tree = ast.parse(expr, mode="eval")
    for node in ast.walk(tree):
        if not isinstance(node, _GRAPH_NODES):
            raise ParamOutOfRange(
                f"graph expression: unsupported syntax {type(node).__name__}")
        if isinstance(node, ast.Name) and node.id not in (
                "u", "v", *_GRAPH_FUNCS):
            raise ParamOutOfRange(f"graph expression: unknown name {node.id}")
        if isinstance(node, ast.Call) and not (
                isinstance(node.func, ast.Name)
                and node.func.id in _GRAPH_FUNCS):
            raise ParamOutOfRange("graph expression: only the documented "
                                  "elementary functions may be called")
    code = compile(tree, "<graph>", "eval")

    def fn(U, V):
        return eval(code, {"__builtins__": {}},
                    {"u": U, "v": V, **_GRAPH_FUNCS})

    return fn


def _build_graph(**kw) -> SurfaceMap:
    expr = kw.get("expression") or "u*u/2 + v*v/2"
    half = float(kw.get("halfwidth", 1.0))
    fn = _compile_graph_expression(expr)

    def ev(u, v, k):
        U, V = _charts(u, v, k)
        z = fn(U, V)
        if not isinstance(z, MultiJet):
            z = jet_const(float(z), k)
        return [U, V, z]

    return SurfaceMap(Rect(-half, half, -half, half), ev,
                      label=f"graph({expr})")


# ---------------------------------------------------------------------------
# the classical pair


def _soliton_angle(U, V, beta: float, phase: float):
    """Transform angle theta = (w + w')/2 for the one-soliton seed
    w = 4 atan exp(u + v)."""
    x = U + V
    w = 4.0 * jatan(jexp(x))
    if abs(beta - 1.0) > 1e-9:
        s2 = U * (1.0 / beta) + V * beta + phase
        k = (1.0 + beta) / (1.0 - beta)
        wp = 4.0 * jatan(k * (jexp(s2) - jexp(x))
                         * jrecip(1.0 + jexp(x + s2)))
    else:
        wp = 4.0 * jatan((U - V + phase) * jsech(x))
    return w, wp, (w + wp) * 0.5


def _classical_phase_margin(dom: Rect, beta: float, phase: float) -> float:
    """Distance of |g| from the transform's degeneracy set {0, 1} over the
    domain, where w' = 4 atan(g)."""
    uu, vv = np.meshgrid(np.linspace(dom.u0, dom.u1, 40),
                         np.linspace(dom.v0, dom.v1, 40))
    if abs(beta - 1.0) > 1e-9:
        s1 = uu + vv
        s2 = uu / beta + beta * vv + phase
        k = (1.0 + beta) / (1.0 - beta)
        g = k * (np.exp(s2) - np.exp(s1)) / (1.0 + np.exp(s1 + s2))
    else:
        g = (uu - vv + phase) / np.cosh(uu + vv)
    return float(min(np.abs(g).min(), np.abs(np.abs(g) - 1.0).min()))


def _build_classical_pair(**kw) -> SurfacePair:
    sigma = float(kw["sigma"])
    L = float(kw["L"])
    phase = kw.get("phase")
    dom = kw.get("domain") or Rect(0.8, 1.8, 0.2, 1.0)
    if not (0.0 < sigma < math.pi) or abs(math.sin(sigma)) < 1e-12:
        raise ParamOutOfRange(f"sigma = {sigma} needs sin(sigma) != 0")
    if L <= 0:
        raise ParamOutOfRange(f"L = {L} must be positive")
    beta = math.tan(sigma / 2.0)
    warnings = []
    if abs(math.cos(sigma)) < 1e-9:
        warnings.append("cos(sigma) = 0: conormal invariants vanish; the "
                        "constant-conormal condition pipeline will reject "
                        "this pair")
    if phase is None:
        candidates = [0.0, 0.3, -0.3, 0.6, -0.6, 0.9, -0.9, 1.2, -1.2,
                      1.8, -1.8, 2.4, -2.4]
        phase = max(candidates,
                    key=lambda c: _classical_phase_margin(dom, beta, c))
    phase = float(phase)
    if _classical_phase_margin(dom, beta, phase) < 1e-3:
        raise ConstructionFailed(
            f"classical pair: transform angle degenerates on the domain "
            f"(sigma={sigma}, phase={phase}); shrink the domain or move "
            "the phase")
    scale = L / math.sin(sigma)
    L0 = math.sin(sigma)

    def base_frame(u, v, k):
        U, V = _charts(u, v, k)
        x = U + V
        y = U - V
        s = jsech(x)
        r = [s * jcos(y), s * jsin(y), x - jtanh(x)]
        return U, V, x, r

    def f_ev(u, v, k):
        _, _, _, r = base_frame(u, v, k)
        return v_scale(r, scale)

    def fhat_ev(u, v, k):
        U, V, x, r = base_frame(u, v, k + 1)
        w, _, th = _soliton_angle(U, V, beta, phase)
        ru = [c.du() for c in r]
        rv = [c.dv() for c in r]
        co, so = jcos(w), jsin(w)
        e1 = ru
        e2 = v_scale(v_sub(rv, v_scale(ru, co)), jrecip(so))
        t = v_add(v_scale(e1, jcos(th)), v_scale(e2, jsin(th)))
        out = v_add(r, v_scale(t, L0))
        return [c.truncated(k) for c in v_scale(out, scale)]

    def nhat_ev(u, v, k):
        U, V, x, r = base_frame(u, v, k + 1)
        w, _, th = _soliton_angle(U, V, beta, phase)
        ru = [c.du() for c in r]
        rv = [c.dv() for c in r]
        co, so = jcos(w), jsin(w)
        e1 = ru
        e2 = v_scale(v_sub(rv, v_scale(ru, co)), jrecip(so))
        cr = v_cross(ru, rv)
        n = v_scale(cr, -jpow(v_dot(cr, cr), -0.5))
        m = v_sub(v_scale(e1, jsin(th)), v_scale(e2, jcos(th)))
        out = v_add(v_scale(n, math.cos(sigma)), v_scale(m, math.sin(sigma)))
        return [c.truncated(k) for c in out]

    def n_ev(u, v, k):
        _, _, _, r = base_frame(u, v, k + 1)
        ru = [c.du() for c in r]
        rv = [c.dv() for c in r]
        cr = v_cross(ru, rv)
        n = v_scale(cr, -jpow(v_dot(cr, cr), -0.5))
        return [c.truncated(k) for c in n]

    f = SurfaceMap(dom, f_ev, label=f"classical-base(sigma={sigma:.4g})")
    fhat = SurfaceMap(dom, fhat_ev,
                      label=f"classical-transform(sigma={sigma:.4g})")
    xi = TransversalField(n_ev, provenance="euclidean-unit-normal",
                          label="n[classical]")
    xihat = TransversalField(nhat_ev, provenance="euclidean-unit-normal",
                             label="nhat[classical]")
    pair = SurfacePair(f, fhat, xi, xihat,
                       label=f"classical(sigma={sigma:.4g}, L={L:.4g})",
                       warnings=warnings,
                       meta={"sigma": sigma, "L": L, "beta": beta,
                             "phase": phase, "scale": scale,
                             "A": math.cos(sigma),
                             "H": -math.sin(sigma) ** 2 / L ** 2})
    _validate_classical(pair)
    return pair


def _validate_classical(pair: SurfacePair) -> None:
    sigma = pair.meta["sigma"]
    L = pair.meta["L"]
    worst = 0.0
    for p in pair.domain.grid(3, 3):
        u, v = p
        F, fu, fv = pair.f.frame(u, v, 2)
        Fh, fhu, fhv = pair.fhat.frame(u, v, 2)
        n = v_values(pair.xi.evaluate(u, v, 0))
        nh = v_values(pair.xihat.evaluate(u, v, 0))
        d = v_values(Fh) - v_values(F)
        checks = [
            abs(np.linalg.norm(d) - L),
            abs(float(d @ n)) / L,
            abs(float(d @ nh)) / L,
            abs(float(n @ nh) - math.cos(sigma)),
            abs(float(n @ n) - 1.0),
            abs(float(nh @ nh) - 1.0),
            abs(float(v_values(fhu) @ nh)),
            abs(float(v_values(fhv) @ nh)),
        ]
        worst = max(worst, max(checks))
    if worst > VALIDATION_TOL:
        raise ConstructionFailed(
            f"classical pair self-validation residual {worst:.3e}")


# ---------------------------------------------------------------------------
# ruled-shift pair (rank-1 spherical representation, all other conditions
# holding through a gauged pair of transversals)


def _build_ruled_shift_pair(**kw) -> SurfacePair:
    b = float(kw.get("pitch", 1.0))
    c = float(kw.get("shift", 0.6))
    A0 = float(kw.get("A0", 0.5))
    Ah0 = float(kw.get("Ahat0", 0.5))
    dom = kw.get("domain") or Rect(0.2, 1.4, 0.5, 1.5)
    if b == 0 or c == 0:
        raise ParamOutOfRange("pitch and shift must be nonzero")
    if A0 == 0 or Ah0 == 0 or abs(A0 * Ah0 - 1.0) < 1e-9:
        raise ParamOutOfRange("need A0, Ahat0 nonzero with A0*Ahat0 != 1")

    def f_ev(u, v, k):
        U, V = _charts(u, v, k)
        return [V * jcos(U), V * jsin(U), U * b]

    def fhat_ev(u, v, k):
        U, V = _charts(u, v, k)
        Vc = V + c
        return [Vc * jcos(U), Vc * jsin(U), U * b]

    def normal(U, V):
        R = jsqrt(V * V + b * b)
        inv = jrecip(R)
        return [b * jsin(U) * inv, -b * jcos(U) * inv, V * inv]

    def gauge(u, v, k):
        """(ahat, r) with xihat = ahat q_u + r nhat, A = A0, Ahat = Ah0."""
        U, V = _charts(u, v, k)
        n = normal(U, V)
        nh = normal(U, V + c)
        qu = [-c * jsin(U), c * jcos(U), jet_const(0.0, k)]
        C = v_dot(n, nh)
        m11 = v_dot(n, qu)
        m21 = v_dot(nh, qu)
        ahat, r = solve2(m11, C, m21, jet_const(1.0, k), A0, C * (1.0 / Ah0))
        return n, nh, qu, ahat, r

    def xi_ev(u, v, k):
        U, V = _charts(u, v, k)
        return normal(U, V)

    def xihat_ev(u, v, k):
        _, nh, qu, ahat, r = gauge(u, v, k)
        return v_add(v_scale(qu, ahat), v_scale(nh, r))

    f = SurfaceMap(dom, f_ev, label="ruled-base")
    fhat = SurfaceMap(dom, fhat_ev, label="ruled-shift")
    pair = SurfacePair(
        f, fhat, TransversalField(xi_ev, label="n[ruled]"),
        TransversalField(xihat_ev, label="gauged[ruled]"),
        label=f"ruled-shift(b={b:.3g}, c={c:.3g})",
        meta={"A": A0, "Ahat": Ah0, "pitch": b, "shift": c})
    _validate_generic(pair, expect_A=(A0, Ah0))
    return pair


def _validate_generic(pair: SurfacePair, expect_A=None,
                      tol: float = VALIDATION_TOL) -> None:
    worst = 0.0
    for p in pair.domain.grid(3, 3):
        u, v = p
        F, fu, fv = pair.f.frame(u, v, 1)
        Fh, fhu, fhv = pair.fhat.frame(u, v, 1)
        xi = pair.xi.evaluate(u, v, 0)
        xih = pair.xihat.evaluate(u, v, 0)
        d = v_values(Fh) - v_values(F)
        sep = np.linalg.norm(d)
        cr = v_values(v_cross(fu, fv))
        crh = v_values(v_cross(fhu, fhv))
        worst = max(worst,
                    abs(float(d @ cr)) / (sep * np.linalg.norm(cr)),
                    abs(float(d @ crh)) / (sep * np.linalg.norm(crh)))
        if expect_A is not None:
            nu = solve3([[jet_smooth_value(fu[i]), jet_smooth_value(fv[i]),
                          jet_smooth_value(xi[i])] for i in range(3)],
                        [0.0, 0.0, 1.0])
            nuh = solve3([[jet_smooth_value(fhu[i]), jet_smooth_value(fhv[i]),
                           jet_smooth_value(xih[i])] for i in range(3)],
                         [0.0, 0.0, 1.0])
            A = sum(nu[i] * jet_smooth_value(xih[i]) for i in range(3))
            Ah = sum(nuh[i] * jet_smooth_value(xi[i]) for i in range(3))
            worst = max(worst, abs(A - expect_A[0]), abs(Ah - expect_A[1]))
    if worst > tol:
        raise ConstructionFailed(
            f"{pair.label}: self-validation residual {worst:.3e}")


# ---------------------------------------------------------------------------
# focal pair of a tangent line congruence (rank-2 generic congruences)


def _focal_transform(f_ev: Callable, X_ev: Callable) -> Callable:
    """Second focal sheet of the congruence of lines through f along the
    tangent field X: fhat = f + t X with t the nonzero root of
    det(d(f + tX)) dropping rank."""

    def ev(u, v, k):
        F = f_ev(u, v, k + 1)
        X = X_ev(u, v, k + 1)
        fu = [c.du() for c in F]
        fv = [c.dv() for c in F]
        Xu = [c.du() for c in X]
        Xv = [c.dv() for c in X]
        a = det3(Xu, Xv, X)
        bq = det3(fu, Xv, X) + det3(Xu, fv, X)
        t = -bq * jrecip(a)
        out = v_add(F, v_scale(X, t))
        return [c.truncated(k) for c in out]

    return ev


def _build_revolution_congruence_pair(**kw) -> SurfacePair:
    chi = float(kw.get("chi", 0.7))
    amp = float(kw.get("amp", 0.15))
    A0 = float(kw.get("A0", 0.6))
    Ah0 = float(kw.get("Ahat0", 0.7))
    b0 = float(kw.get("b0", 0.0))
    dom = kw.get("domain") or Rect(0.3, 1.5, 0.7, 1.4)
    if not (0.05 < chi < math.pi / 2 - 0.05):
        raise ParamOutOfRange("chi must stay inside (0.05, pi/2 - 0.05)")
    if A0 == 0 or Ah0 == 0 or abs(A0 * Ah0 - 1.0) < 1e-9:
        raise ParamOutOfRange("need A0, Ahat0 nonzero with A0*Ahat0 != 1")

    def f_ev(u, v, k):
        U, V = _charts(u, v, k)
        R = 1.0 + amp * jcos(2.0 * V)
        return [R * jsin(V) * jcos(U), R * jsin(V) * jsin(U), R * jcos(V)]

    def X_ev(u, v, k):
        F = f_ev(u, v, k + 1)
        fu = [c.du() for c in F]
        fv = [c.dv() for c in F]
        e_mer = v_scale(fv, jpow(v_dot(fv, fv), -0.5))
        e_phi = v_scale(fu, jpow(v_dot(fu, fu), -0.5))
        X = v_add(v_scale(e_mer, math.cos(chi)),
                  v_scale(e_phi, math.sin(chi)))
        return [c.truncated(k) for c in X]

    fhat_ev = _focal_transform(f_ev, X_ev)

    def pieces(u, v, k):
        F = f_ev(u, v, k + 2)
        Fh = fhat_ev(u, v, k + 1)
        d = v_sub([c.truncated(k + 1) for c in Fh],
                  [c.truncated(k + 1) for c in F])
        qu = [c.du() for c in d]
        qv = [c.dv() for c in d]
        fu = [c.du() for c in F]
        fv = [c.dv() for c in F]
        cr = v_cross(fu, fv)
        n = v_scale(cr, jpow(v_dot(cr, cr), -0.5))
        fhu = [c.du() for c in Fh]
        fhv = [c.dv() for c in Fh]
        crh = v_cross(fhu, fhv)
        nh = v_scale(crh, jpow(v_dot(crh, crh), -0.5))
        return ([c.truncated(k) for c in qu], [c.truncated(k) for c in qv],
                [c.truncated(k) for c in n], [c.truncated(k) for c in nh])

    def xi_ev(u, v, k):
        qu, qv, _, _ = pieces(u, v, k)
        return v_add(qu, v_scale(qv, b0))

    def xihat_ev(u, v, k):
        qu, qv, n, nh = pieces(u, v, k)
        xi = v_add(qu, v_scale(qv, b0))
        # A = <n, xihat>/<n, xi> = A0 and Ahat = <nh, xi>/<nh, xihat> = Ah0
        a11 = v_dot(n, qu)
        a12 = v_dot(n, qv)
        rhs1 = v_dot(n, xi) * A0
        a21 = v_dot(nh, qu) * Ah0
        a22 = v_dot(nh, qv) * Ah0
        rhs2 = v_dot(nh, xi)
        ahat, bhat = solve2(a11, a12, a21, a22, rhs1, rhs2)
        return v_add(v_scale(qu, ahat), v_scale(qv, bhat))

    f = SurfaceMap(dom, f_ev, label=f"revolution-base(amp={amp:.3g})")
    fhat = SurfaceMap(dom, fhat_ev, label=f"revolution-focal(chi={chi:.3g})")
    pair = SurfacePair(
        f, fhat, TransversalField(xi_ev, label="span-gauge"),
        TransversalField(xihat_ev, label="span-gauge-hat"),
        label=f"revolution-congruence(chi={chi:.3g}, amp={amp:.3g})",
        meta={"A": A0, "Ahat": Ah0, "chi": chi, "amp": amp})
    _validate_generic(pair, expect_A=(A0, Ah0))
    return pair


def _build_parallel_pair(**kw) -> SurfacePair:
    """Tilted congruence over the classical base surface with a shared
    normal transversal; tilt 0 is the classical congruence itself."""
    sigma = float(kw.get("sigma", math.pi / 3))
    L = float(kw.get("L", 1.0))
    tilt = float(kw.get("tilt", 0.0))
    lambda0 = float(kw.get("lambda0", 1.5))
    if abs(tilt) > 0.5:
        raise ParamOutOfRange("tilt must stay in [-0.5, 0.5]")
    if lambda0 == 0:
        raise ParamOutOfRange("lambda0 must be nonzero")
    classical = _build_classical_pair(sigma=sigma, L=L,
                                      phase=kw.get("phase"),
                                      domain=kw.get("domain"))
    f = classical.f
    fhat_cl = classical.fhat
    n_field = classical.xi

    def X_ev(u, v, k):
        F = f.evaluate(u, v, k)
        Fh = fhat_cl.evaluate(u, v, k)
        d = v_sub(Fh, F)
        Td = v_scale(d, 1.0 / L)
        n = n_field.evaluate(u, v, k)
        Tp = v_cross(n, Td)
        return v_add(v_scale(Td, math.cos(tilt)), v_scale(Tp, math.sin(tilt)))

    if abs(tilt) < 1e-14:
        fhat_ev = lambda u, v, k: fhat_cl.evaluate(u, v, k)
    else:
        fhat_ev = _focal_transform(
            lambda u, v, k: f.evaluate(u, v, k), X_ev)
    fhat = SurfaceMap(f.domain, fhat_ev,
                      label=f"tilted-transform(tilt={tilt:.3g})")

    def xihat_ev(u, v, k):
        return v_scale(n_field.evaluate(u, v, k), 1.0 / lambda0)

    pair = SurfacePair(
        f, fhat, n_field,
        TransversalField(xihat_ev, label="n/lambda0"),
        label=f"parallel-tilted(sigma={sigma:.3g}, tilt={tilt:.3g})",
        meta={"sigma": sigma, "L": L, "tilt": tilt, "lambda0": lambda0})
    _validate_generic(pair)
    return pair


# ---------------------------------------------------------------------------
# condition spoilers for the classical pair


_SPOILER_DOC = {
    1: "constant ambient offset of the transform (kills bitangency only)",
    2: "ruled-shift pair (rank-1 spherical representation)",
    3: "both transversals equal (kills W != 0 only)",
    4: "chart-dependent rescaling of xihat (kills constancy only)",
    5: "revolution-congruence pair (non-conformal congruence)",
    6: "transversal slid along the congruence (kills volume balance only)",
    7: "independent chart rescalings of the two normal components",
}


def _build_spoiler(**kw) -> SurfacePair:
    cond = int(kw["condition"])
    sigma = float(kw.get("sigma", math.pi / 3))
    L = float(kw.get("L", 1.0))
    if cond == 2:
        return _build_ruled_shift_pair()
    if cond == 5:
        return _build_revolution_congruence_pair()
    base = _build_classical_pair(sigma=sigma, L=L, phase=kw.get("phase"),
                                 domain=kw.get("domain"))
    n, nh = base.xi, base.xihat
    f, fhat = base.f, base.fhat
    label = f"classical-spoiler-{cond}"
    meta = dict(base.meta, spoiled=cond, note=_SPOILER_DOC[cond])

    if cond == 1:
        eps = float(kw.get("offset", 2e-7)) * L
        E = np.array([1.0, 2.0, 3.0]) / math.sqrt(14.0)

        def fhat_ev(u, v, k):
            F = fhat.evaluate(u, v, k)
            return [F[0] + eps * E[0], F[1] + eps * E[1], F[2] + eps * E[2]]

        return SurfacePair(f, SurfaceMap(f.domain, fhat_ev,
                                         label=fhat.label + "+offset"),
                           n, nh, label=label, meta=meta)
    if cond == 3:
        return SurfacePair(f, fhat, n, n, label=label, meta=meta)
    if cond == 4:
        def xihat_ev(u, v, k):
            U = lift_variable(u, "u", k)
            return v_scale(nh.evaluate(u, v, k), 1.0 + 0.1 * U)

        return SurfacePair(f, fhat, n,
                           TransversalField(xihat_ev, label="scaled-nhat"),
                           label=label, meta=meta)
    if cond == 6:
        lam = 0.5 / L

        def xi_ev(u, v, k):
            d = v_sub(fhat.evaluate(u, v, k), f.evaluate(u, v, k))
            return v_add(n.evaluate(u, v, k), v_scale(d, lam))

        return SurfacePair(f, fhat,
                           TransversalField(xi_ev, label="n+lam*d"), nh,
                           label=label, meta=meta)
    if cond == 7:
        eps = float(kw.get("eps", 0.3))
        cs, ss2 = math.cos(sigma), math.sin(sigma) ** 2

        def combo(u, v, k, hatted):
            U, V = _charts(u, v, k)
            P = 1.0 + eps * U
            Q = 1.0 + eps * V
            nv = n.evaluate(u, v, k)
            nhv = nh.evaluate(u, v, k)
            if not hatted:
                a = (P - Q * cs * cs) * (1.0 / ss2)
                b = (Q - P) * (cs / ss2)
            else:
                a = (P - Q) * (cs / ss2)
                b = (Q - P * cs * cs) * (1.0 / ss2)
            return v_add(v_scale(nv, a), v_scale(nhv, b))

        return SurfacePair(
            f, fhat,
            TransversalField(lambda u, v, k: combo(u, v, k, False),
                             label="P-gauge"),
            TransversalField(lambda u, v, k: combo(u, v, k, True),
                             label="Q-gauge"),
            label=label, meta=meta)
    raise ParamOutOfRange(f"condition must be 1..7, got {cond}")


# ---------------------------------------------------------------------------
# manufactured normal-form states


def make_a00_state(kind: str = "symmetric", W: float = 1.3) -> A00State:
    """Closed-form solutions of the normal-form system.

    ``symmetric``: H constant, gamma = log(2 k1 u + c1)/2 - log(c2 - 2 k2 v)/2
    gives alpha = beta = 0 (both connections locally symmetric).
    ``asymmetric``: gamma = k u + b(v), H = C exp(4 k u) satisfies the full
    system with alpha, beta genuinely non-constant.
    """
    dom = Rect(0.1, 0.9, 0.1, 0.9)
    if kind == "symmetric":
        k1, c1, k2, c2 = 0.7, 1.2, 0.4, 1.9
        H0 = 1.7

        def gamma(u, v, k):
            U, V = _charts(u, v, k)
            return 0.5 * jlog(2.0 * k1 * U + c1) - 0.5 * jlog(c2 - 2.0 * k2 * V)

        zero = lambda u, v, k: jet_const(0.0, k)
        Hc = lambda u, v, k: jet_const(H0, k)
        return A00State(gamma, Hc, zero, zero, W, dom)
    if kind == "asymmetric":
        kk, k2, c2, C = 0.45, 0.35, 1.8, 0.9

        def gamma(u, v, k):
            U, V = _charts(u, v, k)
            return kk * U - 0.5 * jlog(c2 - 2.0 * k2 * V)

        def H(u, v, k):
            U, _ = _charts(u, v, k)
            return C * kk * kk * jexp(4.0 * kk * U)

        def alpha(u, v, k):
            U, V = _charts(u, v, k)
            return 2.0 * kk * kk * jexp(2.0 * kk * U) * jrecip(c2 - 2.0 * k2 * V)

        def beta(u, v, k):
            U, V = _charts(u, v, k)
            return (2.0 / C) * jexp(-2.0 * kk * U) * jrecip(c2 - 2.0 * k2 * V)

        return A00State(gamma, H, alpha, beta, W, dom)
    raise UnknownEntry(f"a00 state kind {kind!r}")


# ---------------------------------------------------------------------------
# registry


_SURFACES = {
    "elliptic-paraboloid": CatalogEntry(
        "elliptic-paraboloid", "surface",
        {"halfwidth": ParamSpec(1.0, "chart half-width", 0.1, 10.0)},
        _build_elliptic_paraboloid,
        "improper affine sphere; flat induced connection for xi = (0,0,1)"),
    "hyperbolic-paraboloid": CatalogEntry(
        "hyperbolic-paraboloid", "surface",
        {"halfwidth": ParamSpec(1.0, "chart half-width", 0.1, 10.0)},
        _build_hyperbolic_paraboloid,
        "saddle graph z = uv; indefinite fundamental form"),
    "unit-sphere": CatalogEntry(
        "unit-sphere", "surface", {}, _build_unit_sphere,
        "polar chart away from the poles; proper affine sphere, xi = -f"),
    "pseudosphere": CatalogEntry(
        "pseudosphere", "surface", {}, _build_pseudosphere,
        "tractroid with Gaussian curvature -1 away from the cusp rim"),
    "graph": CatalogEntry(
        "graph", "surface",
        {"expression": ParamSpec("u*u/2 + v*v/2",
                                 "z(u, v) over the chart square"),
         "halfwidth": ParamSpec(1.0, "chart half-width", 0.1, 10.0)},
        _build_graph,
        "graph surface from an elementary-function expression"),
}

_PAIRS = {
    "classical": CatalogEntry(
        "classical", "pair",
        {"sigma": ParamSpec(math.pi / 3, "normal angle, sin(sigma) != 0",
                            1e-3, math.pi - 1e-3),
         "L": ParamSpec(1.0, "congruence segment length", 1e-3, 100.0),
         "phase": ParamSpec(None, "soliton phase (auto-tuned when unset)"),
         "domain": ParamSpec(None, "chart rectangle override")},
        _build_classical_pair,
        "constant-curvature base and its congruence transform with "
        "Euclidean unit normals"),
    "ruled-shift": CatalogEntry(
        "ruled-shift", "pair",
        {"pitch": ParamSpec(1.0, "ruled-surface pitch", 0.1, 10.0),
         "shift": ParamSpec(0.6, "shift along the rulings", 0.05, 5.0),
         "A0": ParamSpec(0.5, "target conormal invariant A"),
         "Ahat0": ParamSpec(0.5, "target conormal invariant Ahat"),
         "domain": ParamSpec(None, "chart rectangle override")},
        _build_ruled_shift_pair,
        "same ruled surface shifted along its rulings; rank-1 spherical "
        "representation with every other congruence condition intact"),
    "revolution-congruence": CatalogEntry(
        "revolution-congruence", "pair",
        {"chi": ParamSpec(0.7, "tilt of the tangent line field",
                          0.05, math.pi / 2 - 0.05),
         "amp": ParamSpec(0.15, "radial profile modulation (0 = sphere, "
                          "which is exactly conformal)", 0.0, 0.4),
         "A0": ParamSpec(0.6, "target conormal invariant A"),
         "Ahat0": ParamSpec(0.7, "target conormal invariant Ahat"),
         "b0": ParamSpec(0.0, "gauge freedom in the span basis"),
         "domain": ParamSpec(None, "chart rectangle override")},
        _build_revolution_congruence_pair,
        "revolution surface and the second focal sheet of a tilted tangent "
        "congruence; rotationally symmetric, non-conformal unless the "
        "profile is the sphere"),
    "parallel-tilted": CatalogEntry(
        "parallel-tilted", "pair",
        {"sigma": ParamSpec(math.pi / 3, "angle of the underlying classical "
                            "pair", 1e-3, math.pi - 1e-3),
         "L": ParamSpec(1.0, "congruence length", 1e-3, 100.0),
         "tilt": ParamSpec(0.0, "congruence tilt (0 = classical)",
                           -0.5, 0.5),
         "lambda0": ParamSpec(1.5, "xihat = xi / lambda0"),
         "phase": ParamSpec(None, "soliton phase"),
         "domain": ParamSpec(None, "chart rectangle override")},
        _build_parallel_pair,
        "classical base with a tilted focal congruence and a shared normal "
        "transversal (parallel fields, rank 2)"),
    "classical-spoiler": CatalogEntry(
        "classical-spoiler", "pair",
        {"condition": ParamSpec(1, "target condition 1..7", 1, 7),
         "sigma": ParamSpec(math.pi / 3, "angle", 1e-3, math.pi - 1e-3),
         "L": ParamSpec(1.0, "length", 1e-3, 100.0),
         "offset": ParamSpec(2e-7, "relative offset for condition 1"),
         "eps": ParamSpec(0.3, "gauge modulation for condition 7"),
         "phase": ParamSpec(None, "soliton phase"),
         "domain": ParamSpec(None, "chart rectangle override")},
        _build_spoiler,
        "classical pair modified to break exactly one congruence "
        "condition"),
}


def list_entries() -> list[CatalogEntry]:
    return [*_SURFACES.values(), *_PAIRS.values()]


def make_surface(name: str, **params) -> SurfaceMap:
    entry = _SURFACES.get(name)
    if entry is None:
        raise UnknownEntry(
            f"unknown surface {name!r}; available: {sorted(_SURFACES)}")
    return entry.builder(**_check_params(entry, params))


def make_pair(name: str, **params) -> SurfacePair:
    entry = _PAIRS.get(name)
    if entry is None:
        raise UnknownEntry(
            f"unknown pair {name!r}; available: {sorted(_PAIRS)}")
    return entry.builder(**_check_params(entry, params))


def make_classical_pair(sigma: float, L: float, **kw) -> SurfacePair:
    return make_pair("classical", sigma=sigma, L=L, **kw)


def make_parallel_transversal_pair(**kw) -> SurfacePair:
    return make_pair("parallel-tilted", **kw)
