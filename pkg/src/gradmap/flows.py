"""Moment-map inversion, orbit limits and the norm-square gradient flow."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .convexgeom import cone, cone_membership, min_norm_point, polytope, polytope_membership
from .errors import MaxIterations, NonMonotone, TargetNotInRelint, ZeroDirection, ZeroVector
from .linalg import exp_action, nullspace
from .repmodel import ProjPoint, proj_point

__all__ = [
    "NewtonResult",
    "invert_moment",
    "projective_limit",
    "FlowTrace",
    "norm_square_flow",
    "orbit_min_norm",
    "support_indices",
]

ARMIJO_C1 = 1e-4
BACKTRACK = 0.5
HESS_REG = 1e-12
LEVEL_TOL = 1e-9
MONOTONE_SLACK = 1e-12


def support_indices(R, x, tol_supp=1e-9):
    c = R.W.coords(R.vector(x))
    nrm = np.linalg.norm(c)
    if nrm == 0:
        return ()
    return tuple(int(i) for i in np.nonzero(np.abs(c) > tol_supp * nrm)[0])


@dataclass
class NewtonResult:
    """Outcome of :func:`invert_moment`.

    ``xi`` is in ``a``-coordinates and lies in ``b``, the complement of the
    stabilizer ``a_x`` (columns of ``b_basis``); ``point`` is ``exp(xi) x``.
    """

    xi: np.ndarray
    iterations: int
    residual: float
    converged: bool
    point: np.ndarray
    b_basis: np.ndarray
    variant: str = "linear"


def _complement(R, K):
    # orthogonal complement of span(K) with respect to the a-inner product
    m = R.rank
    if K.shape[1] == 0:
        return np.eye(m)
    return nullspace((R.a_gram @ K).T)


def invert_moment(R, x, c, tol=1e-10, variant="linear", max_iter=100, tol_supp=1e-9):
    """Find ``a = exp(xi)`` with ``mu_a(a x) = c`` by damped Newton.

    Minimizes ``f(xi) = Psi(x, exp xi) - <c, xi>`` over ``b``; ``f`` is
    strictly convex and proper there, so a solution exists exactly when
    ``c`` lies in the relative interior of ``C_I`` (``P_I`` for the
    projective variant, with ``Psi`` replaced by the projective
    Kempf-Ness function).

    Raises
    ------
    TargetNotInRelint
        When ``c`` is not in the open cone (polytope).
    MaxIterations
        When Newton fails to reach ``tol``; ``best`` carries the last result.
    """
    if variant not in ("linear", "projective"):
        raise ValueError(f"unknown variant {variant!r}")
    x = R.vector(x)
    coords = R.W.coords(x)
    I = support_indices(R, x, tol_supp)
    if not I:
        raise ZeroVector("invert_moment needs x != 0")
    c = np.asarray(c, dtype=float).reshape(-1)
    F = R.weights[list(I)]
    E = cone(F) if variant == "linear" else polytope(F)
    member = (cone_membership if variant == "linear" else polytope_membership)(E, c, "relint")
    if not member.member:
        raise TargetNotInRelint("target is not in the relative interior of the image")
    if variant == "linear":
        K = nullspace(F)
    else:
        K = nullspace(F[1:] - F[0]) if len(F) > 1 else np.eye(R.rank)
    B = _complement(R, K)
    mass = coords[list(I)] ** 2
    if variant == "projective":
        mass = mass / mass.sum()
    FB = F @ B
    cB = c @ B

    def evaluate(eta):
        with np.errstate(over="ignore", invalid="ignore"):
            return _evaluate(eta)

    def _evaluate(eta):
        lev = FB @ eta
        if variant == "linear":
            e = mass * np.exp(2.0 * lev)
            f = 0.5 * np.sum(e - mass) - cB @ eta
            g = e @ FB - cB
            H = 2.0 * (FB.T * e) @ FB
            mu = e @ F
        else:
            z = 2.0 * lev + np.log(mass)
            top = z.max()
            w = np.exp(z - top)
            s = w.sum()
            w /= s
            f = 0.5 * (top + math.log(s)) - cB @ eta
            mean = w @ FB
            g = mean - cB
            D = FB - mean
            H = 2.0 * (D.T * w) @ D
            mu = w @ F
        return f, g, H, mu

    eta = np.zeros(B.shape[1])
    f, g, H, mu = evaluate(eta)
    resid = R.a_dual_norm(mu - c)
    it = 0
    while resid > tol and it < max_iter:
        it += 1
        Hr = H + HESS_REG * np.eye(len(eta))
        step = -np.linalg.solve(Hr, g)
        slope = g @ step
        s = 1.0
        while True:
            trial = eta + s * step
            ft, gt, Ht, mut = evaluate(trial)
            if np.isfinite(ft) and ft <= f + ARMIJO_C1 * s * slope:
                break
            # near the minimum f is flat to roundoff; fall back to gradient decrease
            if (np.isfinite(ft) and ft - f <= 1e-14 * max(1.0, abs(f))
                    and np.linalg.norm(gt) < np.linalg.norm(g)):
                break
            s *= BACKTRACK
            if s < 1e-16:
                break
        if s < 1e-16:
            break
        eta, f, g, H, mu = trial, ft, gt, Ht, mut
        resid = R.a_dual_norm(mu - c)
    xi = B @ eta
    point = exp_action(R.W, xi, 1.0, x)
    res = NewtonResult(xi, it, float(resid), resid <= tol, point, B, variant)
    if not res.converged:
        raise MaxIterations(f"Newton stopped at residual {resid:.3e} after {it} iterations", res)
    return res


@dataclass
class ProjectiveLimit:
    """``lim_{t -> inf} [exp(t xi) x]`` with its level data.

    ``j`` is the 1-based position of the attained level among the distinct
    values of ``alpha_i(xi)`` over all weights in decreasing order;
    ``level`` is the value itself, which equals the maximal weight.
    """

    j: int
    limit: ProjPoint
    level: float
    kept: tuple
    numeric_error: float

    def __iter__(self):
        return iter((self.j, self.limit))


def _distinct_desc(vals, tol):
    out = []
    for v in sorted(vals, reverse=True):
        if not out or out[-1] - v > tol:
            out.append(v)
    return out


def projective_limit(R, p, xi, t_check=40.0, tol_supp=1e-9):
    """Limit of ``exp(t xi)[x]`` obtained by zeroing the lower levels.

    Components of ``x`` whose level ``alpha_i(xi)`` lies strictly below the
    maximum over the support are dropped. The result is compared with the
    normalized ``exp(t_check xi) x``; the difference is ``numeric_error``.
    """
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if not np.any(xi):
        raise ZeroDirection("projective_limit needs xi != 0")
    x = R.vector(p)
    I = support_indices(R, x, tol_supp)
    if not I:
        raise ZeroVector("projective_limit needs x != 0")
    levels = R.weights @ xi
    scale = max(1.0, float(np.max(np.abs(levels))))
    top = max(levels[i] for i in I)
    kept = tuple(i for i in I if levels[i] >= top - LEVEL_TOL * scale)
    c = R.W.coords(x)
    lim = R.W.basis[:, list(kept)] @ c[list(kept)]
    limit = proj_point(lim)
    j = 1 + sum(1 for v in _distinct_desc(levels, LEVEL_TOL * scale) if v > top + LEVEL_TOL * scale)
    num = proj_point(_exp_normalized(R, xi, t_check, x))
    err = float(np.linalg.norm(num.x - limit.x))
    return ProjectiveLimit(j, limit, float(top), kept, err)


def _exp_normalized(R, xi, t, x):
    # exp(t xi) x rescaled by the dominant exponential to avoid overflow
    c = R.W.coords(x)
    lev = t * (R.weights @ xi)
    lev = lev - np.max(lev[c != 0])
    return R.W.basis @ (np.exp(lev) * c)


@dataclass
class FlowTrace:
    """Record of a norm-square flow run.

    ``points`` are unit representatives, ``f_values`` the values of
    ``f = 1/2 |mu~|^2`` and ``grad_norms`` the lengths of the flow
    velocity. ``lift_error`` is the largest distance between ``x(t)`` and
    the normalized ``g(t)^{-1} y`` from the co-integrated group element;
    ``lift_log_norms`` tracks ``log |g(t)^{-1} y|``.
    """

    times: np.ndarray
    points: np.ndarray
    f_values: np.ndarray
    grad_norms: np.ndarray
    limit: ProjPoint
    limit_mu_norm: float
    decay_estimate: Optional[float]
    converged: bool
    stationary: bool
    lift_error: float = 0.0
    lift_log_norms: Optional[np.ndarray] = None
    mode: str = "p"
    halvings: int = 0
    limit_mu: Optional[np.ndarray] = None

    @property
    def max_f_increase(self):
        if len(self.f_values) < 2:
            return 0.0
        return float(np.max(np.diff(self.f_values), initial=-np.inf))


class _Field:
    def __init__(self, R, use_p):
        if use_p:
            R.require_p()
            mats = R.spec.p_gens
            self.ginv = R.p_gram_inv
        else:
            mats = R.spec.abelian_gens
            self.ginv = R.a_gram_inv
        self.P = np.array(mats)

    def __call__(self, x):
        Px = self.P @ x
        phi = Px @ x
        coef = self.ginv @ phi
        Bx = coef @ Px
        v = -(Bx - (x @ Bx) * x)
        return v, coef, phi

    def beta(self, coef):
        return np.tensordot(coef, self.P, axes=1)


def norm_square_flow(R, y, dt=0.01, t_max=200.0, stop_tol=1e-10, use_p=None, lift=True,
                     adaptive=True, local_tol=1e-9, max_step=1.0, min_dt_factor=2.0 ** -20):
    """Integrate the negative gradient flow of ``f = 1/2 |mu~|^2`` on ``P(V)``.

    The velocity at a unit vector ``x`` is ``-(beta x - <beta x, x> x)``
    where ``beta`` is the element of ``p`` dual to ``mu~_p([x])`` (of ``a``
    when ``use_p`` is false or no ``p`` data exist). Classical RK4 with
    renormalization; a step that increases ``f`` is retried at half size.
    With ``lift`` the linear equation ``h' = -beta h`` for ``h = g^{-1}``
    runs alongside with the same stages.

    With ``adaptive`` the step starts at ``dt`` and is controlled by step
    doubling: a step is accepted when one full and two half steps agree
    within ``local_tol`` (on ``x`` and on the normalized ``h y``), and may
    grow up to ``max_step``. Without it every step has length ``dt``.

    Raises
    ------
    NonMonotone
        If ``f`` still increases after halving down to ``min_dt_factor * dt``.
    """
    if use_p is None:
        use_p = R.has_p
    field_ = _Field(R, use_p)
    x = proj_point(R.vector(y)).x
    y0 = x.copy()
    n = len(x)
    h = np.eye(n)
    log_scale = 0.0

    def rk4(x, h, s):
        k1, c1, _ = field_(x)
        k2, c2, _ = field_(x + 0.5 * s * k1)
        k3, c3, _ = field_(x + 0.5 * s * k2)
        k4, c4, _ = field_(x + s * k3)
        xn = x + s / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        xn /= np.linalg.norm(xn)
        if not lift:
            return xn, h
        b1, b2, b3, b4 = (field_.beta(cc) for cc in (c1, c2, c3, c4))
        m1 = -b1 @ h
        m2 = -b2 @ (h + 0.5 * s * m1)
        m3 = -b3 @ (h + 0.5 * s * m2)
        m4 = -b4 @ (h + s * m3)
        return xn, h + s / 6.0 * (m1 + 2 * m2 + 2 * m3 + m4)

    def direction(h):
        hy = h @ y0
        return hy / np.linalg.norm(hy)

    v, coef, phi = field_(x)
    f = 0.5 * float(coef @ phi)
    times, pts, fs, gn = [0.0], [x.copy()], [f], [float(np.linalg.norm(v))]
    lognorms = [0.0]
    lift_err = 0.0
    halvings = 0
    t = 0.0
    step = dt
    converged = gn[0] <= stop_tol
    stationary = converged
    while not converged and t < t_max - 1e-12:
        hstep = min(step, t_max - t)
        while True:
            if adaptive:
                x1, h1 = rk4(x, h, hstep)
                xm, hm = rk4(x, h, 0.5 * hstep)
                xn, hn = rk4(xm, hm, 0.5 * hstep)
                err = float(np.linalg.norm(xn - x1))
                if lift:
                    err = max(err, float(np.linalg.norm(direction(hn) - direction(h1))))
                grow = 4.0 if err == 0 else min(4.0, max(0.1, 0.9 * (local_tol / err) ** 0.2))
                if err > local_tol and hstep > dt * min_dt_factor:
                    hstep *= grow
                    continue
            else:
                xn, hn = rk4(x, h, hstep)
            vn, coefn, phin = field_(xn)
            fn = 0.5 * float(coefn @ phin)
            if fn <= f + MONOTONE_SLACK:
                break
            hstep *= 0.5
            halvings += 1
            if hstep < dt * min_dt_factor:
                raise NonMonotone(f"f increased by {fn - f:.3e} at t={t:.4f} after step halving")
        if lift:
            s = np.linalg.norm(hn)
            h = hn / s
            log_scale += math.log(s)
            hy = h @ y0
            nhy = np.linalg.norm(hy)
            lift_err = max(lift_err, float(np.linalg.norm(hy / nhy - xn)))
            lognorms.append(log_scale + math.log(nhy))
        t += hstep
        if adaptive:
            step = min(max_step, hstep * grow)
        x, v, f = xn, vn, fn
        times.append(t)
        pts.append(x.copy())
        fs.append(f)
        gn.append(float(np.linalg.norm(v)))
        converged = gn[-1] <= stop_tol

    pts = np.array(pts)
    limit = proj_point(x)
    _, coef, phi = field_(x)
    mu_norm = math.sqrt(max(float(coef @ phi), 0.0))
    decay = None if stationary else _decay(np.array(times), pts, x)
    return FlowTrace(np.array(times), pts, np.array(fs), np.array(gn), limit, mu_norm, decay,
                     converged, stationary, lift_err, np.array(lognorms) if lift else None,
                     "p" if use_p else "a", halvings, phi)


def _decay(times, pts, xinf):
    # slope of log d(x(t), x_inf) against log t over the tail
    d = np.linalg.norm(pts - xinf, axis=1)
    mask = (times > 0) & (d > 1e-13)
    tt, dd = times[mask], d[mask]
    if len(tt) < 4:
        return None
    half = len(tt) // 2
    tt, dd = tt[half:], dd[half:]
    if len(tt) < 3 or tt[0] == tt[-1]:
        return None
    slope = np.polyfit(np.log(tt), np.log(dd), 1)[0]
    return float(-slope)


MINNORM_FLOW = {"t_max": 1e6, "max_step": 1e5, "lift": False}


@dataclass
class MinNormReport:
    """``inf |mu~_a|`` over the closure of the torus orbit, two ways."""

    polytope_value: float
    polytope_point: np.ndarray
    flow_value: float
    flow_limit: ProjPoint
    discrepancy: float
    ok: bool
    support: tuple
    trace: FlowTrace = field(repr=False, default=None)

    @property
    def value(self):
        return self.polytope_value


def orbit_min_norm(R, p, tol=1e-4, flow_opts=None, tol_supp=1e-9):
    """Minimal gradient-map norm over the torus orbit closure of ``[x]``.

    The image of the orbit closure is ``P_I``, so (i) is the minimum-norm
    point of ``P_I`` in the dual metric, and (ii) is the limit of the
    norm-square flow of the torus. ``ok`` means the two agree within ``tol``.
    """
    x = R.vector(p)
    I = support_indices(R, x, tol_supp)
    if not I:
        raise ZeroVector("orbit_min_norm needs x != 0")
    P = polytope(R.weights[list(I)])
    point, value = min_norm_point(P, metric=R.a_gram_inv)
    # limits with mu~ = 0 on the boundary of P_I are approached like 1/t; a long
    # horizon is cheap there because the field vanishes to second order
    opts = dict(MINNORM_FLOW)
    opts.update(flow_opts or {})
    trace = norm_square_flow(R, x, use_p=False, **opts)
    disc = abs(value - trace.limit_mu_norm)
    return MinNormReport(float(value), np.asarray(point, dtype=float), trace.limit_mu_norm,
                         trace.limit, float(disc), disc <= tol, I, trace)
