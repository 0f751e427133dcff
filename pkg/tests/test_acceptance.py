"""Acceptance suite: twelve criteria, each printing one PASS/FAIL line.

Oracles are independent of the code under test where possible: scipy's
``expm`` for group actions, numpy's ``eigh`` for maximal weights, scipy's
``ConvexHull`` for areas and brute-force grids for closedness.

Run standalone with ``python3 tests/test_acceptance.py``.
"""

import itertools
import math
import sys
from fractions import Fraction

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.spatial import ConvexHull

from gradmap.convexgeom import (cone, cone_membership, enumerate_faces, halfspace_form,
                                is_closed_Copen, polytope, separating_functional)
from gradmap.flows import invert_moment, norm_square_flow, orbit_min_norm, projective_limit
from gradmap.gallery import binary_form_vector, build
from gradmap.repmodel import (build_representation, gradient_map_projective, kempf_ness,
                              kempf_ness_path, make_spec)
from gradmap.stability import (classify_point_linear, classify_point_projective,
                               destabilize_reductive, face_orbit_table, khull_sample,
                               maximal_weight, null_cone_decomposition)

BUILTINS = [
    "torus_gl(2)",
    "torus_gl(3)",
    "torus_sl(2)",
    "torus_sl(3)",
    "sl2_standard",
    "sl2_binary_forms(3)",
    "sl2_binary_forms(4)",
]

_REPS = {}


def rep(name, arithmetic="float"):
    if (name, arithmetic) not in _REPS:
        _REPS[name, arithmetic] = build_representation(build(name, arithmetic=arithmetic))
    return _REPS[name, arithmetic]


def report(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line, flush=True)
    return line


@pytest.fixture
def show(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print()
            report(n, ok, detail)
        assert ok, detail
    return emit


def _worse(worst, err):
    """Running maximum in which NaN counts as infinitely bad."""
    return max(worst, err) if not math.isnan(err) else math.inf


def _random_support_point(rng, n, p_keep=0.6):
    while True:
        x = rng.normal(size=n) * (rng.random(n) < p_keep)
        if np.any(x):
            return x


# --- 1 -----------------------------------------------------------------------

def _psi_oracle(R, x, xi, variant, t=1.0):
    """Kempf-Ness value from scipy's matrix exponential (complex t allowed)."""
    y = expm(t * R.a_element(xi).astype(complex)) @ x
    sq = np.sum(y * y)  # bilinear, so the complex step stays analytic
    if variant == "linear":
        return 0.5 * (sq - x @ x)
    return 0.5 * np.log(sq / (x @ x))


def criterion_1(samples=200):
    worst_cocycle = worst_oracle = worst_grad = 0.0
    min_fd2 = math.inf
    rng = np.random.default_rng(101)
    h = 1e-3
    for name in BUILTINS:
        R = rep(name)
        scale = 0.5 / max(1.0, np.abs(R.weights).max())
        for _ in range(samples):
            x = rng.normal(size=R.n)
            xi, eta = rng.normal(scale=scale, size=(2, R.rank))
            gx = (expm(R.a_element(xi)) @ x).real
            for v in ("linear", "projective"):
                lhs = kempf_ness(R, x, xi + eta, v)
                rhs = kempf_ness(R, gx, eta, v) + kempf_ness(R, x, xi, v)
                worst_cocycle = _worse(worst_cocycle, abs(lhs - rhs))
                worst_oracle = _worse(worst_oracle, abs(kempf_ness(R, x, xi, v) - _psi_oracle(R, x, xi, v).real))
                path = kempf_ness_path(R, x, xi, v)
                for t in (-1.0, 0.0, 0.7, 2.0):
                    fd2 = (path.value(t + h) - 2 * path.value(t) + path.value(t - h)) / h ** 2
                    min_fd2 = min(min_fd2, fd2) if not math.isnan(fd2) else -math.inf
                # derivative at 0 by complex step through expm, against <mu, xi>
                cs = _psi_oracle(R, x, xi, v, 1e-20j).imag / 1e-20
                mu = (gradient_map_projective(R, x) if v == "projective"
                      else np.array([x @ E @ x for E in R.spec.abelian_gens]))
                worst_grad = _worse(worst_grad, abs(cs - mu @ xi))
    ok = worst_cocycle <= 1e-10 and worst_oracle <= 1e-10 and min_fd2 >= -1e-8 and worst_grad <= 1e-10
    return ok, (f"cocycle {worst_cocycle:.1e}, value vs expm {worst_oracle:.1e}, "
                f"min FD second derivative {min_fd2:.1e}, gradient vs complex step {worst_grad:.1e}")


def test_criterion_01_kempf_ness_axioms(show):
    show(1, *criterion_1())


# --- 2 -----------------------------------------------------------------------

def criterion_2(samples=100):
    rng = np.random.default_rng(202)
    worst = 0.0
    failures = 0
    for name in BUILTINS:
        R = rep(name)
        for _ in range(samples):
            x = rng.normal(size=R.n)
            c = rng.exponential(size=R.n) @ R.weights
            try:
                res = invert_moment(R, x, c)
            except Exception:
                failures += 1
                continue
            y = expm(R.a_element(res.xi)) @ x
            mu = np.array([y @ E @ y for E in R.spec.abelian_gens])
            worst = _worse(worst, R.a_dual_norm(mu - c))
    G = rep("torus_gl(2)")
    closed = 0.0
    for _ in range(20):
        c = rng.uniform(0.1, 5.0, size=2)
        res = invert_moment(G, [1.0, 1.0], c)
        closed = max(closed, float(np.max(np.abs(res.xi - 0.5 * np.log(c)))))
    ok = failures == 0 and worst <= 1e-8 and closed <= 1e-10
    return ok, f"max residual {worst:.1e} ({failures} failures), GL(2) closed form error {closed:.1e}"


def test_criterion_02_moment_inversion(show):
    show(2, *criterion_2())


# --- 3 -----------------------------------------------------------------------

def _random_exact_rep(rng):
    while True:
        k = int(rng.integers(3, 6))
        W = rng.integers(-3, 4, size=(k, 3))
        if np.linalg.matrix_rank(W) == 3:
            gens = [[[Fraction(int(W[i, a])) if i == j else Fraction(0) for j in range(k)]
                     for i in range(k)] for a in range(3)]
            return build_representation(make_spec(gens, arithmetic="exact"))


def criterion_3(corpus=50):
    rng = np.random.default_rng(303)
    worst = 0.0
    bad_relint = 0
    faces = 0
    for _ in range(corpus):
        R = _random_exact_rep(rng)
        x = _random_support_point(rng, R.n)
        for row in face_orbit_table(R, x):
            faces += 1
            J = list(row.face.J)
            M = R.a_element(np.array([float(u) for u in row.face.witness_u]))
            # the generators are diagonal, so exp acts blockwise on the support coordinates
            S = np.nonzero(x)[0]
            num = np.zeros(R.n)
            num[S] = expm(40.0 * M[np.ix_(S, S)]) @ x[S]
            worst = _worse(worst, float(np.linalg.norm(num - row.v_F)))
            if J:
                mu = np.array([row.v_F @ E @ row.v_F for E in R.spec.abelian_gens])
                if not cone_membership(cone(R.weights[J]), mu, "relint").member:
                    bad_relint += 1
    ok = worst <= 1e-6 and bad_relint == 0
    return ok, f"{faces} faces, max |v_F - exp(40 xi) x| {worst:.1e}, relint failures {bad_relint}"


def test_criterion_03_face_limits(show):
    show(3, *criterion_3())


# --- 4 -----------------------------------------------------------------------

def _grid_closed(F):
    """Closed iff |exp(xi) x|^2 has its minimum inside radius 8 of the grid over radius 10."""
    g = np.linspace(-10.0, 10.0, 401)
    X, Y = np.meshgrid(g, g)
    r = np.hypot(X, Y)
    inside = r <= 10.0
    vals = np.zeros_like(X)
    for a, b in F:
        vals += np.exp(2.0 * (a * X + b * Y))
    inner = vals[r <= 8.0].min()
    annulus = vals[(r > 8.0) & inside].min()
    return inner <= annulus * (1 + 1e-12)


def criterion_4(trials=4):
    rng = np.random.default_rng(404)
    mismatches = 0
    checked = 0
    for _ in range(trials):
        weights = [(Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 4))),
                    Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 4)))) for _ in range(5)]
        for mask in itertools.product([0, 1], repeat=5):
            I = [i for i in range(5) if mask[i]]
            Ff = [tuple(float(v) for v in weights[i]) for i in I]
            if I:
                ours = is_closed_Copen(cone([weights[i] for i in I], exact=True))
                oracle = _grid_closed(Ff)
            else:
                # x = 0: the orbit is a point
                R0 = build_representation(make_spec([np.diag([1.0]), ]))
                ours = classify_point_linear(R0, [0.0]).cls == "closed_orbit"
                oracle = True
            checked += 1
            mismatches += ours != oracle
    return mismatches == 0, f"{checked} supports, {mismatches} mismatches"


def test_criterion_04_closedness(show):
    show(4, *criterion_4())


# --- 5 -----------------------------------------------------------------------

def criterion_5():
    details = []
    ok = True
    for name, m in (("torus_sl(3)", 21), ("sl2_standard", 41)):
        R = rep(name)
        D = null_cone_decomposition(R)
        g = np.linspace(-1.0, 1.0, m)
        bad = 0
        for pt in itertools.product(g, repeat=R.n):
            x = np.array(pt)
            bad += D.contains(R, x) != classify_point_linear(R, x).in_null_cone
        details.append(f"{name} {m}^{R.n} grid: {bad} mismatches")
        ok &= bad == 0
    R = rep("sl2_standard")
    lines = sorted(tuple(np.abs(np.round(c.H[:, 0], 15))) for c in null_cone_decomposition(R).components)
    axes = lines == [(0.0, 1.0), (1.0, 0.0)]
    ok &= axes
    details.append("sl2_standard components are the coordinate axes" if axes else f"components {lines}")
    return ok, "; ".join(details)


def test_criterion_05_null_cone(show):
    show(5, *criterion_5())


# --- 6 -----------------------------------------------------------------------

def _numeric_lambda(M, x, t=30.0, h=1e-3):
    # shifting M by its top eigenvalue s keeps expm finite and adds s to the slope
    s = float(np.linalg.eigvalsh(M).max())
    Ms = M - s * np.eye(len(M))
    lp = np.log(np.linalg.norm(expm((t + h) * Ms) @ x))
    lm = np.log(np.linalg.norm(expm((t - h) * Ms) @ x))
    return s + (lp - lm) / (2 * h)


def criterion_6(samples=100):
    rng = np.random.default_rng(606)
    worst = 0.0
    for name in BUILTINS:
        R = rep(name)
        for _ in range(samples):
            x = rng.normal(size=R.n)
            # integer directions keep distinct levels at least 1 apart
            xi = rng.choice([-3, -2, -1, 1, 2, 3], size=R.rank).astype(float)
            lam = maximal_weight(R, x, xi, "a")
            worst = _worse(worst, abs(lam - _numeric_lambda(R.a_element(xi), x)))
    R = rep("sl2_standard")
    worst_p = 0.0
    for _ in range(samples):
        x = rng.normal(size=2)
        th = rng.uniform(0, 2 * math.pi)
        xi = np.array([math.cos(th), math.sin(th)])
        lam = maximal_weight(R, x, xi, "p")
        worst_p = _worse(worst_p, abs(lam - _numeric_lambda(R.p_element(xi), x)))
    ok = worst <= 1e-6 and worst_p <= 1e-6
    return ok, f"torus directions {worst:.1e}, p directions on sl2_standard {worst_p:.1e}"


def test_criterion_06_maximal_weight(show):
    show(6, *criterion_6())


# --- 7 -----------------------------------------------------------------------

def _orbit_images(R, x, Xi):
    c = R.W.coords(x)
    L = Xi @ R.weights.T
    L = np.where(c != 0, L, -np.inf)
    L -= L.max(axis=1, keepdims=True)
    Y = (np.exp(L) * c) @ R.W.basis.T
    Y /= np.linalg.norm(Y, axis=1, keepdims=True)
    return np.stack([np.einsum("si,ij,sj->s", Y, E, Y) for E in R.spec.abelian_gens], axis=1)


def criterion_7(points=50, samples=1000):
    rng = np.random.default_rng(707)
    worst_slack = 0.0
    worst_vertex = 0.0
    vertices = 0
    for name in BUILTINS:
        R = rep(name)
        for _ in range(points):
            x = R.W.basis @ _random_support_point(rng, R.n)
            I = [i for i in range(R.n) if abs(R.W.coords(x)[i]) > 1e-9 * np.linalg.norm(x)]
            P = polytope(R.weights[I])
            Xi = rng.normal(scale=2.0, size=(samples, R.rank))
            viol = halfspace_form(P).violation(_orbit_images(R, x, Xi))
            worst_slack = _worse(worst_slack, float(viol.max()))
            for f in enumerate_faces(P):
                if f.dim != 0:
                    continue
                vertices += 1
                u = np.array([float(v) for v in f.witness_u])
                # a one-point polytope is exposed by u = 0 and attained at x itself
                lim = projective_limit(R, x, u).limit if np.any(u) else x
                mu = gradient_map_projective(R, lim)
                worst_vertex = _worse(worst_vertex, float(np.linalg.norm(mu - R.weights[I[f.J[0]]])))
    ok = worst_slack <= 1e-8 and worst_vertex <= 1e-6
    return ok, f"max membership slack {worst_slack:.1e}, {vertices} vertices, max vertex error {worst_vertex:.1e}"


def test_criterion_07_projective_image(show):
    show(7, *criterion_7())


# --- 8 -----------------------------------------------------------------------

def criterion_8(points=50):
    rng = np.random.default_rng(808)
    worst = 0.0
    for name in BUILTINS:
        R = rep(name)
        for _ in range(points):
            x = R.W.basis @ _random_support_point(rng, R.n)
            worst = _worse(worst, orbit_min_norm(R, x).discrepancy)
    S = rep("sl2_standard")
    a = orbit_min_norm(S, [1.0, 0.0])
    b = orbit_min_norm(S, [2.0, 1.0])
    named = (abs(a.polytope_value - 1) <= 1e-4 and abs(a.flow_value - 1) <= 1e-4
             and abs(b.polytope_value) <= 1e-4 and abs(b.flow_value) <= 1e-4)
    ok = worst <= 1e-4 and named
    return ok, (f"max discrepancy {worst:.1e}; [1:0] -> {a.polytope_value:.6g}/{a.flow_value:.6g}, "
                f"[2:1] -> {b.polytope_value:.3g}/{b.flow_value:.3g}")


def test_criterion_08_min_norm(show):
    show(8, *criterion_8())


# --- 9 -----------------------------------------------------------------------

QUARTICS = {
    "x^4": (1, 0, 0, 0, 0),
    "x^3y": (0, 1, 0, 0, 0),
    "x^2y^2": (0, 0, 1, 0, 0),
    "x^4+y^4": (1, 0, 0, 0, 1),
    "(x+y)^4": (1, 4, 6, 4, 1),
}


def _lambda_eigh(M, x, tol=1e-9):
    w, Q = np.linalg.eigh(M)
    c = Q.T @ x
    order = np.argsort(-w)
    w, c = w[order], c[order]
    k = 0
    while k < len(w):
        j = k
        while j + 1 < len(w) and abs(w[j + 1] - w[k]) <= 1e-9 * max(1.0, abs(w[k])):
            j += 1
        if np.linalg.norm(c[k:j + 1]) > tol * np.linalg.norm(x):
            return float(w[k])
        k = j + 1
    raise ValueError("zero vector")


def criterion_9(samples=10000):
    R = rep("sl2_binary_forms(4)")
    thetas = 2 * math.pi * np.arange(samples) / samples
    lines = []
    ok = True
    for label, coeffs in QUARTICS.items():
        x = binary_form_vector(4, coeffs)
        verdict = classify_point_projective(R, x, reductive=True).cls
        mats = R.spec.p_gens
        lams = np.array([_lambda_eigh(math.cos(t) * mats[0] + math.sin(t) * mats[1], x) for t in thetas])
        I = [i for i in range(R.n) if abs(R.W.coords(x)[i]) > 1e-9]
        lp = separating_functional(R.weights[I]) is not None
        sampled_unstable = bool(lams.min() < -1e-8) or lp
        if verdict == "unstable":
            good = sampled_unstable
        else:
            good = not sampled_unstable and lams.min() >= -1e-8
        ok &= good
        lines.append(f"{label} {verdict} (min sampled lambda {lams.min():+.3g}, LP {'yes' if lp else 'no'})")
    return ok, "; ".join(lines)


def test_criterion_09_numerical_criteria(show):
    show(9, *criterion_9())


# --- 10 ----------------------------------------------------------------------

def criterion_10():
    Q = rep("sl2_binary_forms(4)")
    parts = []
    r1 = destabilize_reductive(Q, binary_form_vector(4, (0, 1, 0, 0, 0)))
    ok1 = r1.found and r1.route == "torus" and r1.lam < -1e-8
    parts.append(f"[x^3y] {'found' if r1.found else 'none'} via {r1.route}, lambda {r1.lam}")

    v = binary_form_vector(4, QUARTICS["(x+y)^4"])
    r2 = destabilize_reductive(Q, v)
    # rotation oracle: k sends x + y to a multiple of y, destabilize y^4 on the torus, pull back
    e4 = np.zeros(5)
    e4[4] = 1.0
    k = None
    for th in (math.pi / 4, -math.pi / 4, 3 * math.pi / 4, -3 * math.pi / 4):
        kk = Q.spec.k_action(th)
        w = kk @ v
        if abs(abs(w @ e4) - np.linalg.norm(w)) <= 1e-12 * np.linalg.norm(w):
            k = kk
            break
    ry = destabilize_reductive(Q, e4)
    xi_oracle = Q.ad_matrix(k.T) @ ry.xi
    lam_oracle = maximal_weight(Q, v, xi_oracle, "p")
    agree = r2.found and np.linalg.norm(r2.xi - xi_oracle) <= 1e-6
    ok2 = r2.found and r2.route in ("flow", "sphere") and r2.lam < -1e-8 and agree and lam_oracle < -1e-8
    parts.append(f"[(x+y)^4] {'found' if r2.found else 'none'} via {r2.route}, lambda {r2.lam}, "
                 f"oracle lambda {lam_oracle:.6g}, |xi - oracle| {np.linalg.norm(r2.xi - xi_oracle):.1e}")

    S = rep("sl2_standard")
    r3 = destabilize_reductive(S, [1.0, 1.0])
    ok3 = not r3.found
    parts.append(f"sl2_standard [1:1] {'none' if not r3.found else f'found via {r3.route}, lambda {r3.lam:.6g}'}")
    return ok1 and ok2 and ok3, "; ".join(parts)


def test_criterion_10_destabilize(show):
    show(10, *criterion_10())


# --- 11 ----------------------------------------------------------------------

def criterion_11(samples=10000):
    S = rep("sl2_standard")
    res = khull_sample(S, [1.0, 0.0], n_samples=samples, seed=11)
    # p_gram is the identity, so dual coordinates are orthonormal
    norms = np.linalg.norm(res.samples, axis=1)
    area = ConvexHull(res.samples).volume
    proj = res.samples @ S.inclusion
    lo, hi = float(proj.min()), float(proj.max())
    ok = (abs(norms.max() - 1) <= 1e-6 and area >= 0.99 * math.pi
          and abs(lo + 1) <= 1e-3 and abs(hi - 1) <= 1e-3)
    return ok, f"max norm {norms.max():.12f}, hull area {area / math.pi:.6f} pi, projection [{lo:.6f}, {hi:.6f}]"


def test_criterion_11_khull(show):
    show(11, *criterion_11())


# --- 12 ----------------------------------------------------------------------

def criterion_12(starts=100):
    rng = np.random.default_rng(1212)
    worst_inc = -math.inf
    worst_lift = 0.0
    nonpositive = 0
    counted = 0
    for name in BUILTINS:
        R = rep(name)
        for _ in range(starts):
            tr = norm_square_flow(R, rng.normal(size=R.n))
            worst_inc = _worse(worst_inc, tr.max_f_increase)
            worst_lift = _worse(worst_lift, tr.lift_error)
            if tr.converged and not tr.stationary:
                counted += 1
                nonpositive += not (tr.decay_estimate is not None and tr.decay_estimate > 0)
    ok = worst_inc <= 1e-12 and worst_lift <= 1e-6 and nonpositive == 0
    return ok, (f"max per-step f increase {worst_inc:.1e}, max lift error {worst_lift:.1e}, "
                f"{nonpositive} of {counted} convergent traces without positive decay")


def test_criterion_12_flow_integrity(show):
    show(12, *criterion_12())


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12]

if __name__ == "__main__":
    results = [report(k, *fn()) for k, fn in enumerate(CRITERIA, 1)]
    sys.exit(0 if all("PASS" in r for r in results) else 1)
