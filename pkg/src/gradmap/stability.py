"""Supports, stability classes, Hilbert-Mumford witnesses and null cones."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull

from .convexgeom import (FaceDescriptor, cone, cone_membership, enumerate_faces,
                         exposing_functional, halfspace_form, polytope,
                         polytope_membership, separating_functional, solve_lp)
from .errors import (MaxIterations, MissingKAction, NotInNullCone, TooManyGenerators,
                     UnknownFace, ZeroDirection, ZeroVector)
from .flows import invert_moment, norm_square_flow
from .linalg import eigh_symmetric, exp_action
from .repmodel import gradient_map_abelian, gradient_map_p, gradient_map_projective, proj_point

__all__ = [
    "Support",
    "support_of",
    "maximal_weight",
    "PointAnalysis",
    "classify_point_linear",
    "classify_point_projective",
    "Witness",
    "hm_witness",
    "FaceRow",
    "face_orbit_table",
    "NullComponent",
    "NullConeDecomposition",
    "null_cone_decomposition",
    "DestabilizeResult",
    "destabilize_reductive",
    "KHullResult",
    "khull_sample",
]

TOL_SUPP = 1e-9
MAX_SUPPORT = 20
WITNESS_T = 40.0
WITNESS_TOL = 1e-6
LAMBDA_TOL = 1e-8
SPHERE_SEEDS = 256
SPHERE_STEPS = 100
SURROGATE_T = 8.0


@dataclass(frozen=True)
class Support:
    """``I = {i : |x_i| > tol_supp |x|}`` with the kept coordinates.

    ``min_kept`` and ``max_dropped`` are the smallest kept and largest
    dropped ``|x_i| / |x|``; their gap is the margin of the decision.
    """

    I: tuple
    coords: np.ndarray
    min_kept: float
    max_dropped: float

    def __len__(self):
        return len(self.I)


def support_of(R, x, tol_supp=TOL_SUPP):
    c = R.W.coords(R.vector(x))
    nrm = float(np.linalg.norm(c))
    if nrm == 0:
        return Support((), np.zeros(0), math.nan, math.nan)
    rel = np.abs(c) / nrm
    keep = rel > tol_supp
    I = tuple(int(i) for i in np.nonzero(keep)[0])
    min_kept = float(rel[keep].min()) if keep.any() else math.nan
    max_dropped = float(rel[~keep].max()) if (~keep).any() else 0.0
    return Support(I, c[list(I)], min_kept, max_dropped)


def maximal_weight(R, p, xi, space="a", tol_supp=TOL_SUPP):
    """``lambda(x, xi) = lim_{t -> inf} d/dt log |exp(t xi) x|``.

    For ``xi`` in ``a`` this is ``max alpha_i(xi)`` over the support of
    ``x``. For ``xi`` in ``p`` (``space="p"``, coordinates on the ``p``
    generators) ``xi`` is diagonalized and the answer is the largest
    eigenvalue whose eigenspace meets ``x`` nontrivially.
    """
    x = R.vector(p)
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if not np.any(xi):
        raise ZeroDirection("maximal weight needs xi != 0")
    nrm = np.linalg.norm(x)
    if nrm == 0:
        raise ZeroVector("maximal weight needs x != 0")
    if space == "a":
        S = support_of(R, x, tol_supp)
        return float(max(R.weights[list(S.I)] @ xi))
    if space != "p":
        raise ValueError(f"unknown space {space!r}")
    dec = eigh_symmetric(R.p_element(xi))
    c = dec.Q.T @ x
    for cluster in dec.clusters:
        if np.linalg.norm(c[list(cluster)]) > tol_supp * nrm:
            return float(np.mean(dec.eigenvalues[list(cluster)]))
    raise ZeroVector("x has no component in any eigenspace")


@dataclass
class PointAnalysis:
    """Stability class of a point with its certificate.

    ``variant`` is ``"linear"`` (classes ``closed_orbit``, ``null_cone``,
    ``nonclosed_nonnull``) or ``"projective"`` (``stable``,
    ``polystable_not_stable``, ``semistable_not_polystable``,
    ``unstable``). ``certificate`` holds the evidence: a destabilizing
    ``xi`` (with ``space`` and ``lambda``), relint coefficients, a face
    with its witness functional, or a Newton solve reaching ``mu~ = 0``.
    ``verified`` records an independent re-check of that evidence.
    """

    support: Support
    variant: str
    cls: str
    certificate: dict
    cone: object = None
    polytope: object = None
    in_null_cone: Optional[bool] = None
    stabilizer_dim: Optional[int] = None
    verified: bool = False

    @property
    def semistable(self):
        return self.cls != "unstable"


def _float(v):
    return np.array([float(t) for t in v])


def _zero_face(E):
    """Generators that carry positive weight in some representation of 0."""
    F = E.gens
    n = len(F)
    polytope_ = E.kind == "polytope"
    J = []
    for j in range(n):
        A_eq = [list(col) for col in F.T]
        b_eq = [0] * F.shape[1]
        if polytope_:
            A_eq.append([1] * n)
            b_eq.append(1)
            # maximize lam_j
            c = [0] * n
            c[j] = -1
            res = solve_lp(c, A_eq=A_eq, b_eq=b_eq, exact=E.exact, tol=E.tol)
            ok = res.ok and E._is_pos(res.x[j])
        else:
            A_eq.append([1 if i == j else 0 for i in range(n)])
            b_eq.append(1)
            ok = solve_lp([0] * n, A_eq=A_eq, b_eq=b_eq, exact=E.exact, tol=E.tol).ok
        if ok:
            J.append(j)
    return J


def _face(E, J, I):
    u, h = exposing_functional(E, J)
    from .convexgeom import face_dimension
    return FaceDescriptor(tuple(I[j] for j in J), u, h, face_dimension(E, J), E.kind)


def _linear_core(R, I):
    key = ("linear", I)
    if key in R.cache:
        return R.cache[key]
    F = R.weight_rows(I)
    C = cone(F, exact=R.exact)
    mem = cone_membership(C, np.zeros(R.rank, dtype=object if R.exact else float), "relint")
    if mem.member:
        out = ("closed_orbit", {"coefficients": mem.coefficients, "slack": mem.slack}, C)
    else:
        xi = separating_functional(F, exact=R.exact)
        if xi is not None:
            out = ("null_cone", {"xi": xi, "space": "a"}, C)
        else:
            face = _face(C, _zero_face(C), I)
            out = ("nonclosed_nonnull", {"face": face, "xi": face.witness_u, "space": "a"}, C)
    R.cache[key] = out
    return out


def classify_point_linear(R, x, tol_supp=TOL_SUPP):
    """Classify the torus orbit of ``x`` in ``V``.

    ``closed_orbit`` iff ``0`` lies in the open cone ``C°_I`` (certificate:
    strictly positive coefficients); ``null_cone`` iff a functional
    ``xi`` makes every support weight negative (then ``exp(t xi) x -> 0``);
    otherwise ``nonclosed_nonnull`` with the face of ``C_I`` having ``0``
    in its relative interior and its exposing functional. ``x = 0`` has a
    closed orbit and lies in the null cone.
    """
    x = R.vector(x)
    S = support_of(R, x, tol_supp)
    if not S.I:
        return PointAnalysis(S, "linear", "closed_orbit", {"reason": "zero vector"},
                             in_null_cone=True, stabilizer_dim=R.rank, verified=True)
    cls, cert, C = _linear_core(R, S.I)
    F = R.weights[list(S.I)]
    stab = R.rank - _rank(F)
    out = PointAnalysis(S, "linear", cls, dict(cert), cone=C, in_null_cone=cls == "null_cone",
                        stabilizer_dim=stab)
    out.verified = _verify_linear(R, x, out)
    return out


def _rank(F, tol=1e-10):
    F = np.atleast_2d(np.asarray(F, dtype=float))
    if F.size == 0 or not np.any(F):
        return 0
    return int(np.linalg.matrix_rank(F, tol=tol * max(1.0, np.abs(F).max())))


def _verify_linear(R, x, A):
    F = R.weights[list(A.support.I)]
    if A.cls == "closed_orbit":
        lam = _float(A.certificate["coefficients"])
        return bool(np.all(lam > 0) and np.linalg.norm(lam @ F) <= 1e-9 * max(1.0, lam.sum()))
    xi = _float(A.certificate["xi"])
    if A.cls == "null_cone":
        end = exp_action(R.W, xi, WITNESS_T, x)
        return bool(np.all(F @ xi < 0) and np.linalg.norm(end) <= WITNESS_TOL * np.linalg.norm(x))
    face = A.certificate["face"]
    J = list(face.J)
    if not J:
        return False
    c = R.W.coords(x)
    limit = R.W.basis[:, J] @ c[J]
    end = exp_action(R.W, xi, WITNESS_T, x)
    closed = cone_membership(cone(R.weights[J]), np.zeros(R.rank), "relint").member
    return bool(closed and np.linalg.norm(end - limit) <= WITNESS_TOL * np.linalg.norm(x))


def _projective_core(R, I):
    key = ("projective", I)
    if key in R.cache:
        return R.cache[key]
    F = R.weight_rows(I)
    P = polytope(F, exact=R.exact)
    xi = separating_functional(F, exact=R.exact)
    if xi is not None:
        out = ("unstable", {"xi": xi, "space": "a", "route": "torus"}, P)
    else:
        rel = polytope_membership(P, np.zeros(R.rank, dtype=object if R.exact else float), "relint")
        if rel.member:
            out = ("polystable", {"coefficients": rel.coefficients}, P)
        else:
            face = _face(P, _zero_face(P), I)
            out = ("semistable_not_polystable",
                   {"coefficients": rel.coefficients, "face": face, "xi": face.witness_u, "space": "a"}, P)
    R.cache[key] = out
    return out


def classify_point_projective(R, p, tol_supp=TOL_SUPP, reductive=False, **search):
    """Classify ``[x]`` for the torus and, optionally, for the whole group.

    Torus verdict: ``unstable`` iff ``0`` is outside ``P_I`` (certificate
    ``xi`` with ``lambda([x], xi) < 0``); polystable iff ``0`` lies in the
    relative interior of ``P_I``, certified by a Newton solve reaching
    ``mu~ = 0`` on the orbit; ``stable`` when moreover the support weights
    span ``a*``; ``semistable_not_polystable`` otherwise.

    With ``reductive=True`` and ``p`` data present, a point that is not
    torus-unstable is handed to :func:`destabilize_reductive`; a direction
    found there turns the verdict into ``unstable``. That search is a
    semi-decision, so the other verdicts remain torus verdicts.
    """
    x = proj_point(R.vector(p)).x
    S = support_of(R, x, tol_supp)
    cls, cert, P = _projective_core(R, S.I)
    cert = dict(cert)
    F = R.weights[list(S.I)]
    stab = R.rank - _rank(F[1:] - F[0]) if len(F) > 1 else R.rank
    if cls == "unstable":
        cert["lambda"] = maximal_weight(R, x, _float(cert["xi"]), "a", tol_supp)
    elif cls == "polystable":
        try:
            newton = invert_moment(R, x, np.zeros(R.rank), variant="projective", tol_supp=tol_supp)
        except MaxIterations as exc:
            newton = exc.best
        cert["newton"] = newton
        cls = "stable" if stab == 0 else "polystable_not_stable"
    if reductive and R.has_p and cls != "unstable":
        res = destabilize_reductive(R, x, skip_torus=True, tol_supp=tol_supp, **search)
        cert["reductive_search"] = res
        if res.found:
            cls = "unstable"
            cert.update({"xi": res.xi, "space": "p", "lambda": res.lam, "route": res.route})
    out = PointAnalysis(S, "projective", cls, cert, polytope=P, stabilizer_dim=stab)
    out.verified = _verify_projective(R, x, out, tol_supp)
    return out


def _verify_projective(R, x, A, tol_supp):
    cert = A.certificate
    if A.cls == "unstable":
        return maximal_weight(R, x, _float(cert["xi"]), cert["space"], tol_supp) < -LAMBDA_TOL
    F = R.weights[list(A.support.I)]
    if A.cls in ("stable", "polystable_not_stable"):
        nr = cert["newton"]
        mu = gradient_map_projective(R, nr.point)
        return bool(nr.converged and R.a_dual_norm(mu) <= 1e-8)
    lam = _float(cert["coefficients"])
    face = cert["face"]
    on = list(face.J)
    limit = R.W.basis[:, on] @ R.W.coords(x)[on]
    return bool(np.all(lam >= -1e-12) and np.linalg.norm(lam @ F) <= 1e-9
                and R.a_dual_norm(gradient_map_projective(R, limit)) <= 1e-8)


@dataclass
class Witness:
    """``exp(t xi) a x -> limit``; ``a`` is the identity here (``a``-coordinates 0)."""

    a: np.ndarray
    xi: np.ndarray
    limit: np.ndarray
    numeric_limit: np.ndarray
    error: float
    ok: bool
    face: Optional[FaceDescriptor] = None


def _faces_of_support(R, I, projective=False):
    if len(I) > MAX_SUPPORT:
        raise TooManyGenerators(f"support of size {len(I)} exceeds {MAX_SUPPORT}")
    key = ("faces", projective, I)
    if key not in R.cache:
        F = R.weight_rows(I)
        E = polytope(F, exact=R.exact) if projective else cone(F, exact=R.exact)
        local = enumerate_faces(E)
        R.cache[key] = [FaceDescriptor(tuple(I[j] for j in f.J), f.witness_u, f.support_value,
                                       f.dim, f.kind) for f in local]
    return R.cache[key]


def hm_witness(R, x, target="zero", tol_supp=TOL_SUPP):
    """One-parameter subgroup driving ``x`` to a prescribed limit.

    ``target="zero"`` needs ``x`` in the null cone and uses the separating
    functional. Otherwise ``target`` is a face of ``C_I`` (a
    :class:`FaceDescriptor` over weight indices, or an index into
    :func:`face_orbit_table`); its exposing functional is the witness and
    the limit is ``v_F = sum_{j in J} x_j v_j``. The limit is checked
    against ``exp(40 xi) x``.
    """
    x = R.vector(x)
    A = classify_point_linear(R, x, tol_supp)
    c = R.W.coords(x)
    if isinstance(target, str) and target == "zero":
        if not A.in_null_cone:
            raise NotInNullCone("the orbit closure of x does not contain 0")
        if not A.support.I:
            xi = np.zeros(R.rank)
        else:
            xi = _float(A.certificate["xi"])
        face = None
        J = []
    else:
        faces = _faces_of_support(R, A.support.I) if A.support.I else []
        if isinstance(target, (int, np.integer)):
            if not 0 <= target < len(faces):
                raise UnknownFace(f"face index {target} out of range 0..{len(faces) - 1}")
            face = faces[target]
        else:
            match = [f for f in faces if tuple(f.J) == tuple(target.J)]
            if not match:
                raise UnknownFace(f"{target.J} is not a face of the support cone")
            face = match[0]
        xi = _float(face.witness_u)
        J = list(face.J)
    limit = R.W.basis[:, J] @ c[J] if J else np.zeros(R.n)
    num = exp_action(R.W, xi, WITNESS_T, x)
    err = float(np.linalg.norm(num - limit))
    ok = err <= WITNESS_TOL * max(1.0, float(np.linalg.norm(x)))
    return Witness(np.zeros(R.rank), xi, limit, num, err, ok, face)


@dataclass
class FaceRow:
    face: FaceDescriptor
    v_F: np.ndarray
    mu: np.ndarray
    relint_ok: bool


def face_orbit_table(R, x, projective=False, tol_supp=TOL_SUPP):
    """One row per face of ``C_I`` (``P_I``): the face, ``v_F`` and ``mu(v_F)``.

    ``relint_ok`` confirms that ``mu(v_F)`` lies in the relative interior
    of the face, i.e. that ``v_F`` represents the orbit mapped onto it.
    """
    x = R.vector(x)
    S = support_of(R, x, tol_supp)
    if not S.I:
        if projective:
            raise ZeroVector("projective face table needs x != 0")
        apex = FaceDescriptor((), np.zeros(R.rank), 0.0, 0, "cone")
        return [FaceRow(apex, np.zeros(R.n), np.zeros(R.rank), True)]
    c = R.W.coords(x)
    rows = []
    for face in _faces_of_support(R, S.I, projective):
        J = list(face.J)
        if not J:
            v = np.zeros(R.n)
            mu = np.zeros(R.rank)
            ok = True
        else:
            v = R.W.basis[:, J] @ c[J]
            if projective:
                mu = gradient_map_projective(R, v)
                ok = polytope_membership(polytope(R.weights[J]), mu, "relint").member
            else:
                mu = gradient_map_abelian(R, v)
                ok = cone_membership(cone(R.weights[J]), mu, "relint").member
        rows.append(FaceRow(face, v, mu, bool(ok)))
    return rows


@dataclass
class NullComponent:
    """``H = span{v_k : k in Z}`` with ``exp(t xi) -> 0`` on ``H``."""

    xi: np.ndarray
    Z: tuple
    H: np.ndarray


@dataclass
class NullConeDecomposition:
    components: list

    def contains(self, R, x, tol_supp=TOL_SUPP):
        I = set(support_of(R, x, tol_supp).I)
        return any(I <= set(comp.Z) for comp in self.components) or not I


def null_cone_decomposition(R):
    """Maximal coordinate subspaces making up the torus null cone.

    A set ``Z`` of weight indices qualifies when some ``xi`` makes every
    ``alpha_i``, ``i in Z``, negative. Qualifying sets are closed under
    subsets, so they are grown level by level from single weights and only
    the maximal ones are reported, largest first.
    """
    n = R.n
    if n > MAX_SUPPORT:
        raise TooManyGenerators(f"dimension {n} exceeds {MAX_SUPPORT}")
    Wt = R.weight_rows()
    groups = []
    for i in range(n):
        if not any(v != 0 for v in Wt[i]):
            continue
        for g in groups:
            if all(a == b for a, b in zip(Wt[g[0]], Wt[i])) if R.exact else \
                    np.max(np.abs(R.weights[g[0]] - R.weights[i])) <= 1e-9:
                g.append(i)
                break
        else:
            groups.append([i])
    k = len(groups)
    level = {}
    for g in range(k):
        xi = separating_functional(Wt[groups[g]], exact=R.exact)
        level[(g,)] = xi
    feasible = dict(level)
    maximal = []
    while level:
        nxt = {}
        for S in level:
            for g in range(S[-1] + 1, k):
                T = S + (g,)
                if any(T[:i] + T[i + 1:] not in level for i in range(len(T))):
                    continue
                rows = [i for h in T for i in groups[h]]
                xi = separating_functional(Wt[rows], exact=R.exact)
                if xi is not None:
                    nxt[T] = xi
        for S, xi in level.items():
            if not any(set(S) < set(T) for T in nxt):
                maximal.append((S, xi))
        feasible.update(nxt)
        level = nxt
    comps = []
    for S, xi in maximal:
        Z = tuple(sorted(i for h in S for i in groups[h]))
        comps.append(NullComponent(_float(xi), Z, R.W.basis[:, list(Z)]))
    comps.sort(key=lambda c: (-len(c.Z), c.Z))
    return NullConeDecomposition(comps)


@dataclass
class DestabilizeResult:
    """Outcome of :func:`destabilize_reductive`.

    ``xi`` (``p``-coordinates, unit length) and ``lam`` describe the
    destabilizing direction when ``found``; ``route`` names the stage that
    produced it. ``best_lam`` is the smallest maximal weight seen.
    """

    found: bool
    xi: Optional[np.ndarray]
    lam: Optional[float]
    route: Optional[str]
    best_lam: float
    seeds_used: int = 0


def _surrogate(R, x, u, T):
    # d/dt log |exp(t xi) x| at t = T; tends to lambda(x, xi) as T grows
    lam, Q = np.linalg.eigh(R.p_element(u))
    c = Q.T @ x
    z = 2.0 * T * lam + np.log(np.maximum(c * c, 1e-300))
    w = np.exp(z - z.max())
    return float(w @ lam / w.sum())


def destabilize_reductive(R, p, seeds=SPHERE_SEEDS, steps=SPHERE_STEPS, seed=0, tol=LAMBDA_TOL,
                          skip_torus=False, flow_opts=None, tol_supp=TOL_SUPP):
    """Search ``xi`` in ``p`` with ``lambda([x], xi) < 0``.

    Stages, in order: (1) a torus separating functional on the support;
    (2) the norm-square flow, testing ``-beta`` for ``beta`` dual to
    ``mu~_p`` at the limit; (3) ``seeds`` random starts on the unit sphere
    of ``p``, each refined by ``steps`` descent steps on a smoothed
    maximal weight. Any candidate is accepted only after
    :func:`maximal_weight` confirms ``lambda < -tol``. Failure after the
    budget asserts nothing.
    """
    R.require_p()
    x = proj_point(R.vector(p)).x
    best = math.inf

    def certify(xi):
        nonlocal best
        nrm = R.p_norm(xi)
        if nrm <= 1e-12:
            return None
        xi = np.asarray(xi, dtype=float) / nrm
        lam = maximal_weight(R, x, xi, "p", tol_supp)
        best = min(best, lam)
        return (xi, lam) if lam < -tol else None

    if not skip_torus:
        S = support_of(R, x, tol_supp)
        xi_a = separating_functional(R.weights[list(S.I)])
        if xi_a is not None:
            hit = certify(R.a_to_p(xi_a))
            if hit:
                return DestabilizeResult(True, hit[0], hit[1], "torus", best)
    trace = norm_square_flow(R, x, use_p=True, lift=False, **(flow_opts or {}))
    beta = R.p_gram_inv @ trace.limit_mu
    if R.p_norm(beta) > 1e-9:
        hit = certify(-beta)
        if hit:
            return DestabilizeResult(True, hit[0], hit[1], "flow", best)

    rng = np.random.default_rng(seed)
    m = len(R.spec.p_gens)
    L = np.linalg.cholesky(R.p_gram_inv)  # u = L z maps the round sphere onto the unit p-sphere
    for s in range(seeds):
        z = rng.normal(size=m)
        z /= np.linalg.norm(z)
        val = _surrogate(R, x, L @ z, SURROGATE_T)
        eta = 0.2
        for _ in range(steps):
            g = np.zeros(m)
            hfd = 1e-6
            for a in range(m):
                e = np.zeros(m)
                e[a] = hfd
                g[a] = (_surrogate(R, x, L @ (z + e), SURROGATE_T)
                        - _surrogate(R, x, L @ (z - e), SURROGATE_T)) / (2 * hfd)
            g -= (g @ z) * z
            if np.linalg.norm(g) < 1e-10:
                break
            while eta > 1e-8:
                zt = z - eta * g
                zt /= np.linalg.norm(zt)
                vt = _surrogate(R, x, L @ zt, SURROGATE_T)
                if vt < val:
                    z, val = zt, vt
                    eta *= 1.5
                    break
                eta *= 0.5
            else:
                break
        hit = certify(L @ z)
        if hit:
            return DestabilizeResult(True, hit[0], hit[1], "sphere", best, s + 1)
    return DestabilizeResult(False, None, None, None, best, seeds)


@dataclass
class KHullResult:
    """Samples of ``mu~_p`` over ``K A [x]`` and their summary.

    ``samples`` are dual ``p``-coordinates, ``projections`` their
    restrictions to ``a``. ``hull_measure`` is the area (volume) of the
    sample hull in orthonormal coordinates when ``p`` has dimension 2 (3).
    ``violation`` is the largest distance by which a projection leaves the
    weight polytope of the sampled supports.
    """

    samples: np.ndarray
    projections: np.ndarray
    max_norm: float
    min_norm: float
    hull_measure: Optional[float]
    proj_min: np.ndarray
    proj_max: np.ndarray
    violation: float
    ok: bool
    seed: int = 0


def khull_sample(R, x, n_samples=10000, seed=0, a_scale=1.0, use_k=True, use_a=True,
                 tol_supp=TOL_SUPP, containment_tol=1e-8):
    """Sample ``mu~_p(k exp(xi) x)`` with ``k = exp(theta J)``, ``xi ~ N(0, a_scale^2)``."""
    R.require_p()
    if use_k and R.spec.k_generator is None:
        raise MissingKAction("khull sampling needs a K-parametrization")
    x = R.vector(x)
    if not np.any(x):
        raise ZeroVector("khull sampling needs x != 0")
    rng = np.random.default_rng(seed)
    thetas = rng.uniform(0.0, 2.0 * math.pi, size=n_samples)
    xis = rng.normal(0.0, a_scale, size=(n_samples, R.rank))
    J = R.spec.k_generator
    if use_k:
        # exp(theta J) through the eigendecomposition of the normal matrix J
        lamJ, VJ = np.linalg.eig(J)
        VJinv = np.linalg.inv(VJ)
    samples = np.empty((n_samples, len(R.spec.p_gens)))
    support = set()
    for s in range(n_samples):
        z = exp_action(R.W, xis[s], 1.0, x) if use_a else x
        if use_k:
            k = (VJ * np.exp(thetas[s] * lamJ)) @ VJinv
            z = k.real @ z
        samples[s] = gradient_map_p(R, z)
        support.update(support_of(R, z, tol_supp).I)
    proj = samples @ R.inclusion
    P = polytope(R.weights[sorted(support)])
    hs = halfspace_form(P)
    viol = float(np.max(hs.violation(proj), initial=0.0))
    C = np.linalg.cholesky(R.p_gram_inv).T
    ortho = samples @ C.T
    norms = np.linalg.norm(ortho, axis=1)
    measure = None
    if ortho.shape[1] in (2, 3):
        try:
            measure = float(ConvexHull(ortho).volume)
        except Exception:  # degenerate clouds (e.g. a single point) have no hull
            measure = 0.0
    return KHullResult(samples, proj, float(norms.max()), float(norms.min()), measure,
                       proj.min(axis=0), proj.max(axis=0), viol, viol <= containment_tol, seed)
