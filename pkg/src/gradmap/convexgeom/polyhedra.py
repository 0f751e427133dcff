"""Finitely generated cones and polytopes.

A cone ``C(f_1..f_n)`` is the set of non-negative combinations of its
generators; a polytope ``P(f_1..f_n)`` their convex hull. Every query is
answered by a small linear program, solved exactly over the rationals when
the object was built with ``exact=True``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import DimensionMismatch, TooManyGenerators, UnboundedSupport
from ..linalg import nullspace
from .simplex import FLOAT_TOL, solve_lp, to_fraction

MAX_FACE_GENERATORS = 20


def _as_matrix(gens, exact):
    rows = [list(np.atleast_1d(np.asarray(g, dtype=object if exact else float))) for g in gens]
    if not rows:
        raise ValueError("at least one generator is required")
    m = len(rows[0])
    if any(len(r) != m for r in rows):
        raise DimensionMismatch("generators have different lengths")
    if exact:
        out = np.empty((len(rows), m), dtype=object)
        for i, r in enumerate(rows):
            for k, v in enumerate(r):
                out[i, k] = to_fraction(v)
        return out
    return np.array(rows, dtype=float).reshape(len(rows), m)


@dataclass(frozen=True, eq=False)
class _Generated:
    gens: np.ndarray
    exact: bool = False
    tol: float = FLOAT_TOL

    kind = "set"

    @classmethod
    def from_generators(cls, gens, exact=False, tol=FLOAT_TOL):
        return cls(_as_matrix(gens, exact), exact, tol)

    @property
    def n(self):
        return self.gens.shape[0]

    @property
    def dim(self):
        """Ambient dimension."""
        return self.gens.shape[1]

    def subset(self, idx):
        return type(self)(self.gens[list(idx)], self.exact, self.tol)

    def vector(self, y):
        y = np.atleast_1d(np.asarray(y, dtype=object if self.exact else float))
        if y.shape != (self.dim,):
            raise DimensionMismatch(f"expected a vector of length {self.dim}, got {y.shape}")
        if self.exact:
            return np.array([to_fraction(v) for v in y], dtype=object)
        return y

    def _zero(self):
        return Fraction(0) if self.exact else 0.0

    def _is_pos(self, v):
        return v > 0 if self.exact else v > self.tol


class GeneratedCone(_Generated):
    """``C(f_1, ..., f_n) = {sum s_i f_i : s_i >= 0}``."""

    kind = "cone"


class GeneratedPolytope(_Generated):
    """``P(f_1, ..., f_n) = conv{f_1, ..., f_n}``."""

    kind = "polytope"


def cone(gens, exact=False, tol=FLOAT_TOL):
    return GeneratedCone.from_generators(gens, exact, tol)


def polytope(gens, exact=False, tol=FLOAT_TOL):
    return GeneratedPolytope.from_generators(gens, exact, tol)


@dataclass
class Membership:
    """Outcome of a membership query.

    ``coefficients`` holds the combination that writes ``y`` from the
    generators when ``y`` lies in the closed set; ``functional`` holds a
    separating ``u`` (with offset ``offset`` for polytopes) otherwise.
    ``slack`` is the maximized uniform lower bound on the coefficients in
    relint mode.
    """

    member: bool
    closed_member: bool
    coefficients: np.ndarray | None = None
    functional: np.ndarray | None = None
    offset: object = None
    slack: object = None

    def __bool__(self):
        return self.member


def _separate(E, y):
    # max <y,u> - h  s.t. <f_i,u> - h <= 0, |u_k| <= 1   (h = 0 for cones)
    n, m = E.gens.shape
    polytope_ = E.kind == "polytope"
    nv = m + (1 if polytope_ else 0)
    c = [-v for v in y] + ([1] if polytope_ else [])
    A_ub, b_ub = [], []
    for i in range(n):
        A_ub.append(list(E.gens[i]) + ([-1] if polytope_ else []))
        b_ub.append(0)
    for k in range(m):
        e = [0] * nv
        e[k] = 1
        A_ub.append(e)
        b_ub.append(1)
        e = [0] * nv
        e[k] = -1
        A_ub.append(e)
        b_ub.append(1)
    res = solve_lp(c, A_ub=A_ub, b_ub=b_ub, free=range(nv), exact=E.exact, tol=E.tol)
    u = np.array(res.x[:m], dtype=object if E.exact else float)
    h = res.x[m] if polytope_ else E._zero()
    return u, h


def _membership(E, y, mode):
    if mode not in ("closed", "relint"):
        raise ValueError(f"unknown mode {mode!r}")
    y = E.vector(y)
    n, m = E.gens.shape
    polytope_ = E.kind == "polytope"
    cols = E.gens.T.tolist()
    if mode == "closed":
        A_eq = [list(r) for r in cols]
        b_eq = list(y)
        if polytope_:
            A_eq.append([1] * n)
            b_eq.append(1)
        res = solve_lp([0] * n, A_eq=A_eq, b_eq=b_eq, exact=E.exact, tol=E.tol)
        if res.ok:
            lam = np.array(res.x, dtype=object if E.exact else float)
            return Membership(True, True, coefficients=lam)
    else:
        # max eps  s.t.  sum lam_i f_i = y, lam_i >= eps, eps <= 1
        A_eq = [list(r) + [0] for r in cols]
        b_eq = list(y)
        if polytope_:
            A_eq.append([1] * n + [0])
            b_eq.append(1)
        A_ub = []
        b_ub = []
        for i in range(n):
            row = [0] * (n + 1)
            row[i] = -1
            row[n] = 1
            A_ub.append(row)
            b_ub.append(0)
        A_ub.append([0] * n + [1])
        b_ub.append(1)
        res = solve_lp([0] * n + [-1], A_eq=A_eq, b_eq=b_eq, A_ub=A_ub, b_ub=b_ub,
                       exact=E.exact, tol=E.tol)
        if res.ok:
            lam = np.array(res.x[:n], dtype=object if E.exact else float)
            eps = res.x[n]
            return Membership(E._is_pos(eps), True, coefficients=lam, slack=eps)
    u, h = _separate(E, y)
    return Membership(False, False, functional=u, offset=h)


def cone_membership(C, y, mode="closed"):
    """Decide ``y in C`` (``mode='closed'``) or ``y in C°`` (``mode='relint'``).

    ``C°`` is the set of combinations with every coefficient strictly
    positive. The relint test maximizes a uniform lower bound ``eps`` on
    the coefficients and accepts iff ``eps > 0``. On rejection from the
    closed set a functional ``u`` with ``<y,u> > 0 >= <f_i,u>`` is returned.
    """
    return _membership(C, y, mode)


def polytope_membership(P, y, mode="closed"):
    """Same as :func:`cone_membership` with coefficients summing to one.

    On rejection ``functional`` and ``offset`` satisfy
    ``<y,u> > offset >= <f_i,u>``.
    """
    return _membership(P, y, mode)


def is_closed_Copen(C):
    """Whether the open cone ``C°`` is closed, i.e. whether ``0 in C°``."""
    return cone_membership(C, np.zeros(C.dim, dtype=object if C.exact else float), "relint").member


def separating_functional(gens, exact=False, tol=FLOAT_TOL):
    """A functional ``xi`` with ``<f_i, xi> <= -1`` for every generator, or None.

    Among all such functionals the one of least l1 norm is returned. None
    means that no strictly separating functional exists, which happens
    exactly when ``0`` is a convex combination of the generators; see
    :func:`gordan_certificate` for the combination itself.
    """
    F = _as_matrix(gens, exact)
    n, m = F.shape
    # xi = p - q, p, q >= 0
    c = [1] * (2 * m)
    A_ub = [list(F[i]) + [-v for v in F[i]] for i in range(n)]
    b_ub = [-1] * n
    res = solve_lp(c, A_ub=A_ub, b_ub=b_ub, exact=exact, tol=tol)
    if not res.ok:
        return None
    xi = [res.x[k] - res.x[m + k] for k in range(m)]
    return np.array(xi, dtype=object if exact else float)


def gordan_certificate(gens, exact=False, tol=FLOAT_TOL):
    """Convex weights ``lam`` with ``sum lam_i f_i = 0``, or None."""
    P = GeneratedPolytope.from_generators(gens, exact, tol)
    res = polytope_membership(P, np.zeros(P.dim, dtype=object if exact else float))
    return res.coefficients if res.closed_member else None


@dataclass(frozen=True, eq=False)
class FaceDescriptor:
    """A face of a generated cone or polytope.

    ``J`` lists the generator indices lying on the face; the face is the
    cone (or polytope) they generate. ``witness_u`` exposes it: generators
    in ``J`` attain ``support_value`` and all others stay strictly below.
    The improper face (the whole set) carries ``witness_u = 0``.
    """

    J: tuple
    witness_u: np.ndarray
    support_value: object
    dim: int
    kind: str = "cone"

    @property
    def is_improper(self):
        return not any(v != 0 for v in self.witness_u)

    def __repr__(self):
        return f"FaceDescriptor(J={self.J}, dim={self.dim}, u={list(self.witness_u)})"


def _rank(rows, exact, tol):
    if len(rows) == 0:
        return 0
    if exact:
        M = [list(r) for r in rows]
        return len(M[0]) - nullspace(M, exact=True).shape[1]
    M = np.array(rows, dtype=float)
    if not np.any(M):
        return 0
    return int(np.linalg.matrix_rank(M, tol=max(tol, 1e-12) * max(1.0, np.abs(M).max())))


def face_dimension(E, J):
    J = list(J)
    if not J:
        return 0
    rows = E.gens[J]
    if E.kind == "polytope":
        rows = rows[1:] - rows[0]
    return _rank(rows, E.exact, E.tol)


def exposing_functional(E, J):
    """An exposing functional for the index set ``J``, or None if ``J`` is not a face.

    Returns ``(u, h)``: ``<f_j,u> = h`` for ``j in J`` and
    ``<f_r,u> <= h - 1`` for the remaining generators (``h = 0`` for cones).
    The l1-smallest such ``u`` is chosen.
    """
    n, m = E.gens.shape
    J = sorted(set(J))
    zero = E._zero()
    if len(J) == n:
        return np.array([zero] * m, dtype=object if E.exact else float), zero
    if E.kind == "polytope" and not J:
        return None
    polytope_ = E.kind == "polytope"
    nv = 2 * m + (1 if polytope_ else 0)
    c = [1] * (2 * m) + ([0] if polytope_ else [])
    A_eq, b_eq, A_ub, b_ub = [], [], [], []
    for i in range(n):
        row = list(E.gens[i]) + [-v for v in E.gens[i]] + ([-1] if polytope_ else [])
        if i in J:
            A_eq.append(row)
            b_eq.append(0)
        else:
            A_ub.append(row)
            b_ub.append(-1)
    res = solve_lp(c, A_eq=A_eq or None, b_eq=b_eq or None, A_ub=A_ub, b_ub=b_ub,
                   free=[nv - 1] if polytope_ else None, exact=E.exact, tol=E.tol)
    if not res.ok:
        return None
    u = np.array([res.x[k] - res.x[m + k] for k in range(m)], dtype=object if E.exact else float)
    h = res.x[2 * m] if polytope_ else zero
    return u, h


def _groups(E):
    # identical generators always lie on the same faces
    groups = []
    for i in range(E.n):
        row = E.gens[i]
        for g in groups:
            other = E.gens[g[0]]
            same = all(a == b for a, b in zip(row, other)) if E.exact else \
                np.max(np.abs(row - other), initial=0.0) <= E.tol
            if same:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def enumerate_faces(E):
    """Every face of a generated cone or polytope, improper face included.

    Candidate index sets range over unions of groups of identical
    generators; each candidate is kept iff an exposing functional exists.
    Faces come sorted by dimension, then by index set.

    Raises
    ------
    TooManyGenerators
        When there are more than ``MAX_FACE_GENERATORS`` distinct generators.
    """
    groups = _groups(E)
    k = len(groups)
    if k > MAX_FACE_GENERATORS:
        raise TooManyGenerators(f"{k} distinct generators exceeds the cap of {MAX_FACE_GENERATORS}")
    faces = []
    for r in range(k + 1):
        for combo in itertools.combinations(range(k), r):
            J = sorted(i for g in combo for i in groups[g])
            found = exposing_functional(E, J)
            if found is None:
                continue
            u, h = found
            faces.append(FaceDescriptor(tuple(J), u, h, face_dimension(E, J), E.kind))
    faces.sort(key=lambda f: (f.dim, len(f.J), f.J))
    return faces


def exposed_face(E, u):
    """The face ``E ∩ {<., u> = h_E(u)}`` for a nonzero functional ``u``.

    Raises
    ------
    UnboundedSupport
        For a cone with some generator pairing positively with ``u``.
    """
    u = E.vector(u)
    if not any(v != 0 for v in u):
        raise ValueError("u must be nonzero")
    vals = E.gens @ u
    top = max(vals)
    if E.kind == "cone":
        if E._is_pos(top):
            raise UnboundedSupport("support function is infinite in this direction")
        h = E._zero()
    else:
        h = top
    if E.exact:
        J = tuple(i for i, v in enumerate(vals) if v == h)
    else:
        J = tuple(int(i) for i in np.nonzero(vals >= h - E.tol)[0])
    return FaceDescriptor(J, u, h, face_dimension(E, J), E.kind)


def face_lattice(faces):
    """Inclusion pairs ``(i, j)`` meaning ``faces[i]`` is a proper subface of ``faces[j]``."""
    sets = [set(f.J) for f in faces]
    return [(i, j) for i, a in enumerate(sets) for j, b in enumerate(sets) if i != j and a < b]


@dataclass
class HalfspaceForm:
    """``P = {y : U y <= h, N^T (y - origin) = 0}`` with unit rows in ``U``."""

    U: np.ndarray
    h: np.ndarray
    N: np.ndarray
    origin: np.ndarray
    faces: list = field(default_factory=list)

    def violation(self, Y):
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        out = np.zeros(len(Y))
        if len(self.U):
            out = np.maximum(out, np.max(Y @ self.U.T - self.h, axis=1))
        if self.N.shape[1]:
            out = np.maximum(out, np.max(np.abs((Y - self.origin) @ self.N), axis=1))
        return out


def halfspace_form(P):
    """Facet inequalities and affine-hull equations of a polytope (float output)."""
    faces = enumerate_faces(P)
    G = np.array(P.gens, dtype=float)
    origin = G[0]
    full = faces[-1].dim
    diffs = G[1:] - origin
    N = nullspace(diffs) if len(diffs) else np.eye(P.dim)
    D = np.eye(P.dim) - N @ N.T
    U, h = [], []
    for f in faces:
        if f.dim != full - 1:
            continue
        u = D @ np.array(f.witness_u, dtype=float)
        u /= np.linalg.norm(u)
        U.append(u)
        h.append(np.max(G[list(f.J)] @ u))
    U = np.array(U).reshape(-1, P.dim)
    return HalfspaceForm(U, np.array(h), N, origin, faces)
