"""Minimum-norm point of a polytope (Wolfe's algorithm)."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .polyhedra import GeneratedPolytope, _as_matrix
from .simplex import to_fraction

GAP_TOL = 1e-12


def _solve(A, b, exact):
    if not exact:
        sol, *_ = np.linalg.lstsq(np.array(A, dtype=float), np.array(b, dtype=float), rcond=None)
        return list(sol)
    n = len(A)
    M = [list(A[i]) + [b[i]] for i in range(n)]
    for c in range(n):
        piv = next(i for i in range(c, n) if M[i][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [v * inv for v in M[c]]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * p for a, p in zip(M[i], M[c])]
    return [M[i][n] for i in range(n)]


def min_norm_point(P, metric=None, exact=None, max_iter=1000):
    """Point of ``P`` closest to the origin.

    Parameters
    ----------
    P : GeneratedPolytope or sequence of vectors
    metric : (m, m) array_like, optional
        Positive definite matrix ``M`` defining ``<a, b> = a^T M b``;
        the identity when omitted.
    exact : bool, optional
        Defaults to ``P.exact``. Exact runs need a rational metric.

    Returns
    -------
    (point, norm)
        ``norm`` is a float; ``point`` holds Fractions in exact mode.
    """
    if not isinstance(P, GeneratedPolytope):
        P = GeneratedPolytope.from_generators(P, exact=bool(exact))
    exact = P.exact if exact is None else exact
    F = _as_matrix(list(P.gens), exact)
    n, m = F.shape
    if metric is None:
        M = np.eye(m, dtype=object if exact else float)
        if exact:
            M = np.vectorize(Fraction, otypes=[object])(np.eye(m, dtype=int))
    elif exact:
        M = np.vectorize(to_fraction, otypes=[object])(np.asarray(metric, dtype=object))
    else:
        M = np.asarray(metric, dtype=float)
    zero = Fraction(0) if exact else 0.0

    def ip(a, b):
        return a @ M @ b

    def combine(S, lam):
        x = np.array([zero] * m, dtype=object if exact else float)
        for i, w in zip(S, lam):
            x = x + w * F[i]
        return x

    start = min(range(n), key=lambda i: float(ip(F[i], F[i])))
    S, lam = [start], [Fraction(1) if exact else 1.0]
    x = F[start].copy()
    for _ in range(max_iter):
        xx = ip(x, x)
        vals = [ip(x, F[i]) for i in range(n)]
        j = min(range(n), key=lambda i: vals[i])
        gap = xx - vals[j]
        if (gap <= 0) if exact else (gap <= GAP_TOL * max(1.0, float(xx)) or j in S):
            break
        S.append(j)
        lam.append(zero)
        while True:
            # affine minimizer over the current corral
            k = len(S)
            A = [[ip(F[a], F[b]) for b in S] + [1] for a in S] + [[1] * k + [0]]
            b = [zero] * k + [Fraction(1) if exact else 1.0]
            w = _solve(A, b, exact)[:k]
            if all((wi > 0) if exact else (wi > 1e-14) for wi in w):
                lam = list(w)
                break
            theta = min(lam[i] / (lam[i] - w[i]) for i in range(k)
                        if ((w[i] <= 0) if exact else (w[i] <= 1e-14)) and lam[i] != w[i])
            lam = [l + theta * (wi - l) for l, wi in zip(lam, w)]
            keep = [i for i in range(k) if ((lam[i] > 0) if exact else (lam[i] > 1e-14))]
            S = [S[i] for i in keep]
            lam = [lam[i] for i in keep]
        x = combine(S, lam)
    nrm = math.sqrt(float(ip(x, x)))
    return x, nrm
