"""Dense symmetric linear algebra.

Cyclic Jacobi eigensolver, simultaneous diagonalization of a commuting
family of symmetric matrices, and the exponential action of an abelian
algebra written through its weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (DegenerateGenerators, DimensionMismatch, GradmapError,
                     NotCommuting, NotSymmetric)

__all__ = [
    "EigDecomposition",
    "WeightData",
    "check_symmetric",
    "eigh_symmetric",
    "simultaneous_diagonalize",
    "exp_action",
    "nullspace",
    "canonical_sign",
]

JACOBI_TOL = 1e-12
CLUSTER_TOL = 1e-9
_MAX_SWEEPS = 64
# fixed coefficients for the generic combination; any generic choice works
_COMBO_SEED = 0x5EED


@dataclass(frozen=True)
class EigDecomposition:
    """Eigenpairs of a symmetric matrix.

    ``Q[:, k]`` is the unit eigenvector for ``eigenvalues[k]``; eigenvalues
    are non-increasing. ``clusters`` groups indices whose eigenvalues agree
    within ``CLUSTER_TOL`` times the spectral radius.
    """

    Q: np.ndarray
    eigenvalues: np.ndarray
    clusters: tuple

    def reconstruct(self):
        return (self.Q * self.eigenvalues) @ self.Q.T


@dataclass(frozen=True)
class WeightData:
    """Common orthonormal eigenbasis of an abelian family and its weights.

    Attributes
    ----------
    basis : ndarray (n, n)
        Columns are the common eigenvectors ``v_i``.
    weights : ndarray (n, m)
        Row ``i`` holds ``alpha_i(xi_a)`` for each generator ``xi_a``.
    abelian_basis : tuple of ndarray
        The generators ``xi_a``.
    gram : ndarray (m, m)
        Trace form ``tr(xi_a xi_b)`` on the generators.
    """

    basis: np.ndarray
    weights: np.ndarray
    abelian_basis: tuple
    gram: np.ndarray

    @property
    def n(self):
        return self.basis.shape[0]

    @property
    def rank(self):
        return self.weights.shape[1]

    def coords(self, x):
        """Coordinates ``x_i = <x, v_i>``."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatch(f"expected a vector of length {self.n}, got {x.shape}")
        return self.basis.T @ x


def canonical_sign(v, tol=1e-12):
    """Flip ``v`` so that its first entry above ``tol`` in modulus is positive."""
    v = np.asarray(v, dtype=float)
    for c in v:
        if abs(c) > tol:
            return -v if c < 0 else v
    return v


def check_symmetric(S, tol=JACOBI_TOL):
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {S.shape}")
    scale = np.max(np.abs(S)) if S.size else 0.0
    if np.max(np.abs(S - S.T), initial=0.0) > tol * max(scale, 1e-300):
        raise NotSymmetric("matrix is not symmetric within tolerance")
    return S


def _clusters(lam, tol=CLUSTER_TOL):
    if len(lam) == 0:
        return ()
    rho = np.max(np.abs(lam))
    groups = [[0]]
    for k in range(1, len(lam)):
        if lam[groups[-1][-1]] - lam[k] <= tol * rho:
            groups[-1].append(k)
        else:
            groups.append([k])
    return tuple(tuple(g) for g in groups)


def eigh_symmetric(S, tol=JACOBI_TOL):
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi sweeps.

    Sweeps run in row-major pair order until the off-diagonal Frobenius
    norm drops below ``tol * ||S||_F``. Eigenvalues are returned in
    descending order and each eigenvector has its first non-negligible
    component positive, so the output is a deterministic function of ``S``.

    Raises
    ------
    NotSymmetric
        If ``S`` deviates from its transpose by more than ``tol`` relative
        to its largest entry.
    """
    S = check_symmetric(S, tol)
    n = S.shape[0]
    A = 0.5 * (S + S.T)
    V = np.eye(n)
    norm = np.linalg.norm(A)
    target = tol * norm
    for _ in range(_MAX_SWEEPS):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300 or abs(apq) < 1e-18 * norm:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0
                v_p = V[:, p].copy()
                v_q = V[:, q].copy()
                V[:, p] = c * v_p - s * v_q
                V[:, q] = s * v_p + c * v_q
    else:
        raise GradmapError("Jacobi iteration did not converge")
    lam = np.diag(A).copy()
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    Q = V[:, order]
    for k in range(n):
        Q[:, k] = canonical_sign(Q[:, k])
    return EigDecomposition(Q=Q, eigenvalues=lam, clusters=_clusters(lam))


def _refine(Q, mats):
    # each matrix in turn splits the current invariant subspace into its eigenspaces
    if Q.shape[1] == 1 or not mats:
        return [Q]
    B = Q.T @ mats[0] @ Q
    dec = eigh_symmetric(0.5 * (B + B.T), tol=1e-10)
    blocks = []
    for cluster in dec.clusters:
        blocks.extend(_refine(Q @ dec.Q[:, list(cluster)], mats[1:]))
    return blocks


def simultaneous_diagonalize(gens, tol=1e-9):
    """Common orthonormal eigenbasis and weights of commuting symmetric matrices.

    A generic linear combination of the generators is diagonalized first;
    each eigenvalue cluster is then split further by the individual
    generators restricted to it. Repeated weights are kept, one row per
    basis vector. Basis vectors are ordered by weight rows in decreasing
    lexicographic order.

    Parameters
    ----------
    gens : sequence of (n, n) array_like
        Symmetric, pairwise commuting, linearly independent matrices.
    tol : float
        Relative commutator tolerance: ``||[A, B]||_F <= tol ||A||_F ||B||_F``.

    Returns
    -------
    WeightData
    """
    mats = [np.asarray(g, dtype=float) for g in gens]
    if not mats:
        raise DegenerateGenerators("at least one generator is required")
    n = mats[0].shape[0]
    for k, M in enumerate(mats):
        if M.shape != (n, n):
            raise DimensionMismatch(f"generator {k} has shape {M.shape}, expected {(n, n)}")
        check_symmetric(M)
    mats = [0.5 * (M + M.T) for M in mats]
    norms = [np.linalg.norm(M) for M in mats]
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            comm = mats[a] @ mats[b] - mats[b] @ mats[a]
            defect = np.linalg.norm(comm) / max(norms[a] * norms[b], 1e-300)
            if defect > tol:
                raise NotCommuting(a, b, defect)
    m = len(mats)
    gram = np.array([[np.trace(A @ B) for B in mats] for A in mats])
    gdec = eigh_symmetric(gram)
    if gdec.eigenvalues[-1] <= 1e-12 * max(gdec.eigenvalues[0], 1e-300):
        raise DegenerateGenerators("generators are linearly dependent")

    coeffs = np.random.default_rng(_COMBO_SEED).uniform(1.0, 2.0, size=m)
    combo = sum(c * M / nm for c, M, nm in zip(coeffs, mats, norms))
    blocks = _refine(np.eye(n), [combo] + mats)
    basis = np.hstack(blocks)
    for k in range(n):
        basis[:, k] = canonical_sign(basis[:, k])
    weights = np.array([[basis[:, i] @ M @ basis[:, i] for M in mats] for i in range(n)])

    def key(i):
        return (tuple(-np.round(weights[i], 9)), tuple(-np.round(basis[:, i], 12)))

    order = sorted(range(n), key=key)
    basis = basis[:, order]
    weights = weights[order]

    scale = max(max(norms), 1.0)
    for a, M in enumerate(mats):
        resid = M @ basis - basis * weights[:, a]
        if np.max(np.abs(resid)) > 1e-8 * scale:
            raise GradmapError("simultaneous diagonalization failed to converge")
    return WeightData(basis=basis, weights=weights, abelian_basis=tuple(mats), gram=gram)


def exp_action(W, xi, t, x):
    """Apply ``exp(t xi)`` to ``x`` through the weights of ``W``.

    Returns ``sum_i exp(t alpha_i(xi)) <x, v_i> v_i``.
    """
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.shape != (W.rank,):
        raise DimensionMismatch(f"xi must have {W.rank} coordinates, got {xi.shape}")
    c = W.coords(x)
    return W.basis @ (np.exp(t * (W.weights @ xi)) * c)


def nullspace(M, tol=1e-10, exact=False):
    """Basis of ``{v : M v = 0}`` as the columns of the returned array.

    In exact mode ``M`` holds Fractions and the basis comes from reduced
    row echelon form, so it is rational. Otherwise an SVD with relative
    cutoff ``tol`` is used and the basis is orthonormal.
    """
    if exact:
        rows = [[Fraction(v) for v in r] for r in M]
        ncols = len(rows[0]) if rows else 0
        pivots = []
        r = 0
        for c in range(ncols):
            piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            inv = 1 / rows[r][c]
            rows[r] = [v * inv for v in rows[r]]
            for i in range(len(rows)):
                if i != r and rows[i][c] != 0:
                    f = rows[i][c]
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == len(rows):
                break
        free = [c for c in range(ncols) if c not in pivots]
        out = np.zeros((ncols, len(free)), dtype=object)
        out[:, :] = Fraction(0)
        for k, fc in enumerate(free):
            out[fc, k] = Fraction(1)
            for i, pc in enumerate(pivots):
                out[pc, k] = -rows[i][fc]
        return out
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return np.eye(M.shape[1])
    _, s, vt = np.linalg.svd(M)
    smax = s[0] if len(s) else 0.0
    rank = int(np.sum(s > tol * max(smax, 1e-300))) if smax > 0 else 0
    return vt[rank:].T.copy()
