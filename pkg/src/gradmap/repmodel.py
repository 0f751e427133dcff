"""Representations, gradient maps and Kempf-Ness functions.

A representation is given by symmetric generator matrices of an abelian
subalgebra ``a`` of ``p`` (and optionally a basis of ``p`` and a rotation
generator of ``K``). Functionals on ``a`` or ``p`` are stored as *dual
coordinates*: the values on the declared basis. Pairing a functional with
an element written in basis coordinates is a plain dot product; the Gram
matrix of the inner product enters only where norms or the identification
``a = a*`` matter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.linalg import expm

from .convexgeom.simplex import to_fraction
from .errors import (BadParams, DimensionMismatch, MissingKAction, MissingPData,
                     ZeroVector)
from .linalg import check_symmetric, nullspace, simultaneous_diagonalize

__all__ = [
    "RepresentationSpec",
    "make_spec",
    "Representation",
    "ProjPoint",
    "proj_point",
    "build_representation",
    "gradient_map_abelian",
    "gradient_map_projective",
    "gradient_map_p",
    "kempf_ness",
    "KempfNessPath",
    "kempf_ness_path",
    "gallery",
]

PROJ_TOL = 1e-9
RATIONAL_DENOM = 10**6


def trace_gram(mats, scale=1.0):
    return np.array([[scale * np.trace(A @ B) for B in mats] for A in mats])


@dataclass(frozen=True, eq=False)
class RepresentationSpec:
    """Input data for a representation on ``V = R^n``.

    Attributes
    ----------
    n : int
    abelian_gens : tuple of ndarray
        Symmetric, pairwise commuting, independent matrices spanning ``a``.
    p_gens : tuple of ndarray, optional
        Symmetric matrices spanning ``p``; ``a`` must lie in their span.
    a_gram, p_gram : ndarray, optional
        Inner products of the basis elements. The trace form ``tr(xi eta)``
        on ``V`` is used when omitted.
    k_generator : ndarray, optional
        Skew matrix ``J`` with ``K`` containing ``exp(theta J)``.
    arithmetic : {"float", "exact"}
    labels : dict
        Free-form metadata (gallery name, basis names, ...).
    """

    n: int
    abelian_gens: tuple
    p_gens: Optional[tuple] = None
    a_gram: Optional[np.ndarray] = None
    p_gram: Optional[np.ndarray] = None
    k_generator: Optional[np.ndarray] = None
    arithmetic: str = "float"
    labels: dict = field(default_factory=dict)
    raw_abelian: Optional[tuple] = None

    def k_action(self, theta):
        """Orthogonal matrix ``exp(theta J)`` acting on ``V``."""
        if self.k_generator is None:
            raise MissingKAction("this representation carries no K-parametrization")
        return expm(theta * self.k_generator)


def make_spec(abelian_gens, p_gens=None, a_gram=None, p_gram=None, k_generator=None,
              arithmetic="float", labels=None):
    """Validate generator data and return a :class:`RepresentationSpec`.

    Entries may be numbers, Fractions or ``"p/q"`` strings; exact arithmetic
    keeps a rational copy of the abelian generators for weight certification.
    """
    if arithmetic not in ("float", "exact"):
        raise BadParams(f"arithmetic must be 'float' or 'exact', got {arithmetic!r}")
    if not abelian_gens:
        raise BadParams("at least one abelian generator is required")
    raw = tuple(np.array([[to_fraction(v) for v in row] for row in g], dtype=object)
                for g in abelian_gens) if arithmetic == "exact" else None
    gens = tuple(np.array(_floatify(g), dtype=float) for g in abelian_gens)
    n = gens[0].shape[0]
    for k, g in enumerate(gens):
        if g.shape != (n, n):
            raise DimensionMismatch(f"abelian generator {k} has shape {g.shape}, expected {(n, n)}")
        check_symmetric(g)
    pg = None
    if p_gens is not None:
        pg = tuple(np.array(_floatify(g), dtype=float) for g in p_gens)
        for k, g in enumerate(pg):
            if g.shape != (n, n):
                raise DimensionMismatch(f"p generator {k} has shape {g.shape}, expected {(n, n)}")
            check_symmetric(g)
    ag = None if a_gram is None else np.array(_floatify(a_gram), dtype=float)
    pgm = None if p_gram is None else np.array(_floatify(p_gram), dtype=float)
    if ag is not None and ag.shape != (len(gens), len(gens)):
        raise DimensionMismatch("a_gram does not match the number of abelian generators")
    if pgm is not None and (pg is None or pgm.shape != (len(pg), len(pg))):
        raise DimensionMismatch("p_gram does not match the p generators")
    kg = None
    if k_generator is not None:
        kg = np.array(_floatify(k_generator), dtype=float)
        if kg.shape != (n, n) or np.max(np.abs(kg + kg.T)) > 1e-12:
            raise BadParams("k_generator must be a skew-symmetric n x n matrix")
    return RepresentationSpec(n, gens, pg, ag, pgm, kg, arithmetic, dict(labels or {}), raw)


def _floatify(a):
    return [[float(to_fraction(v)) if isinstance(v, str) else float(v) for v in row]
            for row in np.asarray(a, dtype=object)]


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """A point of ``P(V)``: unit representative with positive leading entry."""

    x: np.ndarray

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and self.x.shape == other.x.shape \
            and np.max(np.abs(self.x - other.x)) <= PROJ_TOL

    def __hash__(self):
        return hash(tuple(np.round(self.x, 8)))


def proj_point(x):
    """Normalize and sign-canonicalize ``x``; raises ZeroVector for ``x = 0``."""
    if isinstance(x, ProjPoint):
        return x
    x = np.asarray(x, dtype=float).reshape(-1)
    nrm = np.linalg.norm(x)
    if nrm == 0 or not np.isfinite(nrm):
        raise ZeroVector("a projective point needs a nonzero finite representative")
    x = x / nrm
    lead = np.nonzero(np.abs(x) > 1e-12)[0][0]
    if x[lead] < 0:
        x = -x
    return ProjPoint(x)


class Representation:
    """A validated representation with its weight data.

    Attributes
    ----------
    spec : RepresentationSpec
    W : WeightData
    weights : ndarray (n, m)
        ``weights[i, a] = alpha_i(E_a)``.
    weights_exact : ndarray of Fraction or None
        Certified rational weights (exact arithmetic only).
    a_gram, a_gram_inv : ndarray
    p_gram, p_gram_inv, inclusion : ndarray or None
        ``inclusion[:, a]`` holds the ``p``-coordinates of ``E_a``.
    """

    def __init__(self, spec, W, weights_exact=None):
        self.spec = spec
        self.W = W
        self.weights = W.weights
        self.weights_exact = weights_exact
        self.a_gram = spec.a_gram if spec.a_gram is not None else W.gram
        self.a_gram_inv = np.linalg.inv(self.a_gram)
        self.p_gram = self.p_gram_inv = self.inclusion = None
        if spec.p_gens is not None:
            self.p_gram = spec.p_gram if spec.p_gram is not None else trace_gram(spec.p_gens)
            self.p_gram_inv = np.linalg.inv(self.p_gram)
            self.inclusion = _coordinates_in(spec.p_gens, spec.abelian_gens)
        # per-support LP results, keyed by (kind, support)
        self.cache = {}

    @property
    def n(self):
        return self.spec.n

    @property
    def rank(self):
        return self.weights.shape[1]

    @property
    def exact(self):
        return self.weights_exact is not None

    @property
    def has_p(self):
        return self.spec.p_gens is not None

    def weight_rows(self, I=None):
        """Weights over the index set ``I`` in the active arithmetic."""
        src = self.weights_exact if self.exact else self.weights
        return src if I is None else src[list(I)]

    def a_element(self, xi):
        """Matrix ``sum xi_a E_a``."""
        xi = np.asarray(xi, dtype=float).reshape(-1)
        if xi.shape != (self.rank,):
            raise DimensionMismatch(f"expected {self.rank} a-coordinates, got {xi.shape}")
        return sum(c * E for c, E in zip(xi, self.spec.abelian_gens))

    def p_element(self, xi):
        """Matrix ``sum xi_b P_b``."""
        self.require_p()
        xi = np.asarray(xi, dtype=float).reshape(-1)
        if xi.shape != (len(self.spec.p_gens),):
            raise DimensionMismatch(f"expected {len(self.spec.p_gens)} p-coordinates, got {xi.shape}")
        return sum(c * P for c, P in zip(xi, self.spec.p_gens))

    def require_p(self):
        if not self.has_p:
            raise MissingPData("this representation carries no p generators")

    def a_to_p(self, xi):
        """``p``-coordinates of the element of ``a`` with coordinates ``xi``."""
        self.require_p()
        return self.inclusion @ np.asarray(xi, dtype=float)

    def restrict_to_a(self, phi):
        """Restriction of a ``p``-functional (dual coordinates) to ``a``."""
        self.require_p()
        return self.inclusion.T @ np.asarray(phi, dtype=float)

    def a_norm(self, xi):
        xi = np.asarray(xi, dtype=float)
        return math.sqrt(max(xi @ self.a_gram @ xi, 0.0))

    def p_norm(self, xi):
        xi = np.asarray(xi, dtype=float)
        return math.sqrt(max(xi @ self.p_gram @ xi, 0.0))

    def a_dual_norm(self, phi):
        phi = np.asarray(phi, dtype=float)
        return math.sqrt(max(phi @ self.a_gram_inv @ phi, 0.0))

    def p_dual_norm(self, phi):
        phi = np.asarray(phi, dtype=float)
        return math.sqrt(max(phi @ self.p_gram_inv @ phi, 0.0))

    def ad_matrix(self, k):
        """Matrix of ``Ad(k): P -> k P k^T`` on ``p``-coordinates."""
        self.require_p()
        return _coordinates_in(self.spec.p_gens, [k @ P @ k.T for P in self.spec.p_gens])

    def coadjoint(self, k, phi):
        """Dual coordinates of ``phi o Ad(k^{-1})``."""
        return self.ad_matrix(k.T).T @ np.asarray(phi, dtype=float)

    def vector(self, x):
        x = np.asarray(x.x if isinstance(x, ProjPoint) else x, dtype=float).reshape(-1)
        if x.shape != (self.n,):
            raise DimensionMismatch(f"expected a vector of length {self.n}, got {x.shape}")
        return x


def _coordinates_in(basis, mats):
    B = np.array([np.asarray(P).ravel() for P in basis]).T
    T = np.array([np.asarray(M).ravel() for M in mats]).T
    coef, *_ = np.linalg.lstsq(B, T, rcond=None)
    if np.max(np.abs(B @ coef - T), initial=0.0) > 1e-9 * max(1.0, np.max(np.abs(T))):
        raise BadParams("matrix does not lie in the span of the p generators")
    return coef


def _certify_weights(spec, W):
    # rational guesses for each weight, confirmed by an exact kernel computation
    n, m = W.weights.shape
    out = np.empty((n, m), dtype=object)
    for a in range(m):
        E = spec.raw_abelian[a]
        checked = {}
        for i in range(n):
            r = Fraction(float(W.weights[i, a])).limit_denominator(RATIONAL_DENOM)
            if abs(float(r) - W.weights[i, a]) > 1e-9 * max(1.0, abs(W.weights[i, a])):
                return None
            if r not in checked:
                shifted = [[E[p, q] - (r if p == q else 0) for q in range(n)] for p in range(n)]
                checked[r] = nullspace(shifted, exact=True).shape[1]
                if checked[r] == 0:
                    return None
            out[i, a] = r
        counts = {}
        for i in range(n):
            counts[out[i, a]] = counts.get(out[i, a], 0) + 1
        if any(counts[r] != checked[r] for r in counts):
            return None
    return out


def build_representation(spec):
    """Diagonalize the abelian generators and cache the weights.

    In exact arithmetic the weights are certified rational (each candidate
    eigenvalue ``r`` of ``E_a`` is confirmed by an exact kernel of
    ``E_a - r I`` with matching multiplicity); a certification failure
    raises :class:`BadParams`.
    """
    W = simultaneous_diagonalize(spec.abelian_gens)
    exact_w = None
    if spec.arithmetic == "exact":
        exact_w = _certify_weights(spec, W)
        if exact_w is None:
            raise BadParams("exact arithmetic needs rational weights; use float arithmetic")
    return Representation(spec, W, exact_w)


def gradient_map_abelian(R, x):
    """``mu_a(x) = sum <x, v_i>^2 alpha_i`` in dual coordinates."""
    c = R.W.coords(R.vector(x))
    return (c * c) @ R.weights


def gradient_map_projective(R, p, with_p=False):
    """``mu~_a([x]) = mu_a(x) / |x|^2``; with ``with_p`` also ``mu~_p([x])``."""
    x = R.vector(p)
    nrm2 = x @ x
    if nrm2 == 0:
        raise ZeroVector("projective gradient map needs x != 0")
    mu_a = gradient_map_abelian(R, x) / nrm2
    if with_p:
        return mu_a, gradient_map_p(R, x)
    return mu_a


def gradient_map_p(R, x):
    """``mu~_p([x])(P_b) = <P_b x, x> / |x|^2`` for each ``p`` generator."""
    R.require_p()
    x = R.vector(x)
    nrm2 = x @ x
    if nrm2 == 0:
        raise ZeroVector("projective gradient map needs x != 0")
    return np.array([x @ P @ x for P in R.spec.p_gens]) / nrm2


@dataclass(frozen=True)
class KempfNessPath:
    """``t -> Psi(x, exp(t xi))`` with analytic derivatives.

    ``levels`` are the values ``alpha_i(xi)`` over the support and
    ``mass`` the matching ``x_i^2``.
    """

    levels: np.ndarray
    mass: np.ndarray
    variant: str

    def _softmax(self, t):
        z = 2.0 * t * self.levels + np.log(self.mass)
        top = np.max(z)
        w = np.exp(z - top)
        s = w.sum()
        return w / s, top + math.log(s)

    def value(self, t):
        if self.variant == "linear":
            return 0.5 * float(np.sum(self.mass * np.expm1(2.0 * t * self.levels)))
        _, lse = self._softmax(t)
        return 0.5 * (lse - math.log(self.mass.sum()))

    def d1(self, t):
        if self.variant == "linear":
            return float(np.sum(self.mass * self.levels * np.exp(2.0 * t * self.levels)))
        w, _ = self._softmax(t)
        return float(w @ self.levels)

    def d2(self, t):
        if self.variant == "linear":
            return float(2.0 * np.sum(self.mass * self.levels ** 2 * np.exp(2.0 * t * self.levels)))
        w, _ = self._softmax(t)
        mean = w @ self.levels
        return float(2.0 * (w @ (self.levels - mean) ** 2))


def kempf_ness_path(R, x, xi, variant="linear"):
    if variant not in ("linear", "projective"):
        raise BadParams(f"unknown variant {variant!r}")
    x = R.vector(x)
    c = R.W.coords(x)
    if variant == "projective" and not np.any(c):
        raise ZeroVector("the projective Kempf-Ness function needs x != 0")
    keep = c != 0
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.shape != (R.rank,):
        raise DimensionMismatch(f"expected {R.rank} a-coordinates, got {xi.shape}")
    return KempfNessPath(R.weights[keep] @ xi, c[keep] ** 2, variant)


def kempf_ness(R, x, xi, variant="linear"):
    """``Psi(x, exp xi)``.

    linear: ``1/2 (|exp(xi) x|^2 - |x|^2)``;
    projective: ``log(|exp(xi) x| / |x|)``.
    """
    path = kempf_ness_path(R, x, xi, variant)
    if path.levels.size == 0:
        return 0.0
    return path.value(1.0)


def gallery(name, params=None):
    """Built-in representation spec; see :mod:`gradmap.gallery`."""
    from . import gallery as _g
    return _g.build(name, params)
