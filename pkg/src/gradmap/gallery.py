"""Built-in representations.

``torus_gl(n)``
    Diagonal matrices acting on ``R^n``; trace form on ``a``.
``torus_sl(n)``
    Trace-free diagonals with basis ``H_k = diag(e_k - e_{k+1})`` and inner
    product ``1/2 tr``, which agrees with ``sl2_standard`` for ``n = 2``.
``sl2_standard``
    ``SL(2, R)`` on ``R^2``: ``a = span diag(1, -1)``, ``p`` adds
    ``[[0, 1], [1, 0]]``, ``K = SO(2)``.
``sl2_binary_forms(d)``
    ``SL(2, R)`` on binary forms of degree ``d``. The inner product makes
    ``u_k = sqrt(C(d, k)) x^(d-k) y^k`` orthonormal; it is the one invariant
    under the rotations ``SO(2)``, so ``p`` acts by symmetric matrices.

All ``SL(2)`` entries use ``1/2 tr`` of the defining ``2 x 2`` matrices as
inner product on ``a`` and ``p``; with it ``diag(1, -1)`` has unit length.
"""

from __future__ import annotations

import math
import re

import numpy as np

from .errors import BadParams, UnknownName
from .repmodel import make_spec

MAX_DIM = 64
NAMES = ("torus_gl", "torus_sl", "sl2_standard", "sl2_binary_forms")
_PARAM = {"torus_gl": "n", "torus_sl": "n", "sl2_binary_forms": "d"}


def parse_name(text):
    """Split ``"torus_gl(3)"``, ``"torus_gl:3"`` or ``"sl2_standard"`` into (name, param)."""
    m = re.fullmatch(r"\s*([a-z0-9_]+)\s*(?:\(\s*([^)]*)\s*\)|:\s*(\S+))?\s*", text)
    if not m:
        raise UnknownName(f"cannot parse gallery entry {text!r}")
    name, p = m.group(1), m.group(2) or m.group(3)
    return name, p


def _int_param(name, params):
    key = _PARAM[name]
    if isinstance(params, dict):
        params = params.get(key)
    if params is None:
        raise BadParams(f"{name} needs the integer parameter {key}")
    try:
        v = int(params)
    except (TypeError, ValueError):
        raise BadParams(f"{name}: {key} must be an integer, got {params!r}") from None
    if isinstance(params, float) and params != v:
        raise BadParams(f"{name}: {key} must be an integer, got {params!r}")
    return v


def build(name, params=None, arithmetic="float"):
    """Return the :class:`RepresentationSpec` of a built-in."""
    if params is None and ("(" in name or ":" in name):
        name, params = parse_name(name)
    if name not in NAMES:
        raise UnknownName(f"unknown gallery entry {name!r}; known: {', '.join(NAMES)}")
    if name == "sl2_standard":
        if params not in (None, {}, ""):
            raise BadParams("sl2_standard takes no parameters")
        return sl2_binary_forms(1, arithmetic, label="sl2_standard")
    v = _int_param(name, params)
    if name == "torus_gl":
        return torus_gl(v, arithmetic)
    if name == "torus_sl":
        return torus_sl(v, arithmetic)
    return sl2_binary_forms(v, arithmetic)


def torus_gl(n, arithmetic="float"):
    if not 1 <= n <= MAX_DIM:
        raise BadParams(f"torus_gl needs 1 <= n <= {MAX_DIM}, got {n}")
    gens = []
    for k in range(n):
        E = np.zeros((n, n), dtype=int)
        E[k, k] = 1
        gens.append(E)
    return make_spec(gens, a_gram=np.eye(n), arithmetic=arithmetic,
                     labels={"gallery": {"name": "torus_gl", "params": {"n": n}}})


def torus_sl(n, arithmetic="float"):
    if not 2 <= n <= MAX_DIM:
        raise BadParams(f"torus_sl needs 2 <= n <= {MAX_DIM}, got {n}")
    gens = []
    for k in range(n - 1):
        H = np.zeros((n, n), dtype=int)
        H[k, k] = 1
        H[k + 1, k + 1] = -1
        gens.append(H)
    gram = 0.5 * np.array([[np.trace(A @ B) for B in gens] for A in gens])
    return make_spec(gens, a_gram=gram, arithmetic=arithmetic,
                     labels={"gallery": {"name": "torus_sl", "params": {"n": n}}})


def sl2_binary_forms(d, arithmetic="float", label=None):
    if not 1 <= d <= MAX_DIM - 1:
        raise BadParams(f"sl2_binary_forms needs 1 <= d <= {MAX_DIM - 1}, got {d}")
    n = d + 1
    H = np.diag([d - 2 * k for k in range(n)])
    X = np.zeros((n, n))
    J = np.zeros((n, n))
    for k in range(d):
        s = math.sqrt((k + 1) * (d - k))
        X[k, k + 1] = X[k + 1, k] = s
        # derivation induced by x -> y, y -> -x
        J[k + 1, k] = s
        J[k, k + 1] = -s
    if label is None:
        labels = {"gallery": {"name": "sl2_binary_forms", "params": {"d": d}}}
    else:
        labels = {"gallery": {"name": label, "params": {}}}
    return make_spec([H], p_gens=[H, X], a_gram=np.eye(1), p_gram=np.eye(2),
                     k_generator=J, arithmetic=arithmetic, labels=labels)


def binary_form_vector(d, coeffs):
    """Coordinates of ``sum c_k x^(d-k) y^k`` in the orthonormal basis ``u_k``."""
    coeffs = list(coeffs)
    if len(coeffs) != d + 1:
        raise BadParams(f"a degree-{d} form has {d + 1} coefficients, got {len(coeffs)}")
    return np.array([c / math.sqrt(math.comb(d, k)) for k, c in enumerate(coeffs)], dtype=float)


def listing():
    return [
        ("torus_gl", "n", "diagonal torus of GL(n) on R^n"),
        ("torus_sl", "n", "diagonal torus of SL(n) on R^n"),
        ("sl2_standard", None, "SL(2,R) on R^2 with K = SO(2)"),
        ("sl2_binary_forms", "d", "SL(2,R) on binary forms of degree d"),
    ]
