"""Representation files and deterministic JSON reports."""

from __future__ import annotations

import hashlib
import json
import math
import os
from fractions import Fraction

import numpy as np

from . import gallery as _gallery
from .errors import BadParams, DimensionMismatch
from .repmodel import make_spec

ENV_ARITHMETIC = "GRADMAP_ARITHMETIC"


def format_float(v):
    v = float(v)
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    if v == 0:
        return "0.0"
    s = format(v, ".17g")
    if "e" not in s and "." not in s and "inf" not in s:
        s += ".0"
    return s


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()] if obj.dtype != object else [_plain(v) for v in obj]
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps(obj, indent=2):
    """JSON with 17-significant-digit floats and Fractions as ``"p/q"``."""
    return _dump(_plain(obj), 0, indent)


def _dump(obj, level, indent):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, Fraction):
        return json.dumps(f"{obj.numerator}/{obj.denominator}" if obj.denominator != 1 else str(obj.numerator))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (list, dict)) for v in obj):
            return "[" + ", ".join(_dump(v, level + 1, indent) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _dump(v, level + 1, indent) for v in obj) + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + json.dumps(k) + ": " + _dump(v, level + 1, indent) for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def rep_document(spec):
    """Canonical document of a spec; feeding it back rebuilds the same spec."""
    exact = spec.arithmetic == "exact"
    abel = spec.raw_abelian if exact and spec.raw_abelian is not None else spec.abelian_gens
    doc = {
        "dimension": spec.n,
        "mode": "matrices",
        "arithmetic": spec.arithmetic,
        "abelian_generators": [_plain(np.asarray(g)) for g in abel],
    }
    if spec.p_gens is not None:
        doc["p_generators"] = [_plain(g) for g in spec.p_gens]
    ip = {}
    if spec.a_gram is not None:
        ip["a"] = _plain(spec.a_gram)
    if spec.p_gram is not None:
        ip["p"] = _plain(spec.p_gram)
    if ip:
        doc["inner_product"] = ip
    if spec.k_generator is not None:
        doc["k_generator"] = _plain(spec.k_generator)
    if spec.labels:
        doc["labels"] = _plain(spec.labels)
    return doc


def digest(spec):
    return hashlib.sha256(dumps(rep_document(spec), indent=0).encode()).hexdigest()


def _rational(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, bool):
        raise BadParams("booleans are not matrix entries")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(repr(v))
    raise BadParams(f"not a number: {v!r}")


def _matrix(rows, n, what):
    if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise DimensionMismatch(f"{what} must be a {n}x{n} matrix")
    return [[_rational(v) if isinstance(v, str) else v for v in r] for r in rows]


def spec_from_document(doc, arithmetic=None):
    """Build a spec from a parsed rep-file document."""
    if not isinstance(doc, dict):
        raise BadParams("a rep file must hold a JSON object")
    arithmetic = arithmetic or os.environ.get(ENV_ARITHMETIC) or doc.get("arithmetic", "float")
    has_gens = "abelian_generators" in doc
    has_weights = "weights" in doc or "basis" in doc
    has_gallery = "gallery" in doc
    if has_gens + has_weights + has_gallery != 1:
        raise BadParams("exactly one of abelian_generators, weights+basis or gallery is required")
    if has_gallery:
        g = doc["gallery"]
        if not isinstance(g, dict) or "name" not in g:
            raise BadParams("gallery needs a name")
        return _gallery.build(g["name"], g.get("params") or None, arithmetic=arithmetic)
    n = doc.get("dimension")
    if not isinstance(n, int) or n < 1:
        raise BadParams("dimension must be a positive integer")
    if has_gens:
        abel = [_matrix(g, n, f"abelian generator {k}") for k, g in enumerate(doc["abelian_generators"])]
    else:
        if "weights" not in doc or "basis" not in doc:
            raise BadParams("weights mode needs both weights and basis")
        abel = _from_weights(doc["weights"], doc["basis"], n, arithmetic == "exact")
    pg = doc.get("p_generators")
    if pg is not None:
        pg = [_matrix(g, n, f"p generator {k}") for k, g in enumerate(pg)]
    ip = doc.get("inner_product") or {}
    kg = doc.get("k_generator")
    if kg is not None:
        kg = _matrix(kg, n, "k_generator")
    return make_spec(abel, p_gens=pg, a_gram=ip.get("a"), p_gram=ip.get("p"), k_generator=kg,
                     arithmetic=arithmetic, labels=doc.get("labels"))


def _from_weights(weights, basis, n, exact):
    if not isinstance(basis, list) or len(basis) != n:
        raise DimensionMismatch(f"basis must have {n} rows")
    if not isinstance(weights, list) or len(weights) != n:
        raise DimensionMismatch(f"weights must have {n} rows")
    m = len(weights[0]) if isinstance(weights[0], list) else 1
    Wt = [[_rational(v) for v in (w if isinstance(w, list) else [w])] for w in weights]
    B = [[_rational(v) for v in row] for row in basis]
    if any(len(w) != m for w in Wt) or any(len(r) != n for r in B):
        raise DimensionMismatch("weights or basis rows have inconsistent lengths")
    Bf = np.array(B, dtype=float)
    if np.max(np.abs(Bf @ Bf.T - np.eye(n))) > 1e-10:
        raise BadParams("basis rows must be orthonormal")
    gens = []
    for a in range(m):
        if exact:
            E = [[sum((Wt[i][a] * B[i][p] * B[i][q] for i in range(n)), Fraction(0)) for q in range(n)]
                 for p in range(n)]
        else:
            w = np.array([float(Wt[i][a]) for i in range(n)])
            E = ((Bf.T * w) @ Bf).tolist()
        gens.append(E)
    return gens


def load_rep(ref, arithmetic=None):
    """Spec for a rep-file path or ``gallery:name[:param]``."""
    if ref.startswith("gallery:"):
        text = ref[len("gallery:"):]
        name, param = _gallery.parse_name(text)
        arithmetic = arithmetic or os.environ.get(ENV_ARITHMETIC) or "float"
        return _gallery.build(name, param, arithmetic=arithmetic)
    with open(ref) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise BadParams(f"malformed JSON in {ref}: {exc}") from None
    return spec_from_document(doc, arithmetic)


def parse_vector(text):
    try:
        return np.array([float(_rational(t.strip())) if "/" in t else float(t) for t in text.split(",")])
    except (ValueError, ZeroDivisionError):
        raise BadParams(f"cannot parse vector {text!r}") from None
