import numpy as np
import pytest

from gradmap.gallery import build
from gradmap.repmodel import build_representation

BUILTINS = [
    "torus_gl(2)",
    "torus_gl(3)",
    "torus_sl(2)",
    "torus_sl(3)",
    "sl2_standard",
    "sl2_binary_forms(3)",
    "sl2_binary_forms(4)",
]

_CACHE = {}


def rep(name, arithmetic="float"):
    key = (name, arithmetic)
    if key not in _CACHE:
        _CACHE[key] = build_representation(build(name, arithmetic=arithmetic))
    return _CACHE[key]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=BUILTINS)
def builtin(request):
    return rep(request.param)
