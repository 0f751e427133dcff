import math

import numpy as np
import pytest

from conftest import rep
from gradmap.errors import TargetNotInRelint, ZeroDirection
from gradmap.flows import invert_moment, norm_square_flow, orbit_min_norm, projective_limit
from gradmap.gallery import binary_form_vector
from gradmap.repmodel import gradient_map_abelian, gradient_map_projective


def test_invert_moment_examples():
    G = rep("torus_gl(2)")
    r = invert_moment(G, [1.0, 1.0], [2.0, 3.0])
    assert r.converged and r.residual <= 1e-10
    np.testing.assert_allclose(r.xi, 0.5 * np.log([2.0, 3.0]), atol=1e-10)
    x = np.array([0.4, -1.3])
    r = invert_moment(G, x, gradient_map_abelian(G, x))
    np.testing.assert_allclose(r.xi, [0, 0], atol=1e-12)
    S = rep("torus_sl(2)")
    r = invert_moment(S, [2.0, 1.0], [0.0], variant="projective")
    np.testing.assert_allclose(r.xi, [0.5 * math.log(0.5)], atol=1e-10)
    assert abs(gradient_map_projective(S, r.point)[0]) <= 1e-10
    with pytest.raises(TargetNotInRelint):
        invert_moment(G, [1.0, 1.0], [-1.0, 1.0])
    with pytest.raises(TargetNotInRelint):
        invert_moment(G, [1.0, 0.0], [1.0, 1.0])


def test_invert_moment_with_stabilizer():
    G = rep("torus_gl(3)")
    r = invert_moment(G, [1.0, 0.0, 0.0], [5.0, 0.0, 0.0])
    assert r.converged and r.b_basis.shape == (3, 1)


@pytest.mark.parametrize("name", ["torus_gl(3)", "torus_sl(3)", "sl2_binary_forms(4)"])
def test_invert_moment_random_targets(name, rng):
    R = rep(name)
    for _ in range(25):
        x = rng.normal(size=R.n)
        lam = rng.exponential(size=R.n)
        c = lam @ R.weights
        r = invert_moment(R, x, c)
        assert r.converged and r.residual <= 1e-8 and r.iterations <= 60


def test_projective_limit_examples():
    S = rep("torus_sl(2)")
    j, lim = projective_limit(S, [1.0, 1.0], [1.0])
    assert j == 1
    np.testing.assert_allclose(lim.x, [1, 0])
    _, lim = projective_limit(S, [2.0, 1.0], [-1.0])
    np.testing.assert_allclose(lim.x, [0, 1])
    G = rep("torus_gl(2)")
    res = projective_limit(G, [0.6, 0.8], [1.0, 1.0])
    np.testing.assert_allclose(res.limit.x, [0.6, 0.8])
    assert res.numeric_error <= 1e-12
    with pytest.raises(ZeroDirection):
        projective_limit(S, [1.0, 1.0], [0.0])


def test_flow_examples():
    S = rep("torus_sl(2)")
    tr = norm_square_flow(S, [1.0, 1.0])
    assert tr.stationary and tr.limit_mu_norm <= 1e-15
    tr = norm_square_flow(S, [2.0, 1.0])
    assert tr.converged and tr.limit_mu_norm <= 1e-6
    tr = norm_square_flow(S, [1.0, 0.0])
    assert tr.stationary and tr.limit_mu_norm == pytest.approx(1)


def test_fixed_step_flow_is_monotone():
    S = rep("sl2_binary_forms(3)")
    tr = norm_square_flow(S, [1.0, 0.3, -0.2, 0.5], adaptive=False, t_max=20)
    assert tr.max_f_increase <= 1e-12
    assert np.allclose(np.diff(tr.times[:-1]), 0.01)


@pytest.mark.parametrize("name", ["sl2_standard", "sl2_binary_forms(4)", "torus_sl(3)"])
def test_flow_integrity(name, rng):
    R = rep(name)
    for _ in range(5):
        tr = norm_square_flow(R, rng.normal(size=R.n))
        assert tr.max_f_increase <= 1e-12
        assert tr.lift_error <= 1e-6
        if tr.converged and not tr.stationary:
            assert tr.decay_estimate > 0


def test_lift_norm_floor_and_decay():
    Q = rep("sl2_binary_forms(4)")
    semistable = norm_square_flow(Q, binary_form_vector(4, [1, 0, 0, 0, 1]))
    assert np.min(semistable.lift_log_norms) > -5
    unstable = norm_square_flow(Q, binary_form_vector(4, [1, 3, 0, 0, 0]))
    tail = unstable.lift_log_norms[len(unstable.lift_log_norms) // 2:]
    assert np.all(np.diff(tail) <= 1e-12) and tail[-1] < tail[0]


def test_orbit_min_norm_examples():
    S = rep("torus_sl(2)")
    for x, want in [([1.0, 1.0], 0.0), ([1.0, 0.0], 1.0)]:
        r = orbit_min_norm(S, x)
        assert r.ok and r.polytope_value == pytest.approx(want, abs=1e-12)
        assert r.flow_value == pytest.approx(want, abs=1e-4)
    r = orbit_min_norm(rep("sl2_binary_forms(4)"), binary_form_vector(4, [1, 0, 0, 0, 1]))
    assert r.ok and r.value == pytest.approx(0, abs=1e-12)
