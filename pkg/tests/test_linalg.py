import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from gradmap.errors import (DegenerateGenerators, DimensionMismatch, NotCommuting,
                            NotSymmetric)
from gradmap.linalg import (eigh_symmetric, exp_action, nullspace,
                            simultaneous_diagonalize)


def test_eigh_identity():
    dec = eigh_symmetric(np.eye(2))
    np.testing.assert_allclose(dec.eigenvalues, [1, 1])
    np.testing.assert_allclose(dec.Q, np.eye(2))
    assert dec.clusters == ((0, 1),)


def test_eigh_two_by_two():
    dec = eigh_symmetric([[1.0, 2.0], [2.0, 1.0]])
    np.testing.assert_allclose(dec.eigenvalues, [3, -1], atol=1e-14)
    s = 1 / np.sqrt(2)
    np.testing.assert_allclose(dec.Q, [[s, s], [s, -s]], atol=1e-14)
    dec = eigh_symmetric([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(dec.eigenvalues, [1, -1], atol=1e-14)


def test_eigh_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        eigh_symmetric([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(DimensionMismatch):
        eigh_symmetric(np.ones((2, 3)))


def test_eigh_deterministic():
    S = np.random.default_rng(3).normal(size=(6, 6))
    S = S + S.T
    a, b = eigh_symmetric(S), eigh_symmetric(S.copy())
    assert np.array_equal(a.Q, b.Q) and np.array_equal(a.eigenvalues, b.eigenvalues)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_eigh_random(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n))
    S = A + A.T
    dec = eigh_symmetric(S)
    scale = max(np.linalg.norm(S), 1e-300)
    np.testing.assert_allclose(dec.Q.T @ dec.Q, np.eye(n), atol=1e-10)
    assert np.linalg.norm(S @ dec.Q - dec.Q * dec.eigenvalues) <= 1e-9 * scale
    assert np.all(np.diff(dec.eigenvalues) <= 0)
    # on PSD input the eigenvalues are the singular values
    P = A @ A.T
    np.testing.assert_allclose(eigh_symmetric(P).eigenvalues,
                               np.linalg.svd(P, compute_uv=False), atol=1e-9 * np.linalg.norm(P))


def test_simdiag_examples():
    W = simultaneous_diagonalize([np.diag([1.0, -1.0])])
    np.testing.assert_allclose(W.basis, np.eye(2))
    np.testing.assert_allclose(W.weights, [[1], [-1]])
    W = simultaneous_diagonalize([[[1.0, 2.0], [2.0, 1.0]], [[0.0, 1.0], [1.0, 0.0]]])
    np.testing.assert_allclose(W.weights, [[3, 1], [-1, -1]], atol=1e-12)
    s = 1 / np.sqrt(2)
    np.testing.assert_allclose(W.basis, [[s, s], [s, -s]], atol=1e-12)
    W = simultaneous_diagonalize([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    np.testing.assert_allclose(W.weights, [[1, 0], [0, 1]])
    np.testing.assert_allclose(W.gram, np.eye(2))


def test_simdiag_errors():
    with pytest.raises(NotCommuting) as exc:
        simultaneous_diagonalize([np.diag([1.0, 0.0]), [[0.0, 1.0], [1.0, 0.0]]])
    assert exc.value.pair == (0, 1)
    with pytest.raises(DegenerateGenerators):
        simultaneous_diagonalize([np.diag([1.0, 0.0]), np.diag([2.0, 0.0])])
    with pytest.raises(NotSymmetric):
        simultaneous_diagonalize([[[0.0, 1.0], [0.0, 0.0]]])


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_simdiag_recovers_conjugated_diagonals(n, seed):
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    # small integer entries force repeated eigenvalues in each generator
    D1 = rng.integers(-2, 3, size=n).astype(float)
    D2 = rng.integers(-2, 3, size=n).astype(float)
    D1[0], D2[0] = 5.0, 0.0
    D1[1], D2[1] = 0.0, 5.0
    W = simultaneous_diagonalize([Q @ np.diag(D1) @ Q.T, Q @ np.diag(D2) @ Q.T])
    got = sorted(map(tuple, np.round(W.weights, 8)))
    want = sorted(zip(D1, D2))
    np.testing.assert_allclose(got, want, atol=1e-8)
    np.testing.assert_allclose(W.basis.T @ W.basis, np.eye(n), atol=1e-10)


def test_exp_action_examples():
    W = simultaneous_diagonalize([np.diag([1.0, -1.0])])
    np.testing.assert_allclose(exp_action(W, [0.0], 1.0, [3.0, 4.0]), [3, 4])
    np.testing.assert_allclose(exp_action(W, [1.0], np.log(2), [1.0, 1.0]), [2, 0.5])
    W2 = simultaneous_diagonalize([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    assert np.linalg.norm(exp_action(W2, [-1.0, -1.0], 40.0, [1.0, 1.0])) <= 1e-17
    with pytest.raises(DimensionMismatch):
        exp_action(W2, [1.0], 1.0, [1.0, 1.0])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_exp_action_matches_expm_and_composes(seed):
    rng = np.random.default_rng(seed)
    n = 4
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    gens = [Q @ np.diag(rng.normal(size=n)) @ Q.T for _ in range(2)]
    W = simultaneous_diagonalize(gens)
    xi = rng.normal(size=2)
    xi *= rng.uniform(0, 5) / max(np.linalg.norm(sum(c * g for c, g in zip(xi, gens)), 2), 1e-12)
    x = rng.normal(size=n)
    M = sum(c * g for c, g in zip(xi, gens))
    np.testing.assert_allclose(exp_action(W, xi, 1.0, x), expm(M) @ x,
                               rtol=1e-9, atol=1e-9 * np.linalg.norm(x))
    s, t = rng.uniform(-1, 1, size=2)
    twice = exp_action(W, xi, s, exp_action(W, xi, t, x))
    once = exp_action(W, xi, s + t, x)
    assert np.linalg.norm(twice - once) <= 1e-10 * np.linalg.norm(once)


def test_nullspace_exact_and_float():
    from fractions import Fraction
    N = nullspace([[1, 1, 0], [0, 0, 1]], exact=True)
    assert N.shape == (3, 1)
    assert list(N[:, 0]) == [Fraction(-1), Fraction(1), Fraction(0)]
    Nf = nullspace(np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))
    np.testing.assert_allclose(np.abs(Nf[:, 0]), [2 ** -0.5, 2 ** -0.5, 0], atol=1e-12)
