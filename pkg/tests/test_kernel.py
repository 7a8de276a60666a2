import numpy as np
import pytest

from weylconv import backend, sampling
from weylconv.kernel import (SingularValueError, abs_h, argument_matrix,
                             branch_im_log_h, kernel_d, kernel_vw_batch,
                             make_kernel_sample, weight_real_power)

from _oracles import branch_by_continuation

RNG = np.random.default_rng(123)


def _random_vw(q, rng, p=None):
    v = sampling.sample_su(q, rng)
    w, _ = sampling.sample_ball(p if p is not None else 2 * q + 0.5, q, rng)
    return v, w


def test_argument_matrix_t_zero():
    q = 2
    v, w = _random_vw(q, RNG)
    s = np.array([1.2, 0.4])
    m = argument_matrix(np.zeros(q), s, v, w)
    assert np.allclose(m, v * np.cosh(s)[None, :], atol=1e-14)


def test_argument_matrix_identity_pair():
    t = np.array([1.7, 0.6])
    m = argument_matrix(t, t, np.eye(2, dtype=complex), -np.eye(2, dtype=complex))
    assert np.allclose(m, np.eye(2), atol=1e-12)


def test_argument_matrix_scalar_case():
    t = np.arccosh(np.sqrt(2.0))
    m = argument_matrix([t], [t], np.ones((1, 1), complex), np.ones((1, 1), complex))
    assert m[0, 0] == pytest.approx(3.0, abs=1e-12)


def test_argument_matrix_shape_mismatch():
    with pytest.raises(ValueError):
        argument_matrix([1.0], [1.0], np.eye(2, dtype=complex), np.eye(3, dtype=complex))


def test_kernel_d_unitary_invariance_at_t_zero():
    for q in (1, 2, 3):
        v, w = _random_vw(q, RNG)
        s = np.sort(RNG.uniform(0, 2, q))[::-1].copy()
        d = kernel_d(np.zeros(q), s, v, w)
        assert np.allclose(d.array, s, atol=1e-10)


def test_kernel_d_identity_pair_is_zero():
    t = np.array([2.0, 0.8])
    d = kernel_d(t, t, np.eye(2, dtype=complex), -np.eye(2, dtype=complex))
    assert np.allclose(d.array, 0.0, atol=1e-12)


def test_kernel_d_rank1_scalar_formula():
    for _ in range(20):
        t, s = RNG.uniform(0, 2, 2)
        phi, psi = RNG.uniform(-np.pi, np.pi, 2)
        r = RNG.uniform(0, 1)
        v = np.array([[np.exp(1j * phi)]])
        w = np.array([[r * np.exp(1j * psi)]])
        d = kernel_d([t], [s], v, w).array[0]
        expected = np.arccosh(abs(r * np.exp(1j * (psi - phi)) * np.sinh(t) * np.sinh(s)
                                  + np.cosh(t) * np.cosh(s)))
        assert d == pytest.approx(expected, abs=1e-12)


def test_kernel_d_rejects_bad_singular_values():
    # a non-contraction w breaks the sigma >= 1 guarantee
    t = np.array([1.0])
    v = np.array([[1.0 + 0j]])
    w = np.array([[-1.2 + 0j]])
    with pytest.raises((SingularValueError, ValueError)):
        kernel_d(t, t, v, w)


def test_branch_zero_cases():
    t = np.array([1.3, 0.5])
    assert branch_im_log_h(t, t, np.eye(2, dtype=complex), -np.eye(2, dtype=complex)) == 0.0
    v, w = _random_vw(2, RNG)
    assert branch_im_log_h(np.zeros(2), t, v, w) == 0.0
    assert branch_im_log_h(t, np.zeros(2), v, w) == 0.0


def test_branch_matches_continuation_oracle():
    for q in (1, 2, 3):
        for _ in range(4):
            t = np.sort(RNG.uniform(0, 2.5, q))[::-1].copy()
            s = np.sort(RNG.uniform(0, 2.5, q))[::-1].copy()
            v, w = _random_vw(q, RNG)
            got = branch_im_log_h(t, s, v, w)
            ref = branch_by_continuation(t, s, v, w)
            assert got == pytest.approx(ref, abs=1e-6)


def test_branch_can_leave_principal_range():
    # the branch must not wrap into (-pi, pi]: scalar contractions near the
    # tangency angle push each eigenvalue argument toward asin|tau|, so at
    # q = 3 the sum exceeds pi
    t = np.array([3.0, 3.0, 3.0])
    tt = np.tanh(3.0) ** 2
    phi = np.arccos(-tt)
    w = np.exp(1j * phi) * np.eye(3, dtype=complex)
    b = branch_im_log_h(t, t, np.eye(3, dtype=complex), w)
    assert b == pytest.approx(3.0 * np.angle(1.0 + tt * np.exp(1j * phi)), abs=1e-10)
    assert abs(b) > np.pi
    # and it still matches the determinant continuation oracle out there
    ref = branch_by_continuation(t, t, np.eye(3, dtype=complex), w, steps=8000)
    assert b == pytest.approx(ref, abs=1e-6)


def test_abs_h_examples():
    q = 2
    v, w = _random_vw(q, RNG)
    s = np.array([1.5, 0.2])
    assert abs_h(np.zeros(q), s, v, w) == pytest.approx(np.cosh(s).prod(), rel=1e-12)
    t = np.array([1.1, 0.3])
    assert abs_h(t, t, np.eye(2, dtype=complex), -np.eye(2, dtype=complex)) == pytest.approx(1.0)


def test_abs_h_equals_cosh_product_of_d():
    for q in (2, 3):
        for _ in range(10):
            t = np.sort(RNG.uniform(0, 2.5, q))[::-1].copy()
            s = np.sort(RNG.uniform(0, 2.5, q))[::-1].copy()
            v, w = _random_vw(q, RNG)
            ah = abs_h(t, s, v, w)
            coshprod = np.cosh(kernel_d(t, s, v, w).array).prod()
            assert ah == pytest.approx(coshprod, rel=1e-9)


def test_weight_real_power():
    q = 2
    v, w = _random_vw(q, RNG)
    t = np.array([1.0, 0.5])
    s = np.array([0.8, 0.1])
    assert weight_real_power(t, s, v, w, 0.0) == 1.0
    m = argument_matrix(t, s, v, w)
    assert weight_real_power(t, s, v, w, 1.0) == pytest.approx(
        np.linalg.det(m).real, rel=1e-10)


def test_weight_positive_in_guaranteed_range():
    rng = np.random.default_rng(17)
    for q in (1, 2, 3):
        for _ in range(200):
            t = np.sort(rng.uniform(0, 3, q))[::-1].copy()
            s = np.sort(rng.uniform(0, 3, q))[::-1].copy()
            v, w = _random_vw(q, rng)
            assert weight_real_power(t, s, v, w, 1.0 / q) >= -1e-12
            assert weight_real_power(t, s, v, w, -1.0 / q) >= -1e-12


def test_transpose_symmetry():
    for q in (2, 3):
        t = np.sort(RNG.uniform(0, 2, q))[::-1].copy()
        s = np.sort(RNG.uniform(0, 2, q))[::-1].copy()
        v, w = _random_vw(q, RNG)
        d1 = kernel_d(t, s, v, w).array
        d2 = kernel_d(s, t, v.T.copy(), w.T.copy()).array
        assert np.allclose(d1, d2, atol=1e-10)
        assert abs_h(t, s, v, w) == pytest.approx(abs_h(s, t, v.T.copy(), w.T.copy()), rel=1e-12)


def test_support_bound_sampled():
    rng = np.random.default_rng(2)
    for q in (1, 2, 3):
        t = np.sort(rng.uniform(0, 3, q))[::-1].copy()
        s = np.sort(rng.uniform(0, 3, q))[::-1].copy()
        g = sampling.draw_su_gaussian(q, 20_000, rng)
        dirs, radii = sampling.draw_ball_primitives(2 * q + 0.5, q, 20_000, rng)
        d, _, _ = backend.conv_kernel_batch(t, s, g, dirs, radii)
        assert np.all(d[:, 0] <= t[0] + s[0] + 1e-9)


def test_kernel_sample_validation():
    v, w = _random_vw(2, RNG)
    ks = make_kernel_sample(np.array([1.0, 0.4]), np.array([0.7, 0.2]), v, w)
    assert ks.abs_h > 0
    with pytest.raises(ValueError):
        make_kernel_sample(np.array([1.0, 0.4]), np.array([0.7, 0.2]),
                           1.1 * v, w)  # not unitary


def test_generic_rank_fallback():
    # ranks beyond the compiled limit run through the numpy path; the
    # structural identities must hold there unchanged
    q = 5
    rng = np.random.default_rng(31)
    t = np.sort(rng.uniform(0, 2, q))[::-1].copy()
    s = np.sort(rng.uniform(0, 2, q))[::-1].copy()
    g = sampling.draw_su_gaussian(q, 500, rng)
    dirs, radii = sampling.draw_ball_primitives(2 * q + 0.5, q, 500, rng)
    d, br, ah = backend.conv_kernel_batch(t, s, g, dirs, radii)
    assert np.all(d[:, 0] <= t[0] + s[0] + 1e-9)
    assert np.abs(ah - np.cosh(d).prod(axis=1)).max() < 1e-9 * ah.max()
    eye = np.eye(q, dtype=complex)
    dd, bb, aa = kernel_vw_batch(t, t, eye[None], -eye[None])
    assert np.abs(dd).max() == 0.0 and bb[0] == 0.0


def test_batch_accepts_per_sample_points():
    q = 2
    n = 64
    rng = np.random.default_rng(8)
    ts = np.sort(rng.uniform(0, 2, (n, q)), axis=1)[:, ::-1].copy()
    ss = np.sort(rng.uniform(0, 2, (n, q)), axis=1)[:, ::-1].copy()
    v = sampling.sample_su(q, rng, n)
    w = sampling.sample_ball_batch(2 * q + 0.5, q, n, rng)
    d, br, ah = kernel_vw_batch(ts, ss, v, w)
    for i in (0, 13, 50):
        di = kernel_d(ts[i], ss[i], v[i], w[i]).array
        assert np.allclose(d[i], di, atol=1e-10)
