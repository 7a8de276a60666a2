"""Convolution kernel maps on complex q x q matrices (numpy implementation).

The kernel of every convolution here is the matrix

    M(t, s; v, w) = diag(sinh t) . w . diag(sinh s) + diag(cosh t) . v . diag(cosh s)

with v special unitary and w a contraction.  Three derived quantities drive
everything downstream:

* ``d``       -- arcosh of the singular values of M (the chamber part),
* ``im_log_h``-- the analytic branch of Im log det M, realized as the sum of
                 principal arguments of the eigenvalues of I + v^{-1}
                 diag(tanh t) w diag(tanh s); every factor stays in the open
                 right half-plane because that matrix is a strict contraction,
                 so the sum is continuous and vanishes at t = 0,
* ``abs_h``   -- |det M|, which must equal prod_j cosh d_j.

This module is stacked-LAPACK numpy throughout.  It doubles as the fallback
backend for any rank and as the reference the compiled extension is tested
against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chamber import CLAMP_EPS, ChamberPoint, project_to_chamber

BACKEND_NAME = "python"


class SingularValueError(ValueError):
    """A singular value fell below 1 - CLAMP_EPS (broken sampler or matrix bug)."""


class BranchDomainError(ValueError):
    """An eigenvalue of I + w~ left the open right half-plane (impossible for
    valid inputs; signals sampler corruption)."""


def _as_batch_points(t, n: int) -> np.ndarray:
    """Return chamber coordinates as an (n, q) float array."""
    a = np.asarray(getattr(t, "coords", t), dtype=float)
    if a.ndim == 1:
        return np.broadcast_to(a, (n, a.shape[0]))
    if a.shape[0] != n:
        raise ValueError(f"per-sample chamber points have length {a.shape[0]}, expected {n}")
    return a


def _as_batch_matrices(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim == 2:
        a = a[None]
    if a.ndim != 3 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {a.shape}")
    return a


def argument_matrix(t, s, v, w) -> np.ndarray:
    """diag(sinh t) . w . diag(sinh s) + diag(cosh t) . v . diag(cosh s)."""
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if v.shape != w.shape:
        raise ValueError(f"shape mismatch: v {v.shape} vs w {w.shape}")
    single = v.ndim == 2
    v, w = _as_batch_matrices(v), _as_batch_matrices(w)
    n, q = v.shape[0], v.shape[1]
    if v.shape[1:] != (q, q):
        raise ValueError("v and w must be q x q")
    tb, sb = _as_batch_points(t, n), _as_batch_points(s, n)
    if tb.shape[1] != q or sb.shape[1] != q:
        raise ValueError("chamber points do not match matrix size")
    m = (np.sinh(tb)[:, :, None] * w * np.sinh(sb)[:, None, :]
         + np.cosh(tb)[:, :, None] * v * np.cosh(sb)[:, None, :])
    return m[0] if single else m


def _stable_m(tb, sb, v, w):
    """Same matrix as argument_matrix, assembled through the identity
    cosh t cosh s = sinh t sinh s + cosh(t - s), which keeps the
    near-identity configurations (w ~ -v) free of cancellation noise that
    arcosh would amplify by a square root."""
    return (np.cosh(tb[:, :, None] - sb[:, None, :]) * v
            + np.sinh(tb)[:, :, None] * np.sinh(sb)[:, None, :] * (w + v))


def kernel_vw_batch(t, s, v, w):
    """Evaluate (d, im_log_h, abs_h) for batches of explicit (v, w).

    ``t`` and ``s`` may be single chamber points or per-sample (n, q) arrays.
    Returns ``d`` of shape (n, q) sorted descending, and two length-n vectors.
    """
    v, w = _as_batch_matrices(v), _as_batch_matrices(w)
    n, q = v.shape[0], v.shape[1]
    tb, sb = _as_batch_points(t, n), _as_batch_points(s, n)

    if q == 1:
        # scalar arithmetic; the cosh(t-s) split keeps the near-identity
        # cancellation exact (w ~ -v), where arcosh amplifies any noise
        m = (np.cosh(tb[:, 0] - sb[:, 0]) * v[:, 0, 0]
             + np.sinh(tb[:, 0]) * np.sinh(sb[:, 0]) * (w[:, 0, 0] + v[:, 0, 0]))
        absm = np.abs(m)
        if np.any(absm < 1.0 - CLAMP_EPS):
            raise SingularValueError("singular value below 1 - eps at rank 1")
        d = np.arccosh(np.maximum(absm, 1.0))[:, None]
        # Re m > 0 because |w~| = |tanh tanh w| < 1, so the principal argument
        # of m is already the analytic branch
        branch = np.angle(m)
        return d, branch, absm

    m = _stable_m(tb, sb, v, w)
    sig = np.linalg.svd(m, compute_uv=False)
    if np.any(sig < 1.0 - CLAMP_EPS):
        raise SingularValueError(
            f"singular value {sig.min()} below 1 - eps; sampler or matrix bug")
    d = np.arccosh(np.maximum(sig, 1.0))

    det = np.linalg.det(m)
    absh = np.abs(det)

    wt = (np.conj(np.swapaxes(v, -1, -2))
          @ (np.tanh(tb)[:, :, None] * w * np.tanh(sb)[:, None, :]))
    tau = np.linalg.eigvals(wt)
    one = 1.0 + tau
    if np.any(one.real <= 0.0):
        raise BranchDomainError("eigenvalue of I + w~ left the right half-plane")
    branch = np.angle(one).sum(axis=-1)
    return d, branch, absh


def su_from_gaussian(g) -> np.ndarray:
    """Map standard complex Gaussian matrices to Haar-distributed SU(q).

    QR with the R diagonal rephased positive gives a Haar unitary; dividing by
    the principal q-th root of its determinant pushes Haar(U(q)) forward to
    Haar(SU(q)) because the map is left-equivariant under SU(q).
    """
    g = _as_batch_matrices(g)
    n, q = g.shape[0], g.shape[1]
    if q == 1:
        return np.ones((n, 1, 1), dtype=complex)
    qmat, r = np.linalg.qr(g)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    qmat = qmat * (diag / np.abs(diag))[:, None, :]
    det = np.linalg.det(qmat)
    return qmat * np.exp(-np.log(det) / q)[:, None, None]


def ball_from_primitives(dirs, radii) -> np.ndarray:
    """Assemble contractions from row directions and radii.

    Row j of the result is y_j (I - y_{j-1}* y_{j-1})^{1/2} ... (I - y_1* y_1)^{1/2}
    with y_j = radii_j * dirs_j / ||dirs_j||.  The square roots of the rank-one
    deflations are exact: (I - y* y)^{1/2} = I - y* y / (1 + sqrt(1 - ||y||^2)).
    """
    dirs = _as_batch_matrices(dirs)
    n, q = dirs.shape[0], dirs.shape[1]
    radii = np.asarray(radii, dtype=float)
    if radii.shape != (n, q):
        raise ValueError(f"radii must have shape {(n, q)}, got {radii.shape}")
    norms = np.linalg.norm(dirs, axis=-1)
    y = dirs * (radii / norms)[:, :, None]
    if q == 1:
        return y
    c = 1.0 / (1.0 + np.sqrt(np.maximum(1.0 - radii**2, 0.0)))
    w = np.empty_like(y)
    w[:, 0, :] = y[:, 0, :]
    for j in range(1, q):
        z = y[:, j, :].copy()
        for mth in range(j - 1, -1, -1):
            ip = np.sum(z * np.conj(y[:, mth, :]), axis=-1)
            z -= (c[:, mth] * ip)[:, None] * y[:, mth, :]
        w[:, j, :] = z
    return w


def conv_kernel_batch(t, s, g, dirs, radii):
    """Fused sampler + kernel evaluation from raw primitives."""
    v = su_from_gaussian(g)
    w = ball_from_primitives(dirs, radii)
    return kernel_vw_batch(t, s, v, w)


def _series_cap(a, b, c, xmax, tol, max_terms):
    """Number of terms after which the worst-node tail is below tol."""
    if xmax <= 0.0:
        return 1
    kmin = int(np.ceil(max(abs(a), abs(b), abs(c)))) + 2
    tmag = 1.0
    k = 0
    while k < max_terms:
        tmag *= abs(a + k) * abs(b + k) / (abs(c + k) * (k + 1.0)) * xmax
        k += 1
        if k >= kmin and tmag * xmax / (1.0 - xmax) * 4.0 < tol:
            return k
    return -1


def hyp2f1_series(a, b, c, x, tol=1e-15, max_terms=2_000_000) -> np.ndarray:
    """Gauss series sum_k (a)_k (b)_k / ((c)_k k!) x^k for 0 <= x < 1."""
    a, b, c = complex(a), complex(b), complex(c)
    x = np.asarray(x, dtype=float)
    shape = x.shape
    x = x.ravel()
    if x.size and (x.min() < 0.0 or x.max() >= 1.0):
        raise ValueError("series domain is 0 <= x < 1")
    xmax = float(x.max()) if x.size else 0.0
    cap = _series_cap(a, b, c, xmax, tol, max_terms)
    if cap < 0:
        raise ConvergenceError(
            f"2F1 series did not converge within {max_terms} terms (x up to {xmax})")
    out = np.ones_like(x, dtype=complex)
    term = np.ones_like(out)
    kmin = int(np.ceil(max(abs(a), abs(b), abs(c)))) + 2
    for k in range(cap):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x
        out += term
        if k >= kmin:
            tail = np.abs(term) * x / (1.0 - x) * 4.0
            if tail.max() < tol:
                break
    return out.reshape(shape)


class ConvergenceError(RuntimeError):
    """Series exceeded the term budget (argument too close to 1)."""


# ---------------------------------------------------------------------------
# single-sample convenience API


def _single(t, s, v, w):
    d, branch, absh = kernel_vw_batch(t, s, v[None], w[None])
    return d[0], float(branch[0]), float(absh[0])


def kernel_d(t, s, v, w) -> ChamberPoint:
    """Chamber part: arcosh of the descending singular values of M."""
    v = _as_batch_matrices(np.asarray(v, complex))
    w = _as_batch_matrices(np.asarray(w, complex))
    tb, sb = _as_batch_points(t, 1), _as_batch_points(s, 1)
    sig = np.linalg.svd(_stable_m(tb, sb, v, w), compute_uv=False)[0]
    if sig.min() < 1.0 - CLAMP_EPS:
        raise SingularValueError(
            f"singular value {sig.min()} below 1 - eps; sampler or matrix bug")
    return ChamberPoint.of(np.arccosh(project_to_chamber(sig).array))


def branch_im_log_h(t, s, v, w) -> float:
    """Analytic branch of Im log det M, zero at t = s = 0."""
    _, branch, _ = _single(t, s, np.asarray(v, complex), np.asarray(w, complex))
    return branch


def abs_h(t, s, v, w) -> float:
    """|det M|; equals prod_j cosh d_j up to rounding."""
    _, _, a = _single(t, s, np.asarray(v, complex), np.asarray(w, complex))
    return a


def weight_real_power(t, s, v, w, l: float) -> float:
    """Re of the branch power h^l, i.e. |h|^l cos(l Im log h)."""
    _, branch, a = _single(t, s, np.asarray(v, complex), np.asarray(w, complex))
    return float(a**l * np.cos(l * branch))


def weight_real_power_batch(absh, branch, l: float) -> np.ndarray:
    return absh**l * np.cos(l * branch)


@dataclass(frozen=True)
class KernelSample:
    """One integration point (v, w) with its derived kernel outputs."""

    v: np.ndarray
    w: np.ndarray
    d: ChamberPoint
    im_log_h: float
    abs_h: float

    def validate(self, atol=1e-10):
        q = self.v.shape[0]
        eye = np.eye(q)
        if np.abs(self.v.conj().T @ self.v - eye).max() > atol:
            raise ValueError("v is not unitary")
        if abs(np.linalg.det(self.v) - 1.0) > atol:
            raise ValueError("v is not special unitary")
        if np.linalg.eigvalsh(eye - self.w.conj().T @ self.w).min() < -atol:
            raise ValueError("I - w*w is not positive semidefinite")
        coshprod = float(np.prod(np.cosh(self.d.array)))
        if abs(self.abs_h - coshprod) > 1e-9 * max(1.0, coshprod):
            raise ValueError("|h| does not match prod cosh d_j")
        return self


def make_kernel_sample(t, s, v, w) -> KernelSample:
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    d, branch, a = _single(t, s, v, w)
    return KernelSample(v, w, ChamberPoint.of(d), branch, a).validate()
