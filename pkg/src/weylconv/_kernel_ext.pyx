# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels for ranks q <= 3.

Per-sample small-matrix linear algebra (Gram-Schmidt QR, rank-one square
roots, cyclic Jacobi for the Hermitian eigenvalues, Cardano for the branch
eigenvalues) replaces the stacked LAPACK calls of the numpy backend.  Both
backends consume identical primitive draws and agree to rounding error.

Singular values are taken from the Gram matrix M*M, which squares the
conditioning: absolute eigenvalue noise scales with cosh^2(t_1 + s_1).
That keeps the smallest singular value safely above the 1 - 1e-9 clamp for
chamber points with t_1 + s_1 up to ~8, ample for the desk-scale
verification workloads; beyond that range use the numpy backend, whose
direct SVD degrades only linearly.
"""

import numpy as np

cimport cython
from libc.math cimport acosh, atan2, cosh, fabs, sinh, sqrt, tanh

cdef extern from "complex.h" nogil:
    double complex csqrt(double complex)
    double complex clog(double complex)
    double complex cexp(double complex)
    double cabs(double complex)

BACKEND_NAME = "ext"
MAX_Q = 3

cdef double SIGMA_EPS = 1e-9
cdef double complex OMEGA = -0.5 + 0.8660254037844386467637231707529362j  # exp(2 pi i/3)


cdef double complex _det(int q, double complex* m) noexcept nogil:
    if q == 1:
        return m[0]
    if q == 2:
        return m[0] * m[3] - m[1] * m[2]
    return (m[0] * (m[4] * m[8] - m[5] * m[7])
            - m[1] * (m[3] * m[8] - m[5] * m[6])
            + m[2] * (m[3] * m[7] - m[4] * m[6]))


cdef void _mgs_su(int q, double complex* a, double complex* v) noexcept nogil:
    """Two-pass modified Gram-Schmidt QR (positive R diagonal) followed by
    the principal determinant-root correction into SU(q)."""
    cdef int i, j, k, rep
    cdef double complex proj, det, scale
    cdef double nrm
    for i in range(q * q):
        v[i] = a[i]
    for j in range(q):
        for rep in range(2):
            for k in range(j):
                proj = 0
                for i in range(q):
                    proj += v[i * q + k].conjugate() * v[i * q + j]
                for i in range(q):
                    v[i * q + j] -= proj * v[i * q + k]
        nrm = 0.0
        for i in range(q):
            nrm += v[i * q + j].real * v[i * q + j].real + v[i * q + j].imag * v[i * q + j].imag
        nrm = sqrt(nrm)
        for i in range(q):
            v[i * q + j] /= nrm
    det = _det(q, v)
    scale = cexp(-clog(det) / q)
    for i in range(q * q):
        v[i] *= scale


cdef void _pmap(int q, double complex* dirs, double* radii, double complex* w) noexcept nogil:
    """Rows y_j = radii_j * dirs_j / ||dirs_j||, chained through the exact
    rank-one square roots (I - y*y)^{1/2} = I - y*y / (1 + sqrt(1 - r^2))."""
    cdef int i, j, m
    cdef double nrm, r
    cdef double c[3]
    cdef double complex y[9]
    cdef double complex ip
    for j in range(q):
        nrm = 0.0
        for i in range(q):
            nrm += dirs[j * q + i].real * dirs[j * q + i].real \
                 + dirs[j * q + i].imag * dirs[j * q + i].imag
        nrm = sqrt(nrm)
        r = radii[j]
        for i in range(q):
            y[j * q + i] = dirs[j * q + i] * (r / nrm)
        c[j] = 1.0 / (1.0 + sqrt(max(1.0 - r * r, 0.0)))
    for i in range(q):
        w[i] = y[i]
    for j in range(1, q):
        for i in range(q):
            w[j * q + i] = y[j * q + i]
        for m in range(j - 1, -1, -1):
            ip = 0
            for i in range(q):
                ip += w[j * q + i] * y[m * q + i].conjugate()
            for i in range(q):
                w[j * q + i] -= c[m] * ip * y[m * q + i]


cdef int JACOBI_P[3]
cdef int JACOBI_Q[3]
cdef int JACOBI_R[3]
JACOBI_P[0] = 0; JACOBI_Q[0] = 1; JACOBI_R[0] = 2
JACOBI_P[1] = 0; JACOBI_Q[1] = 2; JACOBI_R[1] = 1
JACOBI_P[2] = 1; JACOBI_Q[2] = 2; JACOBI_R[2] = 0


cdef void _herm_eig_desc(int q, double complex* h, double* ev) noexcept nogil:
    """Eigenvalues of a Hermitian q x q matrix, descending.

    The 3x3 case runs cyclic complex Jacobi rotations: unlike the
    trigonometric closed form (whose acos step loses accuracy on a
    double-plus-single spectrum) it keeps clustered eigenvalues accurate to
    rounding, which the arcosh downstream would otherwise amplify."""
    cdef double a00, a11, b2, mean, disc
    cdef double app, aqq, b, tau, tt, cc, ss, off, scale, tmp
    cdef double complex hh[9]
    cdef double complex apq, ph, x, y
    cdef int i, sweep, k, pi, qi, ri
    if q == 1:
        ev[0] = h[0].real
        return
    if q == 2:
        a00 = h[0].real
        a11 = h[3].real
        b2 = h[1].real * h[1].real + h[1].imag * h[1].imag
        mean = 0.5 * (a00 + a11)
        disc = sqrt(0.25 * (a00 - a11) * (a00 - a11) + b2)
        ev[0] = mean + disc
        ev[1] = mean - disc
        return
    for i in range(9):
        hh[i] = h[i]
    for sweep in range(16):
        off = (hh[1].real * hh[1].real + hh[1].imag * hh[1].imag
               + hh[2].real * hh[2].real + hh[2].imag * hh[2].imag
               + hh[5].real * hh[5].real + hh[5].imag * hh[5].imag)
        scale = (hh[0].real * hh[0].real + hh[4].real * hh[4].real
                 + hh[8].real * hh[8].real + off)
        if off <= 1e-34 * scale:
            break
        for k in range(3):
            pi = JACOBI_P[k]; qi = JACOBI_Q[k]; ri = JACOBI_R[k]
            apq = hh[pi * 3 + qi]
            b = cabs(apq)
            if b < 1e-300:
                continue
            app = hh[pi * 3 + pi].real
            aqq = hh[qi * 3 + qi].real
            ph = apq / b
            tau = (aqq - app) / (2.0 * b)
            if tau >= 0.0:
                tt = 1.0 / (tau + sqrt(1.0 + tau * tau))
            else:
                tt = -1.0 / (-tau + sqrt(1.0 + tau * tau))
            cc = 1.0 / sqrt(1.0 + tt * tt)
            ss = tt * cc
            x = hh[pi * 3 + ri]
            y = hh[qi * 3 + ri]
            hh[pi * 3 + pi] = app - tt * b
            hh[qi * 3 + qi] = aqq + tt * b
            hh[pi * 3 + qi] = 0.0
            hh[qi * 3 + pi] = 0.0
            hh[pi * 3 + ri] = cc * x - ss * ph * y
            hh[ri * 3 + pi] = hh[pi * 3 + ri].conjugate()
            hh[qi * 3 + ri] = ss * ph.conjugate() * x + cc * y
            hh[ri * 3 + qi] = hh[qi * 3 + ri].conjugate()
    ev[0] = hh[0].real
    ev[1] = hh[4].real
    ev[2] = hh[8].real
    if ev[0] < ev[1]:
        tmp = ev[0]; ev[0] = ev[1]; ev[1] = tmp
    if ev[1] < ev[2]:
        tmp = ev[1]; ev[1] = ev[2]; ev[2] = tmp
    if ev[0] < ev[1]:
        tmp = ev[0]; ev[0] = ev[1]; ev[1] = tmp


cdef void _cplx_eigs(int q, double complex* a, double complex* tau) noexcept nogil:
    """Eigenvalues of a general complex q x q matrix: closed forms plus two
    Newton polishing steps on the characteristic polynomial."""
    cdef double complex tr, det, c1, s, l1, m, p, qq, disc, u3a, u3b, u, wk, fval, fder, lam
    cdef int k, it
    if q == 1:
        tau[0] = a[0]
        return
    if q == 2:
        tr = a[0] + a[3]
        det = a[0] * a[3] - a[1] * a[2]
        s = csqrt(tr * tr - 4.0 * det)
        if tr.real * s.real + tr.imag * s.imag < 0.0:
            s = -s
        l1 = 0.5 * (tr + s)
        tau[0] = l1
        if cabs(l1) > 1e-300:
            tau[1] = det / l1
        else:
            tau[1] = 0.5 * (tr - s)
        return
    tr = a[0] + a[4] + a[8]
    c1 = (a[0] * a[4] - a[1] * a[3]) + (a[0] * a[8] - a[2] * a[6]) + (a[4] * a[8] - a[5] * a[7])
    det = _det(3, a)
    m = tr / 3.0
    p = c1 - tr * tr / 3.0
    qq = -2.0 * tr * tr * tr / 27.0 + c1 * tr / 3.0 - det
    disc = csqrt(qq * qq / 4.0 + p * p * p / 27.0)
    u3a = -qq / 2.0 + disc
    u3b = -qq / 2.0 - disc
    if cabs(u3a) >= cabs(u3b):
        u = u3a
    else:
        u = u3b
    if cabs(u) < 1e-300:
        # u^3 = 0 forces p = 0 as well: triple root at the mean
        tau[0] = m
        tau[1] = m
        tau[2] = m
        return
    u = cexp(clog(u) / 3.0)
    wk = u
    for k in range(3):
        tau[k] = wk - p / (3.0 * wk) + m
        wk = wk * OMEGA
    # safeguarded Newton polish (see _herm_eig_desc for the rationale)
    for k in range(3):
        lam = tau[k]
        fval = ((lam - tr) * lam + c1) * lam - det
        for it in range(2):
            fder = (3.0 * lam - 2.0 * tr) * lam + c1
            if cabs(fder) < 1e-300:
                break
            u3a = lam - fval / fder
            u3b = ((u3a - tr) * u3a + c1) * u3a - det
            if cabs(u3b) < cabs(fval):
                lam = u3a
                fval = u3b
            else:
                break
        tau[k] = lam


cdef int _kernel_core(int q, double* trow, double* srow,
                      double complex* v, double complex* w,
                      double* d_out, double* branch_out, double* absh_out) noexcept nogil:
    """Returns 0 on success, 1 on a singular value below 1 - eps, 2 on a
    branch eigenvalue outside the open right half-plane."""
    cdef double sh_t[3]
    cdef double ch_t[3]
    cdef double th_t[3]
    cdef double sh_s[3]
    cdef double ch_s[3]
    cdef double th_s[3]
    cdef double complex mm[9]
    cdef double complex hh[9]
    cdef double complex wt[9]
    cdef double complex tau[3]
    cdef double ev[3]
    cdef double complex acc, onep
    cdef double sig, br
    cdef int i, j, k
    for i in range(q):
        sh_t[i] = sinh(trow[i]); ch_t[i] = cosh(trow[i]); th_t[i] = tanh(trow[i])
        sh_s[i] = sinh(srow[i]); ch_s[i] = cosh(srow[i]); th_s[i] = tanh(srow[i])
    # cosh t cosh s = sinh t sinh s + cosh(t - s): evaluates the
    # near-identity configurations (w ~ -v) without cancellation noise
    for i in range(q):
        for j in range(q):
            mm[i * q + j] = cosh(trow[i] - srow[j]) * v[i * q + j] \
                + sh_t[i] * sh_s[j] * (w[i * q + j] + v[i * q + j])
    for i in range(q):
        for j in range(i, q):
            acc = 0
            for k in range(q):
                acc += mm[k * q + i].conjugate() * mm[k * q + j]
            hh[i * q + j] = acc
            if j > i:
                hh[j * q + i] = acc.conjugate()
    _herm_eig_desc(q, hh, ev)
    for i in range(q):
        if ev[i] < (1.0 - SIGMA_EPS) * (1.0 - SIGMA_EPS):
            return 1
        sig = sqrt(ev[i])
        if sig < 1.0:
            sig = 1.0
        d_out[i] = acosh(sig)
    absh_out[0] = cabs(_det(q, mm))
    # w~ = v^{-1} diag(tanh t) w diag(tanh s); a strict contraction
    for i in range(q):
        for j in range(q):
            acc = 0
            for k in range(q):
                acc += v[k * q + i].conjugate() * th_t[k] * w[k * q + j]
            wt[i * q + j] = acc * th_s[j]
    _cplx_eigs(q, wt, tau)
    br = 0.0
    for i in range(q):
        onep = 1.0 + tau[i]
        if onep.real <= 0.0:
            return 2
        br += atan2(onep.imag, onep.real)
    branch_out[0] = br
    return 0


cdef void _raise_status(int status):
    if status == 1:
        raise ValueError("singular value below 1 - eps; sampler or matrix bug")
    if status == 2:
        raise ValueError("eigenvalue of I + w~ left the right half-plane")


def _broadcast_points(t, Py_ssize_t n, int q):
    a = np.asarray(getattr(t, "coords", t), dtype=float)
    if a.ndim == 1:
        a = np.broadcast_to(a, (n, q))
    a = np.ascontiguousarray(a)
    if not a.flags.writeable:
        a = a.copy()
    return a


def su_from_gaussian(g):
    """Haar SU(q) matrices from standard complex Gaussian draws."""
    cdef double complex[:, :, ::1] gv = np.ascontiguousarray(g, dtype=complex)
    cdef Py_ssize_t n = gv.shape[0]
    cdef int q = gv.shape[1]
    if q > 3:
        raise ValueError("compiled backend supports q <= 3")
    out = np.empty((n, q, q), dtype=complex)
    cdef double complex[:, :, ::1] ov = out
    cdef Py_ssize_t idx
    if q == 1:
        out[:] = 1.0
        return out
    with nogil:
        for idx in range(n):
            _mgs_su(q, &gv[idx, 0, 0], &ov[idx, 0, 0])
    return out


def ball_from_primitives(dirs, radii):
    """Contractions from row directions and radii (see the numpy twin)."""
    cdef double complex[:, :, ::1] dv = np.ascontiguousarray(dirs, dtype=complex)
    cdef double[:, ::1] rv = np.ascontiguousarray(radii, dtype=float)
    cdef Py_ssize_t n = dv.shape[0]
    cdef int q = dv.shape[1]
    if q > 3:
        raise ValueError("compiled backend supports q <= 3")
    out = np.empty((n, q, q), dtype=complex)
    cdef double complex[:, :, ::1] ov = out
    cdef Py_ssize_t idx
    with nogil:
        for idx in range(n):
            _pmap(q, &dv[idx, 0, 0], &rv[idx, 0], &ov[idx, 0, 0])
    return out


def kernel_vw_batch(t, s, v, w):
    """(d, im_log_h, abs_h) for explicit batches of (v, w)."""
    cdef double complex[:, :, ::1] vv = np.ascontiguousarray(v, dtype=complex)
    cdef double complex[:, :, ::1] wv = np.ascontiguousarray(w, dtype=complex)
    cdef Py_ssize_t n = vv.shape[0]
    cdef int q = vv.shape[1]
    if q > 3:
        raise ValueError("compiled backend supports q <= 3")
    cdef double[:, ::1] tv = _broadcast_points(t, n, q)
    cdef double[:, ::1] sv = _broadcast_points(s, n, q)
    d = np.empty((n, q), dtype=float)
    branch = np.empty(n, dtype=float)
    absh = np.empty(n, dtype=float)
    cdef double[:, ::1] dv2 = d
    cdef double[::1] bv = branch
    cdef double[::1] av = absh
    cdef Py_ssize_t idx
    cdef int status = 0, st
    with nogil:
        for idx in range(n):
            st = _kernel_core(q, &tv[idx, 0], &sv[idx, 0], &vv[idx, 0, 0], &wv[idx, 0, 0],
                              &dv2[idx, 0], &bv[idx], &av[idx])
            if st != 0 and status == 0:
                status = st
    _raise_status(status)
    return d, branch, absh


def conv_kernel_batch(t, s, g, dirs, radii):
    """Fused sampler + kernel evaluation from raw primitives."""
    cdef double complex[:, :, ::1] gv = np.ascontiguousarray(g, dtype=complex)
    cdef double complex[:, :, ::1] dirv = np.ascontiguousarray(dirs, dtype=complex)
    cdef double[:, ::1] rv = np.ascontiguousarray(radii, dtype=float)
    cdef Py_ssize_t n = gv.shape[0]
    cdef int q = gv.shape[1]
    if q > 3:
        raise ValueError("compiled backend supports q <= 3")
    cdef double[:, ::1] tv = _broadcast_points(t, n, q)
    cdef double[:, ::1] sv = _broadcast_points(s, n, q)
    d = np.empty((n, q), dtype=float)
    branch = np.empty(n, dtype=float)
    absh = np.empty(n, dtype=float)
    cdef double[:, ::1] dv2 = d
    cdef double[::1] bv = branch
    cdef double[::1] av = absh
    cdef double complex vbuf[9]
    cdef double complex wbuf[9]
    cdef Py_ssize_t idx
    cdef int status = 0, st
    with nogil:
        for idx in range(n):
            if q == 1:
                vbuf[0] = 1.0
            else:
                _mgs_su(q, &gv[idx, 0, 0], vbuf)
            _pmap(q, &dirv[idx, 0, 0], &rv[idx, 0], wbuf)
            st = _kernel_core(q, &tv[idx, 0], &sv[idx, 0], vbuf, wbuf,
                              &dv2[idx, 0], &bv[idx], &av[idx])
            if st != 0 and status == 0:
                status = st
    _raise_status(status)
    return d, branch, absh


def hyp2f1_series(a, b, c, x, double tol=1e-15, long max_terms=2_000_000):
    """Gauss series on 0 <= x < 1 with a shared coefficient-ratio table and
    per-node early termination."""
    cdef double complex ca = a
    cdef double complex cb = b
    cdef double complex cc = c
    xarr = np.ascontiguousarray(np.asarray(x, dtype=float).ravel())
    cdef double[::1] xv = xarr
    cdef Py_ssize_t nx = xv.shape[0]
    out = np.empty(nx, dtype=complex)
    cdef double complex[::1] ov = out
    cdef double xmax = 0.0, xmin = 0.0
    cdef Py_ssize_t j
    for j in range(nx):
        if xv[j] > xmax:
            xmax = xv[j]
        if xv[j] < xmin:
            xmin = xv[j]
    if xmin < 0.0 or xmax >= 1.0:
        raise ValueError("series domain is 0 <= x < 1")
    cdef double absmax = cabs(ca)
    if cabs(cb) > absmax:
        absmax = cabs(cb)
    if cabs(cc) > absmax:
        absmax = cabs(cc)
    cdef long kmin = <long>absmax + 3
    cdef long cap = 0
    cdef double tmag = 1.0
    cdef long k
    if xmax > 0.0:
        k = 0
        cap = -1
        while k < max_terms:
            tmag *= cabs(ca + k) * cabs(cb + k) / (cabs(cc + k) * (k + 1.0)) * xmax
            k += 1
            if k >= kmin and tmag * xmax / (1.0 - xmax) * 4.0 < tol:
                cap = k
                break
        if cap < 0:
            raise RuntimeError("2F1 series did not converge within the term budget")
    ratios = np.empty(max(cap, 1), dtype=complex)
    cdef double complex[::1] rv = ratios
    for k in range(cap):
        rv[k] = (ca + k) * (cb + k) / ((cc + k) * (k + 1.0))
    cdef double complex ssum, term
    cdef double xj, tb
    with nogil:
        for j in range(nx):
            xj = xv[j]
            ssum = 1.0
            term = 1.0
            for k in range(cap):
                term = term * rv[k] * xj
                ssum += term
                if k >= kmin:
                    tb = (fabs(term.real) + fabs(term.imag)) * xj / (1.0 - xj) * 4.0
                    if tb < tol:
                        break
            ov[j] = ssum
    return out.reshape(np.asarray(x).shape)
