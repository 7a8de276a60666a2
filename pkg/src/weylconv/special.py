"""Scalar special functions: Gauss 2F1, rank-1 multiplicative functions, and
the gamma-factor normalization constant of the spectral theory.

The 2F1 evaluator only covers real arguments z < 1, which is all the rank-1
functions need: z <= 0 is mapped into [0, 1) by the Pfaff transformation
z -> z/(z-1) and the series is summed there.  No connection formulas are
used, so arguments with z/(z-1) extremely close to 1 (hyperbolic arguments
beyond ~6) exceed the term budget and raise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import loggamma

from . import backend
from .chamber import Multiplicity, rho


class PoleError(ArithmeticError):
    """The evaluation point hits a gamma pole of the c-function."""


def _is_nonpos_int(z: complex, tol: float = 1e-12) -> bool:
    z = complex(z)
    return abs(z.imag) < tol and z.real < 0.5 and abs(z.real - round(z.real)) < tol


def gauss_2f1(a, b, c, z, tol=1e-15):
    """2F1(a, b; c; z) for real z < 1 (scalar or array z).

    Terminating cases (a or b a nonpositive integer) are summed directly as
    polynomials in z; otherwise z <= 0 goes through the Pfaff transformation
    and 0 <= z < 1 through the plain series.
    """
    a, b, c = complex(a), complex(b), complex(c)
    if _is_nonpos_int(c):
        raise ValueError("c must not be a nonpositive integer")
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if np.any(z >= 1.0):
        raise ValueError("only real z < 1 is supported")

    if _is_nonpos_int(a) or _is_nonpos_int(b):
        nmax = int(round(-min(a.real, b.real)))
        out = np.ones(z.shape, dtype=complex)
        term = np.ones(z.shape, dtype=complex)
        for k in range(nmax):
            term = term * (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
            out += term
        return out[0] if scalar else out

    out = np.empty(z.shape, dtype=complex)
    neg = z < 0.0
    if np.any(neg):
        zn = z[neg]
        x = zn / (zn - 1.0)
        pref = np.exp(-a * np.log1p(-zn))
        out[neg] = pref * backend.hyp2f1_series(a, c - b, c, x, tol)
    if np.any(~neg):
        out[~neg] = backend.hyp2f1_series(a, b, c, z[~neg], tol)
    return out[0] if scalar else out


@dataclass(frozen=True)
class JacobiParams:
    """Parameters (alpha, beta) of the rank-1 functions; alpha = p-1, beta = l.

    alpha > -1 is required so the series denominator parameter alpha + 1
    stays off the poles; the convolution formulas themselves need alpha >= 0.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        if not np.isfinite(self.alpha) or self.alpha <= -1.0:
            raise ValueError("alpha must be finite and > -1")
        if not np.isfinite(self.beta):
            raise ValueError("beta must be finite and real")

    @property
    def rho_tilde(self) -> float:
        return self.alpha + self.beta + 1.0


def _phi_direct(lam: complex, params: JacobiParams, t: np.ndarray):
    r = params.rho_tilde
    a = 0.5 * (r + 1j * lam)
    b = 0.5 * (r - 1j * lam)
    return gauss_2f1(a, b, params.alpha + 1.0, -np.sinh(t) ** 2)


#: array sizes above which jacobi_phi switches to the Chebyshev proxy
_CHEB_THRESHOLD = 512
_CHEB_TAIL = 1e-12


def _phi_chebyshev(lam: complex, params: JacobiParams, t: np.ndarray):
    """Large-batch evaluation through a certified Chebyshev interpolant.

    The function is analytic in u = cosh^2 t away from u <= 0, so on the
    batch's u-range a modest-degree interpolant reproduces the exact series;
    the degree doubles until the trailing coefficients certify the tail.
    """
    u = np.cosh(t) ** 2
    lo, hi = float(u.min()), float(u.max())
    if hi - lo < 1e-9:
        return _phi_direct(lam, params, t)

    def on_unit(xi):
        uu = 0.5 * (hi + lo) + 0.5 * (hi - lo) * xi
        return _phi_direct(lam, params, np.arccosh(np.sqrt(np.maximum(uu, 1.0))))

    deg = 64
    while True:
        coef = np.polynomial.chebyshev.chebinterpolate(on_unit, deg)
        scale = np.abs(coef).max()
        if np.abs(coef[-8:]).max() <= _CHEB_TAIL * max(scale, 1.0):
            break
        deg *= 2
        if deg > 4096:
            return _phi_direct(lam, params, t)
    xi = (2.0 * u - (hi + lo)) / (hi - lo)
    return np.polynomial.chebyshev.chebval(np.clip(xi, -1.0, 1.0), coef)


def jacobi_phi(lam, params: JacobiParams, t):
    """phi_lambda^(alpha,beta)(t) = 2F1((r+il)/2, (r-il)/2; a+1; -sinh^2 t)
    with r = alpha+beta+1; normalized to 1 at t = 0.

    Batches beyond a size threshold are routed through a Chebyshev proxy in
    cosh^2 t whose accuracy is certified against the exact series at the
    interpolation nodes (tail coefficients below 1e-12 relative)."""
    lam = complex(lam)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("t must be >= 0")
    if t.size > _CHEB_THRESHOLD:
        return _phi_chebyshev(lam, params, t)
    return _phi_direct(lam, params, t)


def psi_rank1(lam, l: float, p: float, t, theta):
    """Multiplicative function on the rank-1 doubled space:
    e^{il theta} cosh^l t * phi_lambda^{(p-1, l)}(t)."""
    if p < 1.0:
        raise ValueError("p must be >= 1")
    t = np.asarray(t, dtype=float)
    theta = np.asarray(theta, dtype=float)
    phi = jacobi_phi(lam, JacobiParams(p - 1.0, float(l)), t)
    return np.exp(1j * l * theta) * np.cosh(t) ** complex(l) * phi


def psi_constant_character(l, t, theta):
    """General-rank multiplicative function at the constant spectral point:
    e^{il theta} prod_j cosh^l t_j (the hypergeometric factor is 1 there)."""
    lc = complex(l)
    coords = np.asarray(getattr(t, "coords", t), dtype=float)
    coshprod = np.prod(np.cosh(coords) ** lc, axis=-1)
    return np.exp(1j * lc * np.asarray(theta)) * coshprod


def _c_factor_terms(lam: np.ndarray, k: Multiplicity):
    """(inner product, half multiplicity of the half root, multiplicity) for
    every positive root, with the coroot normalization <a,a^v> = 2."""
    q = k.q
    terms = []
    for i in range(q):
        terms.append((lam[i], 0.0, k.k1))            # roots 2e_i
    for i in range(q):
        terms.append((lam[i] / 2.0, k.k1 / 2.0, k.k2))  # roots 4e_i, half root 2e_i
    for i in range(q):
        for j in range(i + 1, q):
            terms.append(((lam[i] - lam[j]) / 2.0, 0.0, k.k3))
            terms.append(((lam[i] + lam[j]) / 2.0, 0.0, k.k3))
    return terms


def c_function(lam, k: Multiplicity) -> complex:
    """Gamma-factor normalization constant, normalized to 1 at lam = rho(k).

    Raises PoleError when a numerator gamma argument sits on a pole; a pole
    in a denominator only makes the value 0 and is returned as such.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    if lam.shape != (k.q,):
        raise ValueError(f"lambda must have length q = {k.q}")
    rk = np.asarray(rho(k), dtype=complex)

    logc = 0.0 + 0.0j
    zero = False
    for (x, half, kal), (xr, halfr, kalr) in zip(_c_factor_terms(lam, k),
                                                 _c_factor_terms(rk, k)):
        num, den = x + half, x + half + kal
        num_r, den_r = xr + halfr + kalr, xr + halfr
        for arg in (num, num_r):
            if _is_nonpos_int(arg):
                raise PoleError(f"gamma pole at argument {arg}")
        if _is_nonpos_int(den) or _is_nonpos_int(den_r):
            zero = True
            continue
        logc += loggamma(num) - loggamma(den) + loggamma(num_r) - loggamma(den_r)
    if zero:
        return 0.0 + 0.0j
    return complex(np.exp(logc))
