"""Deterministic rank-1 quadrature for the convolutions on [0,oo) x R.

At rank 1 the group integral collapses to the unit disk: the kernel point is

    z(r, theta) = r e^{i theta} sinh t sinh s + cosh t cosh s,

mapped to the pair (arcosh |z|, theta_1 + theta_2 + Arg z).  Re z >=
cosh(t-s) > 0, so the principal argument is the analytic branch.  The disk
measure (alpha/pi) (1-r^2)^{alpha-1} r dr dtheta with alpha = p-1 is resolved
exactly by Gauss-Jacobi nodes in u = r^2 and Gauss-Legendre nodes in theta;
theta runs over half the circle and the integrand is symmetrized over +-theta
(the chamber part is even and the angle odd in theta).  At p = 1 the radial
factor degenerates and r is pinned to 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_jacobi

from .chamber import as_element
from .special import JacobiParams, jacobi_phi, psi_rank1


@dataclass(frozen=True)
class QuadratureRule:
    """Flattened product rule on (r, theta) in [0,1] x [0,pi]; weights sum to 1."""

    r: np.ndarray
    theta: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.weights.size


def rank1_rule(p: float, n_r: int = 200, n_theta: int = 200) -> QuadratureRule:
    """Rule for the disk measure (alpha/pi)(1-r^2)^{alpha-1} r dr dtheta, alpha = p-1 > 0."""
    alpha = p - 1.0
    if alpha <= 0.0:
        raise ValueError("rank1_rule needs p > 1; use rank1_rule_degenerate at p = 1")
    xj, wj = roots_jacobi(n_r, alpha - 1.0, 0.0)
    u = 0.5 * (xj + 1.0)
    wu = wj * 2.0 ** (-alpha)            # sum_j wu f(u_j) = int_0^1 f (1-u)^{a-1} du
    xt, wt = np.polynomial.legendre.leggauss(n_theta)
    theta = 0.5 * np.pi * (xt + 1.0)
    wth = 0.5 * np.pi * wt
    rr, tt = np.meshgrid(np.sqrt(u), theta, indexing="ij")
    ww = np.outer(wu, wth) * (2.0 * alpha / np.pi) * 0.5   # r dr = du/2
    return QuadratureRule(rr.ravel(), tt.ravel(), ww.ravel())


def rank1_rule_degenerate(n_theta: int = 400) -> QuadratureRule:
    """Rule at p = 1: the radius is pinned to 1 and only theta is integrated."""
    xt, wt = np.polynomial.legendre.leggauss(n_theta)
    theta = 0.5 * np.pi * (xt + 1.0)
    return QuadratureRule(np.ones(n_theta), theta, 0.5 * wt)


def _rule_for(p: float, n_r: int, n_theta: int) -> QuadratureRule:
    if p == 1.0:
        return rank1_rule_degenerate(n_theta)
    return rank1_rule(p, n_r, n_theta)


def _scalar_pair(x):
    el = as_element(x)
    if el.q != 1:
        raise ValueError("rank-1 quadrature requires q = 1")
    return el.t.coords[0], el.theta


class Rank1Convolution:
    """Evaluated convolution of two point measures on [0,oo) x R at rank 1.

    ``integrate(f)`` applies a vectorized f(d, theta) to the kernel nodes,
    averaging f over the +-theta reflections of each node.
    """

    def __init__(self, s, t, p: float, n_r: int = 200, n_theta: int = 200):
        if p < 1.0:
            raise ValueError("p must be >= 1 at rank 1")
        (ts, th1), (tt, th2) = _scalar_pair(s), _scalar_pair(t)
        self.p = float(p)
        self.theta_sum = th1 + th2
        self.rule = _rule_for(p, n_r, n_theta)
        z = (self.rule.r * np.exp(1j * self.rule.theta) * np.sinh(ts) * np.sinh(tt)
             + np.cosh(ts) * np.cosh(tt))
        self.d = np.arccosh(np.maximum(np.abs(z), 1.0))
        self.angle = np.angle(z)

    def integrate(self, f) -> complex:
        up = f(self.d, self.theta_sum + self.angle)
        dn = f(self.d, self.theta_sum - self.angle)
        return complex(np.sum(self.rule.weights * 0.5 * (np.asarray(up) + np.asarray(dn))))

    def integrate_even_angle(self, g, l: float) -> complex:
        """Integral of e^{il theta} g(d) using the +-theta symmetry: the pair
        average turns the angle factor into cos(l Arg z)."""
        vals = np.asarray(g(self.d))
        core = np.sum(self.rule.weights * vals * np.cos(l * self.angle))
        return complex(np.exp(1j * l * self.theta_sum) * core)


def convolve_quadrature_rank1(s, t, p: float, n_r: int = 200, n_theta: int = 200) -> Rank1Convolution:
    """Quadrature representation of the convolution of point measures at q = 1."""
    return Rank1Convolution(s, t, p, n_r, n_theta)


def product_formula_residual_rank1(lam, l: float, p: float, s: float, t: float,
                                   theta1: float, theta2: float,
                                   n_r: int = 200, n_theta: int = 200) -> float:
    """|psi(s,theta1) psi(t,theta2) - quadrature(psi)| for the rank-1
    multiplicative functions psi = e^{il theta} cosh^l phi_lambda."""
    conv = Rank1Convolution((s, theta1), (t, theta2), p, n_r, n_theta)
    params = JacobiParams(p - 1.0, float(l))

    def g(d):
        return np.cosh(d) ** complex(l) * jacobi_phi(lam, params, d)

    lhs = complex(psi_rank1(lam, l, p, s, theta1) * psi_rank1(lam, l, p, t, theta2))
    rhs = conv.integrate_even_angle(g, l)
    return abs(lhs - rhs)


def chamber_translate_rank1(f, x: float, ys, p: float, l: float,
                            n_r: int = 120, n_theta: int = 120,
                            signed: bool = False, chunk: int = 64) -> np.ndarray:
    """Translate T_x f(y) of the rank-1 chamber convolutions, vectorized in y.

    ``signed=False`` uses the kernel weight Re(z^l) / (cosh x cosh y)^l of the
    probability-preserving chamber convolution; ``signed=True`` uses the
    unimodular branch power, whose +-theta average is cos(l Arg z).
    """
    rule = _rule_for(p, n_r, n_theta)
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    out = np.empty(ys.shape, dtype=complex)
    base = rule.r * np.exp(1j * rule.theta)
    for start in range(0, ys.size, chunk):
        yblk = ys[start:start + chunk, None]
        z = base[None, :] * np.sinh(x) * np.sinh(yblk) + np.cosh(x) * np.cosh(yblk)
        d = np.arccosh(np.maximum(np.abs(z), 1.0))
        ang = np.angle(z)
        if signed:
            wgt = np.cos(l * ang)
        else:
            wgt = np.abs(z) ** l * np.cos(l * ang) / (np.cosh(x) * np.cosh(yblk)) ** l
        out[start:start + chunk] = np.sum(rule.weights[None, :] * wgt * np.asarray(f(d)), axis=1)
    return out


def section5_residual_rank1(s: float, t: float, p: float, l: float, lam,
                            n_r: int = 200, n_theta: int = 200) -> float:
    """Residual of the chamber product formula for phi_lambda at rank 1.

    The kernel weight is the real part Re(z^l); the formula holds for complex
    spectral parameters as well, with complex function values.
    """
    params = JacobiParams(p - 1.0, float(l))
    phi_s = complex(jacobi_phi(lam, params, s))
    phi_t = complex(jacobi_phi(lam, params, t))
    rhs = chamber_translate_rank1(lambda d: jacobi_phi(lam, params, d), s,
                                  np.array([t]), p, l, n_r, n_theta)[0]
    return abs(phi_s * phi_t - complex(rhs))
