"""Verification functionals: the numerical checks behind the test harness.

Stochastic checks return raw discrepancies together with standard errors so
callers can apply a 3-sigma rule; deterministic quadrature checks return
residuals to compare against fixed tolerances.
"""

from __future__ import annotations

import numpy as np

from . import backend, sampling
from .chamber import HypergroupElement
from .convolution import _element, _kernel_draws, convolve_mc, resample_atoms
from .kernel import argument_matrix, kernel_vw_batch, weight_real_power_batch
from .measures import EmpiricalMeasure, standardized_discrepancy
from .quadrature import section5_residual_rank1


def random_chamber(q: int, rng, t_max: float = 3.0, n: int | None = None):
    """Uniform coordinates on [0, t_max], sorted descending per row."""
    shape = (q,) if n is None else (n, q)
    return np.sort(rng.uniform(0.0, t_max, size=shape), axis=-1)[..., ::-1].copy()


def constant_character_target(s, t, l) -> complex:
    sa, ta = _element(s).t.array, _element(t).t.array
    return complex(np.prod((np.cosh(sa) * np.cosh(ta)) ** complex(l)))


def check_constant_character(s, t, p: float, l, n: int, rng):
    """Monte Carlo mean of the branch power h^l; its expectation is
    prod_j (cosh s_j cosh t_j)^l.  Returns (estimate, standard_error)."""
    s, t = _element(s), _element(t)
    q = s.q
    lc = complex(l)
    d, branch, absh = _kernel_draws(s.t.array, t.t.array, p, q, n, rng)
    vals = np.exp(lc * (np.log(absh) + 1j * branch))
    est = complex(vals.mean())
    se = float(np.sqrt(vals.real.var(ddof=1) + vals.imag.var(ddof=1)) / np.sqrt(n))
    return est, se


def check_section5_formula(s, t, p: float, l: float, lam, mode: str = "quadrature",
                           n_r: int = 200, n_theta: int = 200,
                           n: int = 100_000, rng=None) -> float:
    """Residual of the chamber product formula.

    Quadrature mode is exact rank-1; Monte Carlo mode restricts the test
    function to the constant spectral point, where the identity closes in
    elementary terms at any rank.
    """
    if mode == "quadrature":
        se, te = _element(s), _element(t)
        if se.q != 1:
            raise ValueError("quadrature mode requires q = 1")
        return section5_residual_rank1(se.t.coords[0], te.t.coords[0],
                                       p, l, lam, n_r, n_theta)
    if mode == "mc":
        est, _ = check_constant_character(s, t, p, l, n, rng)
        return abs(est - constant_character_target(_element(s).t, _element(t).t, l))
    raise ValueError("mode must be 'quadrature' or 'mc'")


def check_commutativity(s, t, p: float, n: int, rng) -> float:
    m1 = convolve_mc(s, t, p, n, rng)
    m2 = convolve_mc(t, s, p, n, rng)
    return standardized_discrepancy(m1, m2)


def _convolve_cloud(d_left, th_left, d_right, th_right, p: float, q: int, rng) -> EmpiricalMeasure:
    nL = 1 if np.asarray(d_left).ndim == 1 else np.asarray(d_left).shape[0]
    nR = 1 if np.asarray(d_right).ndim == 1 else np.asarray(d_right).shape[0]
    n = max(nL, nR)
    d, branch, _ = _kernel_draws(d_left, d_right, p, q, n, rng)
    return EmpiricalMeasure(d, np.asarray(th_left) + np.asarray(th_right) + branch)


def check_associativity(r, s, t, p: float, n: int, rng) -> float:
    """Standardized moment gap between (r*s)*t and r*(s*t), each realized by
    two-stage sampling (resample an inner atom, convolve with the third point)."""
    r, s, t = _element(r), _element(s), _element(t)
    q = r.q
    inner_rs = convolve_mc(r, s, p, n, rng)
    d_a, th_a = resample_atoms(inner_rs, n, rng)
    left = _convolve_cloud(d_a, th_a, t.t.array, t.theta, p, q, rng)
    inner_st = convolve_mc(s, t, p, n, rng)
    d_b, th_b = resample_atoms(inner_st, n, rng)
    right = _convolve_cloud(r.t.array, r.theta, d_b, th_b, p, q, rng)
    return standardized_discrepancy(left, right)


def check_involution(t, theta: float, p: float, n: int, rng):
    """Identity recovery: the kernel at (v, w) = (I, -I) must send the pair
    ((t, theta), (t, -theta)) to (0, 0); random sampling must approach it.

    Returns (direct_deviation, closest_sample_distance)."""
    tp = _element((t, theta))
    q = tp.q
    eye = np.eye(q, dtype=complex)
    d, branch, _ = kernel_vw_batch(tp.t.array, tp.t.array, eye[None], -eye[None])
    direct = max(float(np.abs(d).max()), abs(float(branch[0])))
    m = convolve_mc(tp, HypergroupElement(tp.t, -tp.theta), p, n, rng)
    dist = np.sqrt((m.d**2).sum(axis=1) + m.theta**2)
    return direct, float(dist.min())


def support_bound_violations(q: int, n: int, rng, t_max: float = 3.0,
                             slack: float = 1e-9) -> int:
    """Count violations of max_j d_j <= s_1 + t_1 over random draws.

    Half the draws use the flat interior ball law (p = 2q), half the boundary
    law, with fresh random chamber pairs per sample."""
    total = 0
    for degenerate in (False, True):
        m = n - n // 2 if degenerate else n // 2
        ts = random_chamber(q, rng, t_max, m)
        ss = random_chamber(q, rng, t_max, m)
        g = sampling.draw_su_gaussian(q, m, rng)
        if degenerate:
            dirs, radii = sampling.draw_ball_primitives_degenerate(q, m, rng)
        else:
            dirs, radii = sampling.draw_ball_primitives(2 * q, q, m, rng)
        d, _, _ = backend.conv_kernel_batch(ts, ss, g, dirs, radii)
        total += int(np.sum(d[:, 0] > ts[:, 0] + ss[:, 0] + slack))
    return total


def scan_positivity(p: float, q: int, l_grid, n: int, rng, t_max: float = 3.0):
    """Minimum of Re(h^l) over random (s, t, v, w), one row per l.

    Only |l| <= 1/q carries a positivity guarantee; the rest is exploratory.
    """
    ts = random_chamber(q, rng, t_max, n)
    ss = random_chamber(q, rng, t_max, n)
    g = sampling.draw_su_gaussian(q, n, rng)
    if p == 2 * q - 1:
        dirs, radii = sampling.draw_ball_primitives_degenerate(q, n, rng)
    else:
        dirs, radii = sampling.draw_ball_primitives(p, q, n, rng)
    d, branch, absh = backend.conv_kernel_batch(ts, ss, g, dirs, radii)
    rows = []
    for l in np.atleast_1d(np.asarray(l_grid, dtype=float)):
        w = weight_real_power_batch(absh, branch, float(l))
        rows.append({"l": float(l), "min_weight": float(w.min()),
                     "frac_negative": float(np.mean(w < 0.0))})
    return rows


def branch_continuity_probe(q: int, n_segments: int, n_steps: int, rng,
                            t_max: float = 2.5) -> float:
    """Largest successive jump of the branch along random in-domain segments.

    Chamber points and contractions move on straight lines (both domains are
    convex); the special unitary factor moves along a one-parameter subgroup
    so it stays in the group.
    """
    worst = 0.0
    tau = np.linspace(0.0, 1.0, n_steps + 1)
    for _ in range(n_segments):
        t0, t1 = random_chamber(q, rng, t_max), random_chamber(q, rng, t_max)
        s0, s1 = random_chamber(q, rng, t_max), random_chamber(q, rng, t_max)
        w0 = sampling.sample_ball_batch(2 * q, q, 1, rng)[0]
        w1 = sampling.sample_ball_batch(2 * q, q, 1, rng)[0]
        v0 = sampling.sample_su(q, rng)
        a = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
        h = 0.5 * (a - a.conj().T)
        h -= (np.trace(h) / q) * np.eye(q)
        phi, u = np.linalg.eigh(-1j * h)   # h = u diag(i phi) u*
        rot = np.einsum("ab,tb,cb->tac", u, np.exp(1j * np.outer(tau, phi)), u.conj())
        v_path = v0 @ rot
        t_path = t0[None, :] + tau[:, None] * (t1 - t0)[None, :]
        s_path = s0[None, :] + tau[:, None] * (s1 - s0)[None, :]
        w_path = w0[None] + tau[:, None, None] * (w1 - w0)[None]
        _, branch, _ = kernel_vw_batch(t_path, s_path, v_path, w_path)
        worst = max(worst, float(np.abs(np.diff(branch)).max()))
    return worst


def degenerate_continuity(q: int, n: int, rng, eps: float = 1e-4,
                          s=None, t=None) -> float:
    """Moment gap between the boundary law p = 2q-1 and p = 2q-1+eps."""
    if s is None:
        s = random_chamber(q, rng, 2.0)
    if t is None:
        t = random_chamber(q, rng, 2.0)
    se, te = _element((s, 0.2)), _element((t, -0.4))
    m_bnd = convolve_mc(se, te, 2 * q - 1, n, rng)
    m_in = convolve_mc(se, te, 2 * q - 1 + eps, n, rng)
    return standardized_discrepancy(m_bnd, m_in)


def torus_projection_deviation(s, t, p: float, n: int, rng) -> float:
    """Pointwise agreement (mod 2 pi) of the covering-space angle with the
    principal determinant argument of the same kernel draws."""
    s, t = _element(s), _element(t)
    q = s.q
    g = sampling.draw_su_gaussian(q, n, rng)
    if p == 2 * q - 1:
        dirs, radii = sampling.draw_ball_primitives_degenerate(q, n, rng)
    else:
        dirs, radii = sampling.draw_ball_primitives(p, q, n, rng)
    v = backend.su_from_gaussian(g)
    w = backend.ball_from_primitives(dirs, radii)
    _, branch, _ = backend.kernel_vw_batch(s.t.array, t.t.array, v, w)
    det = np.linalg.det(argument_matrix(
        np.broadcast_to(s.t.array, (n, q)), np.broadcast_to(t.t.array, (n, q)), v, w))
    return float(np.abs(np.exp(1j * branch) - det / np.abs(det)).max())


def c_growth_probe(q: int, grid=(10.0, 20.0, 40.0, 80.0), lam_offset=None):
    """|1/c(lam + rho, k)| along p = l -> infinity; report-grade."""
    from .chamber import multiplicity_from, rho
    from .special import c_function

    if lam_offset is None:
        lam_offset = np.ones(q)
    vals = []
    for p in grid:
        k = multiplicity_from(p, q, p)
        c = c_function(np.asarray(lam_offset) + rho(k), k)
        vals.append({"p": float(p), "inv_c_abs": float(1.0 / abs(c))})
    return vals
