"""Monte Carlo convolutions on C_q x R and their quotients.

``convolve_mc`` realizes the convolution of two point measures by n kernel
draws: (v, w) sampled from Haar x ball density, mapped through the kernel to
a chamber point and an angle increment.  The ball sampler already carries
the density det(I - w*w)^{p-2q}/kappa_p, so the output weights are uniform.
The boundary parameter p = 2q-1 switches to the sphere-pinned sampler; the
switch happens at exact equality only, never near it, because the measure
changes type there.
"""

from __future__ import annotations

import numpy as np

from . import backend, sampling
from .chamber import ChamberPoint, HypergroupElement, as_element as _element
from .measures import EmpiricalMeasure


def _draw_primitives(p: float, q: int, n: int, rng):
    g = sampling.draw_su_gaussian(q, n, rng)
    if p == 2 * q - 1:
        dirs, radii = sampling.draw_ball_primitives_degenerate(q, n, rng)
    else:
        dirs, radii = sampling.draw_ball_primitives(p, q, n, rng)
    return g, dirs, radii


def _kernel_draws(t_left, t_right, p: float, q: int, n: int, rng):
    """n draws of (d, angle increment, |h|) for chamber parts t_left, t_right."""
    g, dirs, radii = _draw_primitives(p, q, n, rng)
    return backend.conv_kernel_batch(t_left, t_right, g, dirs, radii)


def convolve_mc(s, t, p: float, n: int, rng, meta: dict | None = None) -> EmpiricalMeasure:
    """Convolution of point measures at (s, theta1), (t, theta2); p >= 2q-1."""
    s, t = _element(s), _element(t)
    q = s.q
    if t.q != q:
        raise ValueError("rank mismatch between the two points")
    if p < 2 * q - 1:
        raise ValueError(f"p must be >= 2q-1 = {2 * q - 1}, got {p}")
    d, branch, _ = _kernel_draws(s.t.array, t.t.array, p, q, n, rng)
    theta = s.theta + t.theta + branch
    m = EmpiricalMeasure(d, theta, meta=dict(meta or {}, p=p, q=q, n=n))
    return m


def resample_atoms(m: EmpiricalMeasure, n: int, rng):
    """Uniform resampling with replacement from an equal-weight cloud."""
    idx = rng.integers(0, m.n, size=n)
    return m.d[idx], m.theta[idx]


def project_torus(m: EmpiricalMeasure) -> EmpiricalMeasure:
    """Reduce the angle mod 2 pi into [0, 2 pi); the quotient convolution."""
    return EmpiricalMeasure(m.d.copy(), np.mod(m.theta, 2.0 * np.pi),
                            m.weights.copy(), dict(m.meta, torus=True))


def project_chamber(m: EmpiricalMeasure) -> EmpiricalMeasure:
    """Forget the angle; the chamber quotient convolution."""
    return EmpiricalMeasure(m.d.copy(), np.zeros(m.n), m.weights.copy(),
                            dict(m.meta, chamber=True))


def convolve_signed(s, t, p: float, l: float, n: int, rng) -> EmpiricalMeasure:
    """Signed chamber convolution: complex weights e^{i l Im log h} / n.

    Total variation is exactly 1 by construction; the measure lives on the
    chamber (angles are dropped).
    """
    s, t = _element(s), _element(t)
    q = s.q
    if p < 2 * q - 1:
        raise ValueError(f"p must be >= 2q-1 = {2 * q - 1}, got {p}")
    d, branch, _ = _kernel_draws(s.t.array, t.t.array, p, q, n, rng)
    weights = np.exp(1j * l * branch) / n
    return EmpiricalMeasure(d, np.zeros(n), weights, {"p": p, "l": l, "signed": True})


def random_walk(start, p: float, steps: int, step_law, rng) -> list[HypergroupElement]:
    """Trajectory of the convolution random walk (one kernel draw per step)."""
    x = _element(start)
    traj = [x]
    for _ in range(steps):
        m = convolve_mc(x, step_law, p, 1, rng)
        x = HypergroupElement(ChamberPoint.of(m.d[0]), float(m.theta[0]))
        traj.append(x)
    return traj


def random_walk_batch(start, p: float, steps: int, step_law, n_paths: int, rng):
    """Vectorized walk: returns (d_paths, theta_paths) of shapes
    (steps+1, n_paths, q) and (steps+1, n_paths)."""
    x = _element(start)
    step = _element(step_law)
    q = x.q
    d = np.broadcast_to(x.t.array, (n_paths, q)).copy()
    theta = np.full(n_paths, x.theta)
    d_hist = [d.copy()]
    th_hist = [theta.copy()]
    for _ in range(steps):
        dd, branch, _ = _kernel_draws(d, step.t.array, p, q, n_paths, rng)
        d = dd
        theta = theta + step.theta + branch
        d_hist.append(d.copy())
        th_hist.append(theta.copy())
    return np.array(d_hist), np.array(th_hist)
