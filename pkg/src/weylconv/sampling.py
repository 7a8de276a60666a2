"""Exact samplers for the integration variables of the convolutions.

* Haar measure on SU(q) via phase-fixed QR of a complex Ginibre matrix and a
  determinant-root correction.
* The matrix-ball density det(I - w*w)^{p-2q} via its product-of-vector-balls
  coordinates: row directions uniform on the unit sphere of C^q and squared
  radii Beta(q, p-q-j+1), assembled through chained rank-one square roots.
* The boundary law at p = 2q-1, where the last row direction sits exactly on
  the unit sphere.
* The normalization constant kappa_p of the ball density, in closed form and
  by Monte Carlo over the product of vector balls (whose volume is the
  elementary pi^q / q!).

Samplers are pure given the generator, so every stream is reproducible from
its seed; parallel use needs one generator per worker.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend


@dataclass(frozen=True)
class BallCoordinates:
    """Rows y_1..y_q in C^q with ||y_j|| <= 1 (== 1 for the boundary law)."""

    rows: np.ndarray  # (q, q) complex, row j = y_j

    def __post_init__(self):
        norms = np.linalg.norm(self.rows, axis=-1)
        if np.any(norms > 1.0 + 1e-12):
            raise ValueError("ball coordinate rows must have norm <= 1")

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.rows, axis=-1)


def draw_su_gaussian(q: int, n: int, rng) -> np.ndarray:
    """Standard complex Gaussian primitives for the SU(q) sampler."""
    return rng.standard_normal((n, q, q)) + 1j * rng.standard_normal((n, q, q))


def draw_ball_primitives(p: float, q: int, n: int, rng):
    """Direction and radius primitives for the interior ball density.

    Squared radii of row j follow Beta(q, p-q-j+1); this is exactly the polar
    split of the density (1 - ||y||^2)^{p-q-j} on the unit ball of C^q.
    """
    if p <= 2 * q - 1:
        raise ValueError(f"ball sampler needs p > 2q-1 = {2 * q - 1}, got {p}")
    dirs = rng.standard_normal((n, q, q)) + 1j * rng.standard_normal((n, q, q))
    radii = np.empty((n, q))
    for j in range(1, q + 1):
        radii[:, j - 1] = np.sqrt(rng.beta(q, p - q - j + 1, size=n))
    return dirs, radii


def draw_ball_primitives_degenerate(q: int, n: int, rng):
    """Primitives for the boundary law p = 2q-1: last radius pinned to 1."""
    dirs = rng.standard_normal((n, q, q)) + 1j * rng.standard_normal((n, q, q))
    radii = np.empty((n, q))
    for j in range(1, q):
        radii[:, j - 1] = np.sqrt(rng.beta(q, q - j, size=n))
    radii[:, q - 1] = 1.0
    return dirs, radii


def sample_su(q: int, rng, n: int | None = None) -> np.ndarray:
    """Haar-distributed SU(q) matrices; a single (q, q) matrix when n is None."""
    if q < 1:
        raise ValueError("q must be >= 1")
    m = 1 if n is None else n
    v = backend.su_from_gaussian(draw_su_gaussian(q, m, rng))
    return v[0] if n is None else v


def sample_ball(p: float, q: int, rng):
    """One draw (w, y) from det(I - w*w)^{p-2q} dw / kappa_p."""
    dirs, radii = draw_ball_primitives(p, q, 1, rng)
    w = backend.ball_from_primitives(dirs, radii)[0]
    y = dirs[0] * (radii[0] / np.linalg.norm(dirs[0], axis=-1))[:, None]
    return w, BallCoordinates(y)


def sample_ball_batch(p: float, q: int, n: int, rng):
    dirs, radii = draw_ball_primitives(p, q, n, rng)
    return backend.ball_from_primitives(dirs, radii)


def sample_ball_degenerate(q: int, rng):
    """One draw (w, y) from the boundary law at p = 2q-1."""
    dirs, radii = draw_ball_primitives_degenerate(q, 1, rng)
    w = backend.ball_from_primitives(dirs, radii)[0]
    y = dirs[0] * (radii[0] / np.linalg.norm(dirs[0], axis=-1))[:, None]
    return w, BallCoordinates(y)


def sample_ball_degenerate_batch(q: int, n: int, rng):
    dirs, radii = draw_ball_primitives_degenerate(q, n, rng)
    return backend.ball_from_primitives(dirs, radii)


def kappa(p: float, q: int) -> float:
    """Closed form of the ball-density normalization.

    kappa_p = prod_{j=1..q} pi^q Gamma(p-q-j+1) / Gamma(p-j+1), obtained by
    factorizing the matrix-ball integral through the vector-ball coordinates.
    Diverges for p <= 2q-1.
    """
    if p <= 2 * q - 1:
        raise ValueError(f"kappa diverges for p <= 2q-1 = {2 * q - 1}")
    logk = 0.0
    for j in range(1, q + 1):
        logk += q * math.log(math.pi) + math.lgamma(p - q - j + 1) - math.lgamma(p - j + 1)
    return math.exp(logk)


def kappa_mc(p: float, q: int, n: int, rng):
    """Monte Carlo estimate of kappa via uniform draws on the vector balls.

    Each y_j is uniform on the unit ball of C^q (radius U^{1/2q}), whose
    volume pi^q / q! is elementary, so

        kappa_p = (pi^q/q!)^q * E[ prod_j (1 - ||y_j||^2)^{p-q-j} ].

    Returns (estimate, standard_error).
    """
    if p <= 2 * q - 1:
        raise ValueError("kappa Monte Carlo needs p > 2q-1")
    vol = (math.pi**q / math.factorial(q)) ** q
    r2 = rng.uniform(size=(n, q)) ** (1.0 / q)  # squared radius of a uniform draw
    expo = p - q - np.arange(1, q + 1)
    vals = np.prod((1.0 - r2) ** expo, axis=1)
    est = vol * float(vals.mean())
    se = vol * float(vals.std(ddof=1)) / math.sqrt(n)
    return est, se
