"""Invariant measure densities and the rank-1 conjugation checks.

All densities are fixed with constant 1 (they are unique up to a constant,
and every check below is homogeneous in the density).  The three variants
share the factor

    prod_j sinh^{2p-2q+1} t_j * prod_{i<j} |cosh 2t_i - cosh 2t_j|^2

and differ in the cosh exponent: 1 on the doubled space and the torus
quotient and for the signed chamber convolution, 2l+1 for the chamber
convolution attached to the character index l.  The two chamber measures are
related by the factor cosh^{2l}, which is exactly the square of the positive
function linking the two convolutions.
"""

from __future__ import annotations

import numpy as np

from .quadrature import chamber_translate_rank1


def haar_density(p: float, q: int, variant: str, t, l: float | None = None) -> float:
    """Density of the invariant measure at a chamber point.

    variant: 'full' (on C_q x R), 'torus' (on C_q x T), or 'chamber' (on C_q,
    needs l).  Vanishes at chamber walls: any t_j = 0 or any tie t_i = t_j.
    """
    coords = np.asarray(getattr(t, "coords", t), dtype=float)
    if coords.size != q:
        raise ValueError("chamber point does not match q")
    if variant in ("full", "torus"):
        cosh_expo = 1.0
    elif variant == "chamber":
        if l is None:
            raise ValueError("chamber variant needs the character index l")
        cosh_expo = 2.0 * l + 1.0
    else:
        raise ValueError("variant must be 'full', 'torus', or 'chamber'")
    val = float(np.prod(np.sinh(coords) ** (2 * p - 2 * q + 1)
                        * np.cosh(coords) ** cosh_expo))
    c2 = np.cosh(2 * coords)
    for i in range(q):
        for j in range(i + 1, q):
            val *= abs(c2[i] - c2[j]) ** 2
    return val


def bump(center: float, radius: float):
    """Smooth compactly supported test function exp(-1/(1-u^2)) on |u| < 1."""
    def f(x):
        x = np.asarray(x, dtype=float)
        u = (x - center) / radius
        out = np.zeros_like(u)
        inside = np.abs(u) < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
        return out
    f.support = (center - radius, center + radius)
    return f


def check_haar_rank1(p: float, l: float, f, g, x: float, T: float,
                     nodes: int = 400, convolution: str = "hypergroup",
                     inner_nodes: tuple[int, int] = (120, 120),
                     density: str | None = None) -> float:
    """Conjugation residual |int T_x f . g domega - int T_x g . f domega| at q = 1.

    ``convolution='hypergroup'`` pairs the chamber convolution with the
    density sinh^{2p-1} cosh^{2l+1}; ``convolution='signed'`` pairs the signed
    convolution with sinh^{2p-1} cosh, i.e. the cosh^{2l}-rescaled measure.
    ``density`` overrides the pairing (used to show a mismatched pair fails).
    """
    if convolution not in ("hypergroup", "signed"):
        raise ValueError("convolution must be 'hypergroup' or 'signed'")
    signed = convolution == "signed"
    if density is None:
        density = "signed" if signed else "hypergroup"
    alpha = p - 1.0
    cosh_expo = 1.0 if density == "signed" else 2.0 * l + 1.0

    y_hi = x + T
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    y = 0.5 * y_hi * (xg + 1.0)
    wy = 0.5 * y_hi * wg
    omega = np.sinh(y) ** (2.0 * alpha + 1.0) * np.cosh(y) ** cosh_expo

    nr, nth = inner_nodes
    txf = chamber_translate_rank1(f, x, y, p, l, nr, nth, signed=signed).real
    txg = chamber_translate_rank1(g, x, y, p, l, nr, nth, signed=signed).real
    lhs = float(np.sum(wy * omega * txf * g(y)))
    rhs = float(np.sum(wy * omega * txg * f(y)))
    return abs(lhs - rhs)
