"""Chamber points, multiplicity triples, and root-system constants.

The chamber ``C_q`` is the cone ``t_1 >= t_2 >= ... >= t_q >= 0``.  Only the
root system with positive roots ``2e_i``, ``4e_i``, ``2(e_i +- e_j)`` is
supported; the multiplicity triple attached to these roots, in this order, is
``(p - q - l, 1/2 + l, 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: values this far below 1 are treated as rounding noise by project_to_chamber
CLAMP_EPS = 1e-9


@dataclass(frozen=True)
class ChamberPoint:
    """A point of the closed chamber C_q (coordinates sorted descending, >= 0)."""

    coords: tuple[float, ...]

    def __post_init__(self):
        c = self.coords
        if len(c) == 0:
            raise ValueError("chamber point needs at least one coordinate")
        if not all(np.isfinite(c)):
            raise ValueError("chamber coordinates must be finite")
        if any(c[i] < c[i + 1] for i in range(len(c) - 1)):
            raise ValueError("chamber coordinates must be sorted descending")
        if c[-1] < 0.0:
            raise ValueError("chamber coordinates must be nonnegative")

    @classmethod
    def of(cls, values) -> "ChamberPoint":
        return cls(tuple(float(v) for v in np.asarray(values, dtype=float).ravel()))

    @property
    def q(self) -> int:
        return len(self.coords)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    @property
    def top(self) -> float:
        """Largest coordinate t_1 (controls every support bound)."""
        return self.coords[0]

    def __iter__(self):
        return iter(self.coords)


@dataclass(frozen=True)
class HypergroupElement:
    """A point (t, theta) of C_q x R; theta is unconstrained (radians)."""

    t: ChamberPoint
    theta: float = 0.0

    @classmethod
    def of(cls, coords, theta=0.0) -> "HypergroupElement":
        return cls(ChamberPoint.of(coords), float(theta))

    @classmethod
    def identity(cls, q: int) -> "HypergroupElement":
        return cls(ChamberPoint.of(np.zeros(q)), 0.0)

    @property
    def q(self) -> int:
        return self.t.q


@dataclass(frozen=True)
class Multiplicity:
    """Multiplicity triple k = (p-q-l, 1/2+l, 1) for the three root lengths.

    ``l`` is kept as a complex scalar; operations whose positivity depends on
    it must reject a nonzero imaginary part themselves.
    """

    p: float
    q: int
    l: complex

    def __post_init__(self):
        if self.q < 1 or int(self.q) != self.q:
            raise ValueError("q must be a positive integer")
        if not np.isfinite(self.p):
            raise ValueError("p must be finite")
        if self.p < 2 * self.q - 1:
            raise ValueError(f"p must satisfy p >= 2q-1 = {2 * self.q - 1}, got {self.p}")

    @property
    def k1(self) -> complex:
        return self.p - self.q - self.l

    @property
    def k2(self) -> complex:
        return 0.5 + self.l

    @property
    def k3(self) -> float:
        return 1.0

    @property
    def triple(self) -> tuple[complex, complex, float]:
        return (self.k1, self.k2, self.k3)

    def require_real_l(self) -> float:
        if self.l.imag != 0.0:
            raise ValueError("operation requires a real character index l")
        return self.l.real


def multiplicity_from(p: float, q: int, l) -> Multiplicity:
    """Multiplicity triple from the dimension parameter p and character index l."""
    return Multiplicity(float(p), int(q), complex(l))


def project_to_chamber(values) -> ChamberPoint:
    """Sort descending; entries within CLAMP_EPS below 1 are clamped to 1.

    The clamp exists for singular values of cosh-dominated matrices, which
    are >= 1 exactly but can round marginally below; entries further below 1
    are passed through and must be rejected by the caller that takes arcosh.
    """
    v = np.asarray(values, dtype=float).ravel()
    if not np.all(np.isfinite(v)):
        raise ValueError("project_to_chamber requires finite input")
    v = np.sort(v)[::-1].copy()
    near_one = (v >= 1.0 - CLAMP_EPS) & (v < 1.0)
    v[near_one] = 1.0
    return ChamberPoint(tuple(v))


def rho(k: Multiplicity) -> np.ndarray:
    """Half sum of positive roots: rho_j = (p - q + l + 1) + 2(q - j)."""
    j = np.arange(1, k.q + 1)
    base = k.p - k.q + k.l + 1.0
    out = base + 2.0 * (k.q - j)
    return out.real if k.l.imag == 0.0 else out


def rho_from_triple(k: Multiplicity) -> np.ndarray:
    """Same half sum computed from the triple: (k1 + 2 k2) + 2 k3 (q - j)."""
    j = np.arange(1, k.q + 1)
    out = (k.k1 + 2.0 * k.k2) + 2.0 * k.k3 * (k.q - j)
    return out.real if k.l.imag == 0.0 else out


def as_element(x) -> HypergroupElement:
    """Coerce a HypergroupElement, ChamberPoint, (t, theta) pair, or bare
    chamber coordinates into a HypergroupElement.

    A plain 2-tuple is read as a (chamber, theta) pair, so rank-2 chamber
    coordinates must arrive as an array, a ChamberPoint, or nested as
    ((t1, t2), theta).
    """
    if isinstance(x, HypergroupElement):
        return x
    if isinstance(x, ChamberPoint):
        return HypergroupElement(x, 0.0)
    if isinstance(x, tuple) and len(x) == 2 and np.isscalar(x[1]):
        return HypergroupElement.of(np.atleast_1d(x[0]), x[1])
    return HypergroupElement.of(np.atleast_1d(x), 0.0)


@dataclass(frozen=True)
class SpectralParameter:
    """Spectral vector lambda in C^q together with the character index l."""

    lam: tuple[complex, ...]
    l: complex = 0.0

    def __post_init__(self):
        if not all(np.isfinite(x.real) and np.isfinite(x.imag) for x in map(complex, self.lam)):
            raise ValueError("spectral parameter must be finite")

    @classmethod
    def of(cls, lam, l=0.0) -> "SpectralParameter":
        arr = np.atleast_1d(np.asarray(lam, dtype=complex))
        return cls(tuple(arr.tolist()), complex(l))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.lam, dtype=complex)
