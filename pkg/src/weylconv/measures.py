"""Weighted sample clouds on C_q x R with moment and serialization helpers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .chamber import ChamberPoint, HypergroupElement

#: angle frequencies of the fixed bounded test functions cos(a theta) prod sech d_j
MOMENT_ANGLES = (0.5, 1.0, 2.0)


@dataclass
class EmpiricalMeasure:
    """Point cloud (d_i, theta_i) with complex weights (uniform 1/n by default)."""

    d: np.ndarray                      # (n, q)
    theta: np.ndarray                  # (n,)
    weights: np.ndarray | None = None  # (n,) complex
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.d = np.atleast_2d(np.asarray(self.d, dtype=float))
        self.theta = np.asarray(self.theta, dtype=float).ravel()
        n = self.theta.size
        if self.d.shape[0] != n:
            raise ValueError("d and theta must have the same length")
        if self.weights is None:
            self.weights = np.full(n, 1.0 / n, dtype=complex)
        else:
            self.weights = np.asarray(self.weights, dtype=complex).ravel()
            if self.weights.size != n:
                raise ValueError("weights must match the number of points")

    @property
    def n(self) -> int:
        return self.theta.size

    @property
    def q(self) -> int:
        return self.d.shape[1]

    @property
    def total_mass(self) -> complex:
        return complex(self.weights.sum())

    @property
    def total_variation(self) -> float:
        return float(np.abs(self.weights).sum())

    def is_probability(self, tol: float = 1e-12) -> bool:
        return (np.all(self.weights.imag == 0.0)
                and np.all(self.weights.real > 0.0)
                and abs(self.weights.real.sum() - 1.0) <= tol)

    def expect(self, f) -> complex:
        """Integral of a vectorized f(d, theta) against the measure."""
        return complex(np.sum(self.weights * np.asarray(f(self.d, self.theta))))

    def points(self) -> list[HypergroupElement]:
        return [HypergroupElement(ChamberPoint.of(self.d[i]), float(self.theta[i]))
                for i in range(self.n)]

    def _feature_matrix(self):
        """Fixed feature list for distribution comparison: first and second
        moments of (d, theta) plus three bounded angle functionals."""
        cols = [self.d[:, j] for j in range(self.q)]
        names = [f"d{j + 1}" for j in range(self.q)]
        cols.append(self.theta)
        names.append("theta")
        for j in range(self.q):
            for k in range(j, self.q):
                cols.append(self.d[:, j] * self.d[:, k])
                names.append(f"d{j + 1}d{k + 1}")
        cols.append(self.theta**2)
        names.append("theta2")
        sech = 1.0 / np.prod(np.cosh(self.d), axis=1)
        for a in MOMENT_ANGLES:
            cols.append(np.cos(a * self.theta) * sech)
            names.append(f"cos{a}sech")
        return names, np.column_stack(cols)

    def moment_vector(self):
        """(names, means, standard errors); requires probability weights."""
        if not self.is_probability(tol=1e-9):
            raise ValueError("moment features are defined for probability weights")
        names, feats = self._feature_matrix()
        means = feats.mean(axis=0)
        ses = feats.std(axis=0, ddof=1) / np.sqrt(self.n)
        return names, means, ses

    def to_csv(self, path):
        header = ",".join([f"d_{j + 1}" for j in range(self.q)]
                          + ["theta", "weight_re", "weight_im"])
        data = np.column_stack([self.d, self.theta, self.weights.real, self.weights.imag])
        np.savetxt(path, data, delimiter=",", header=header, comments="")

    def summary(self) -> dict:
        mean_d = (self.weights.real @ self.d) / max(self.weights.real.sum(), 1e-300)
        out = {
            "n": int(self.n),
            "q": int(self.q),
            "total_mass": [self.total_mass.real, self.total_mass.imag],
            "total_variation": self.total_variation,
            "mean_d": [float(x) for x in np.atleast_1d(mean_d)],
            "mean_theta": float(self.weights.real @ self.theta
                                / max(self.weights.real.sum(), 1e-300)),
        }
        out.update({k: v for k, v in self.meta.items()
                    if isinstance(v, (str, int, float, bool, list))})
        return out

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)


def standardized_discrepancy(m1: EmpiricalMeasure, m2: EmpiricalMeasure) -> float:
    """Largest |difference| / combined standard error over the moment features."""
    names1, v1, s1 = m1.moment_vector()
    names2, v2, s2 = m2.moment_vector()
    if names1 != names2:
        raise ValueError("measures have different feature sets")
    denom = np.sqrt(s1**2 + s2**2)
    diff = np.abs(v1 - v2)
    exact = denom == 0.0
    if np.any(diff[exact] != 0.0):
        return np.inf
    z = np.zeros_like(diff)
    z[~exact] = diff[~exact] / denom[~exact]
    return float(z.max())
