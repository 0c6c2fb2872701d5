"""Quadratic response-surface surrogate over structural features.

Bridges an observational (features -> MRR) corpus to variance-based
sensitivity analysis: the decomposition runs on this fitted surface, not on
the raw records.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SurrogateError(ValueError):
    pass


def _expand(z: np.ndarray) -> np.ndarray:
    """[1, z, z^2, z_i z_j (i<j)] design rows for standardized inputs z (m, d)."""
    m, d = z.shape
    cols = [np.ones((m, 1)), z, z * z]
    for i in range(d):
        for j in range(i + 1, d):
            cols.append((z[:, i] * z[:, j])[:, None])
    return np.concatenate(cols, axis=1)


@dataclass
class Surrogate:
    mean: np.ndarray
    std: np.ndarray
    coef: np.ndarray
    r2: float
    n_records: int

    @property
    def dim(self) -> int:
        return len(self.mean)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        z = (x.reshape(-1, self.dim) - self.mean) / self.std
        y = _expand(z) @ self.coef
        return float(y[0]) if single else y


def fit_surrogate(x: np.ndarray, y: np.ndarray, min_records: int = 30, min_r2: float = 0.3) -> Surrogate:
    """Least-squares full quadratic fit on standardized features.

    Refuses to return a surrogate that would mislead downstream sensitivity
    claims: rank-deficient designs and in-sample R^2 below min_r2 are errors,
    not warnings.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if x.ndim != 2 or len(x) != len(y):
        raise ValueError("x must be (n, d) aligned with y")
    n, d = x.shape
    if n < min_records:
        raise SurrogateError(f"insufficient records for surrogate: {n} < {min_records}")
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    if np.any(std == 0):
        dead = [i for i in range(d) if std[i] == 0]
        raise SurrogateError(
            f"feature column(s) {dead} are constant; remove them or add more varied samples"
        )
    z = (x - mean) / std
    design = _expand(z)
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        raise SurrogateError(
            f"rank-deficient quadratic design (rank {rank} < {design.shape[1]}); "
            "need more samples or fewer features"
        )
    resid = y - design @ coef
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot < 1e-30 else 1.0 - float(np.sum(resid**2)) / ss_tot
    if r2 < min_r2:
        raise SurrogateError(
            f"surrogate R^2 = {r2:.3f} < {min_r2}; quadratic surface does not explain "
            "the records, sensitivity indices would be untrustworthy"
        )
    return Surrogate(mean=mean, std=std, coef=coef, r2=r2, n_records=n)
