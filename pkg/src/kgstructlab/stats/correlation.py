"""Pearson and Spearman correlation plus the per-feature/per-model table."""

from __future__ import annotations

import numpy as np

from ..features import FEATURE_NAMES


class UndefinedCorrelationError(ValueError):
    """Raised when a correlation is requested on constant or too-short input."""


def _validate(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or len(x) != len(y):
        raise ValueError("x and y must be 1-d and equally long")
    if len(x) < 3:
        raise UndefinedCorrelationError("need at least 3 points")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise UndefinedCorrelationError("correlation undefined for constant input")
    return x, y


def pearson(x, y) -> float:
    x, y = _validate(x, y)
    xm = x - x.mean()
    ym = y - y.mean()
    r = float(np.dot(xm, ym) / np.sqrt(np.dot(xm, xm) * np.dot(ym, ym)))
    return min(1.0, max(-1.0, r))


def _average_ranks(x: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the mean of their rank range."""
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x))
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    x, y = _validate(x, y)
    return pearson(_average_ranks(x), _average_ranks(y))


def correlation_table(records: list[dict], min_records: int = 10) -> list[dict]:
    """Feature-vs-MRR correlations per model kind.

    records carry {"model": kind, "features": StructuralFeatures or mapping,
    "mrr": float}. Output rows: {feature, model, pearson, spearman}, where a
    constant column yields None values plus an "undefined" note instead of
    silently dropping the row.
    """
    by_model: dict[str, list[dict]] = {}
    for rec in records:
        by_model.setdefault(rec["model"], []).append(rec)

    rows = []
    for model in sorted(by_model):
        group = by_model[model]
        if len(group) < min_records:
            raise ValueError(
                f"model {model}: {len(group)} records, need >= {min_records} for correlation"
            )
        mrr = np.array([float(r["mrr"]) for r in group])
        for feat in FEATURE_NAMES:
            col = np.array([_feature_value(r["features"], feat) for r in group])
            try:
                p = pearson(col, mrr)
                s = spearman(col, mrr)
                note = ""
            except UndefinedCorrelationError as exc:
                p = s = None
                note = f"undefined: {exc}"
            rows.append(
                {"feature": feat, "model": model, "pearson": p, "spearman": s, "note": note}
            )
    return rows


def _feature_value(features, name: str) -> float:
    if hasattr(features, name):
        return float(getattr(features, name))
    return float(features[name])
