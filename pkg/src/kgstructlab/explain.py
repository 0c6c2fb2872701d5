"""Local surrogate explanation of triple scores.

Perturbs the concatenated [head, relation, tail] embedding vector of one
triple, reweights the perturbations with a Gaussian locality kernel, fits a
weighted ridge regression in centered offsets, and reads per-dimension
importances |beta_j| off the fit. Summing those over the three native blocks
attributes the local score behavior to the head, relation, and tail
embeddings.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .features import RelationCategory
from .kge.models import EmbeddingModel, block_widths, score, score_parts, triple_vector
from .seeding import derive_seed

_STD_FLOOR = 1e-6


@dataclass
class LimeConfig:
    num_perturbations: int = 5000
    kernel_width: float | None = None  # None: 0.75 * sqrt(total dims)
    perturbation_scale: float = 0.3
    ridge_weight: float = 1e-3
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.num_perturbations < 1:
            raise ValueError("num_perturbations must be positive")
        if self.kernel_width is not None and self.kernel_width <= 0:
            raise ValueError("kernel_width must be positive")
        if self.perturbation_scale <= 0:
            raise ValueError("perturbation_scale must be positive")
        if self.ridge_weight < 0:
            raise ValueError("ridge_weight must be nonnegative")

    def resolved_kernel_width(self, total_dims: int) -> float:
        if self.kernel_width is not None:
            return self.kernel_width
        return 0.75 * math.sqrt(total_dims)


@dataclass
class LimeExplanation:
    triple: tuple[int, int, int]
    kind: str
    intercept: float
    beta: np.ndarray
    importance: np.ndarray
    block_importance: dict[str, float]
    fit_r2: float
    target_score: float

    def to_json_dict(self) -> dict:
        return {
            "triple": list(self.triple),
            "kind": self.kind,
            "intercept": self.intercept,
            "beta": self.beta.tolist(),
            "importance": self.importance.tolist(),
            "block-importance": dict(self.block_importance),
            "fit-r2": self.fit_r2,
            "target-score": self.target_score,
        }


def black_box_adapter(model: EmbeddingModel, triple):
    """Scoring closure over perturbed [h', r', t'] concatenations.

    The returned f accepts a (total,) vector or an (m, total) batch, splits it
    at the model's native block widths, and scores with the embeddings
    replaced by the given blocks. f(unperturbed vector) reproduces
    score(model, triple) exactly.
    """
    wh, wr, wt = block_widths(model)
    total = wh + wr + wt
    kind, dim = model.kind, model.dim

    def f(x: np.ndarray) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != total:
            raise ValueError(f"expected vectors of length {total}, got {x.shape[-1]}")
        h = x[..., :wh]
        r = x[..., wh : wh + wr]
        t = x[..., wh + wr :]
        out = score_parts(kind, dim, h, r, t)
        return float(out) if x.ndim == 1 else out

    return f


def perturb(
    x: np.ndarray,
    stds: np.ndarray,
    config: LimeConfig,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian perturbations of x with locality kernel weights.

    Per-dimension noise std is perturbation_scale times the dimension's
    empirical spread; dimensions with zero spread get a 1e-6 floor (warned,
    since their importances are then meaningless). Weights follow
    exp(-||x - x'||^2 / sigma^2).
    """
    x = np.asarray(x, dtype=float)
    stds = np.asarray(stds, dtype=float)
    if stds.shape != x.shape:
        raise ValueError("stds must align with x")
    if np.any(stds == 0):
        warnings.warn("zero-spread dimension(s) perturbed with floor std 1e-6")
        stds = np.maximum(stds, _STD_FLOOR)
    sigma = config.resolved_kernel_width(len(x))
    eps = rng.normal(0.0, 1.0, size=(config.num_perturbations, len(x))) * (
        config.perturbation_scale * stds
    )
    samples = x + eps
    sq_dist = np.sum((samples - x) ** 2, axis=1)
    weights = np.exp(-sq_dist / (sigma * sigma))
    return samples, weights


def fit_local_model(
    samples: np.ndarray,
    weights: np.ndarray,
    f_values: np.ndarray,
    ridge_weight: float,
    center: np.ndarray,
) -> tuple[float, np.ndarray, float]:
    """Weighted ridge fit of f over centered offsets z = x' - center.

    Minimizes sum_i w_i (f_i - b0 - beta.z_i)^2 + ridge * ||beta||^2 with an
    unpenalized intercept, via one augmented least-squares solve. Returns
    (b0, beta, weighted R^2).
    """
    samples = np.asarray(samples, dtype=float)
    weights = np.asarray(weights, dtype=float)
    f_values = np.asarray(f_values, dtype=float).ravel()
    n, d = samples.shape
    if n < d + 1:
        raise ValueError(f"need at least {d + 1} samples to fit {d} coefficients, got {n}")
    if np.any(weights < 0) or not np.any(weights > 0):
        raise ValueError("weights must be nonnegative and not all zero")

    z = samples - center
    sw = np.sqrt(weights)
    design = np.concatenate([sw[:, None], sw[:, None] * z], axis=1)
    target = sw * f_values
    if ridge_weight > 0:
        ridge = np.zeros((d, d + 1))
        ridge[:, 1:] = math.sqrt(ridge_weight) * np.eye(d)
        design = np.concatenate([design, ridge], axis=0)
        target = np.concatenate([target, np.zeros(d)])
    coef, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank < d + 1:
        raise ValueError(
            "singular weighted design; use ridge_weight > 0 or more perturbations"
        )
    b0, beta = float(coef[0]), coef[1:]

    pred = b0 + z @ beta
    fbar = float(np.sum(weights * f_values) / np.sum(weights))
    ss_tot = float(np.sum(weights * (f_values - fbar) ** 2))
    ss_res = float(np.sum(weights * (f_values - pred) ** 2))
    r2 = 1.0 if ss_tot < 1e-30 else 1.0 - ss_res / ss_tot
    return b0, beta, r2


def explain_triple(model: EmbeddingModel, triple, config: LimeConfig) -> LimeExplanation:
    """End-to-end local explanation of one triple's score."""
    wh, wr, _ = block_widths(model)
    x = triple_vector(model, triple)
    if config.num_perturbations < len(x) + 1:
        raise ValueError(
            f"num_perturbations={config.num_perturbations} below the solvable "
            f"minimum {len(x) + 1} for {len(x)} dimensions"
        )
    ent_std = model.entity_table.std(axis=0)
    rel_std = model.relation_table.std(axis=0)
    stds = np.concatenate([ent_std, rel_std, ent_std])

    rng = np.random.default_rng(config.rng_seed)
    f = black_box_adapter(model, triple)
    samples, weights = perturb(x, stds, config, rng)
    b0, beta, r2 = fit_local_model(samples, weights, f(samples), config.ridge_weight, x)

    importance = np.abs(beta)
    blocks = {
        "head": float(importance[:wh].sum()),
        "relation": float(importance[wh : wh + wr].sum()),
        "tail": float(importance[wh + wr :].sum()),
    }
    return LimeExplanation(
        triple=(int(triple[0]), int(triple[1]), int(triple[2])),
        kind=model.kind,
        intercept=b0,
        beta=beta,
        importance=importance,
        block_importance=blocks,
        fit_r2=r2,
        target_score=score(model, triple),
    )


def select_representatives(
    model: EmbeddingModel, graph, category_map: dict, q: float, split: str = "test"
) -> dict[str, dict[str, list[tuple[int, int, int]]]]:
    """Per-category highest and lowest scoring triples of a split.

    Each group holds max(1, floor(q * category size)) triples from one sorted
    order (score descending, ties by ascending triple), so the two groups are
    disjoint whenever q <= 0.5 and the category has at least two triples.
    """
    if not 0.0 < q <= 0.5:
        raise ValueError(f"q must be in (0, 0.5], got {q}")
    triples = graph.triples(split)
    by_cat: dict[str, list[tuple[int, int, int]]] = {}
    for h, r, t in triples:
        cat = category_map.get(int(r))
        if cat is None:
            raise ValueError(f"relation {int(r)} has no category assigned")
        name = cat.value if isinstance(cat, RelationCategory) else str(cat)
        by_cat.setdefault(name, []).append((int(h), int(r), int(t)))

    out: dict[str, dict[str, list[tuple[int, int, int]]]] = {}
    for name in sorted(by_cat):
        rows = by_cat[name]
        if not rows:
            warnings.warn(f"category {name} has no triples in split {split!r}; skipped")
            continue
        ranked = sorted(rows, key=lambda tr: (-score(model, tr), tr))
        count = max(1, math.floor(q * len(ranked)))
        out[name] = {"high": ranked[:count], "low": ranked[-count:]}
    return out


def category_importance_profile(
    model: EmbeddingModel,
    graph,
    category_map: dict,
    config: LimeConfig,
    q: float = 0.25,
    split: str = "test",
) -> list[dict]:
    """Mean block importances per (category, high/low group).

    Each triple's explanation runs under a seed derived from the config seed
    and the triple ids, so profiles are independent of group iteration order.
    """
    reps = select_representatives(model, graph, category_map, q, split=split)
    rows: list[dict] = []
    for cat in sorted(reps):
        for group in ("high", "low"):
            triples = reps[cat][group]
            blocks = np.zeros(3)
            for tr in triples:
                cfg = LimeConfig(
                    num_perturbations=config.num_perturbations,
                    kernel_width=config.kernel_width,
                    perturbation_scale=config.perturbation_scale,
                    ridge_weight=config.ridge_weight,
                    rng_seed=derive_seed(config.rng_seed, "lime", *tr),
                )
                exp = explain_triple(model, tr, cfg)
                blocks += [
                    exp.block_importance["head"],
                    exp.block_importance["relation"],
                    exp.block_importance["tail"],
                ]
            blocks /= max(1, len(triples))
            rows.append(
                {
                    "category": cat,
                    "group": group,
                    "i_head": float(blocks[0]),
                    "i_relation": float(blocks[1]),
                    "i_tail": float(blocks[2]),
                    "group_size": len(triples),
                }
            )
    return rows
