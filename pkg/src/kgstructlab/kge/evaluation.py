"""Filtered entity-ranking evaluation with per-relation-category breakdowns."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from ..seeding import derive_seed
from .models import EmbeddingModel, init_model, score_candidates
from .training import TrainConfig, train

HITS_KS = (1, 3, 10)


@dataclass
class EvalReport:
    mrr: float
    hits_at: dict[int, float]
    n_queries: int
    side: str = "both-averaged"
    per_category: dict[str, dict] | None = None


def _filter_maps(graph):
    """(h, r) -> known tails and (r, t) -> known heads over the union of splits."""
    tails: dict[tuple[int, int], list[int]] = {}
    heads: dict[tuple[int, int], list[int]] = {}
    for h, r, t in graph.all_triples:
        tails.setdefault((int(h), int(r)), []).append(int(t))
        heads.setdefault((int(r), int(t)), []).append(int(h))
    return (
        {k: np.array(v, dtype=np.int64) for k, v in tails.items()},
        {k: np.array(v, dtype=np.int64) for k, v in heads.items()},
    )


def _rank(scores: np.ndarray, true_id: int, known: np.ndarray) -> float:
    """Filtered rank with mean tie adjustment: 1 + #greater + #ties/2.

    known lists every entity that completes a true triple for this query
    (including true_id); those candidates are excluded from the comparison.
    """
    true_score = scores[true_id]
    mask = np.ones(len(scores), dtype=bool)
    mask[known] = False
    rest = scores[mask]
    greater = int(np.sum(rest > true_score))
    ties = int(np.sum(rest == true_score))
    return 1.0 + greater + 0.5 * ties


def _query_ranks(model: EmbeddingModel, graph, split: str) -> tuple[np.ndarray, np.ndarray]:
    """Ranks of all (tail-side, head-side) queries; returns (ranks, triple row index)."""
    triples = graph.triples(split)
    if len(triples) == 0:
        raise ValueError(f"split {split!r} is empty")
    tails, heads = _filter_maps(graph)
    ranks = np.empty(2 * len(triples))
    idx = np.empty(2 * len(triples), dtype=np.int64)
    for i, (h, r, t) in enumerate(triples):
        h, r, t = int(h), int(r), int(t)
        s = score_candidates(model, "tail", h, r)
        ranks[2 * i] = _rank(s, t, tails[(h, r)])
        s = score_candidates(model, "head", t, r)
        ranks[2 * i + 1] = _rank(s, h, heads[(r, t)])
        idx[2 * i] = idx[2 * i + 1] = i
    return ranks, idx


def _cat_name(cat) -> str:
    return cat.value if hasattr(cat, "value") else str(cat)


def _aggregate(ranks: np.ndarray) -> tuple[float, dict[int, float]]:
    mrr = float(np.mean(1.0 / ranks))
    hits = {k: float(np.mean(ranks <= k)) for k in HITS_KS}
    return mrr, hits


def evaluate(model: EmbeddingModel, graph, split: str = "test") -> EvalReport:
    """Filtered MRR and hits@{1,3,10} over both query sides of a split.

    The filter set is the union of all splits: candidates completing any
    known true triple other than the query's own answer are removed before
    ranking. Ties share their rank range's mean.
    """
    ranks, _ = _query_ranks(model, graph, split)
    mrr, hits = _aggregate(ranks)
    return EvalReport(mrr=mrr, hits_at=hits, n_queries=len(ranks))


def evaluate_by_category(
    model: EmbeddingModel, graph, split: str, category_map: dict
) -> EvalReport:
    """evaluate() plus per-category sub-reports.

    The overall numbers equal the triple-count-weighted mean of the category
    numbers, since categories partition the queries.
    """
    triples = graph.triples(split)
    for rid in np.unique(triples[:, 1]):
        if int(rid) not in category_map:
            raise ValueError(f"relation {int(rid)} has no category assigned")
    ranks, idx = _query_ranks(model, graph, split)
    mrr, hits = _aggregate(ranks)

    per: dict[str, dict] = {}
    cats = np.array([_cat_name(category_map[int(r)]) for r in triples[:, 1]])
    for cat in sorted(set(cats.tolist())):
        rows = np.flatnonzero(cats == cat)
        sel = np.isin(idx, rows)
        c_mrr, c_hits = _aggregate(ranks[sel])
        per[cat] = {"mrr": c_mrr, "hits_at": c_hits, "count": int(len(rows))}
    return EvalReport(mrr=mrr, hits_at=hits, n_queries=len(ranks), per_category=per)


def hyperparam_grid(
    graph,
    kind: str,
    epoch_list: list[int],
    dim_list: list[int],
    base_config: TrainConfig,
    base_dim: int = 32,
    category_map: dict | None = None,
    split: str = "test",
) -> list[dict]:
    """Two axis sweeps: epochs at the base dim, then dims at the base epochs.

    Each cell trains a fresh model under a seed derived from the base seed and
    the cell coordinates, then evaluates per-category MRR; rows come back in
    long format (axis, value, category, mrr).
    """
    if not epoch_list or not dim_list:
        raise ValueError("epoch_list and dim_list must be nonempty")
    if category_map is None:
        from ..features import classify_relations

        category_map = classify_relations(graph)

    rows: list[dict] = []
    sweeps = [("epochs", e, e, base_dim) for e in epoch_list]
    sweeps += [("dim", d, base_config.epochs, d) for d in dim_list]
    for axis, value, epochs, dim in sweeps:
        seed = derive_seed(base_config.rng_seed, "grid", kind, axis, value)
        cfg = dataclasses.replace(base_config, epochs=epochs, rng_seed=seed)
        model = init_model(
            kind, dim, graph.num_entities, graph.num_relations, np.random.default_rng(seed)
        )
        trained, _ = train(model, graph, cfg)
        report = evaluate_by_category(trained, graph, split, category_map)
        for cat, entry in sorted(report.per_category.items()):
            rows.append({"axis": axis, "value": value, "category": cat, "mrr": entry["mrr"]})
    return rows
