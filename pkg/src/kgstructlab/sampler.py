"""Degree-heuristic BFS sampling of connected subgraphs of a target relative size."""

from __future__ import annotations

import dataclasses
import json
import math
import warnings
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import SPLIT_NAMES, KnowledgeGraph, SubgraphSample, induce_subgraph
from .seeding import derive_seed


@dataclass
class SamplerParams:
    """Knobs for one BFS sample.

    r_min/r_max bound the uniformly drawn target node ratio; k is the size of
    the high-degree candidate pool the start node is drawn from.
    """

    r_min: float = 0.05
    r_max: float = 0.5
    k: int = 100
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not (0.0 < self.r_min <= self.r_max <= 1.0):
            raise ValueError(f"need 0 < r_min <= r_max <= 1, got [{self.r_min}, {self.r_max}]")
        if self.k <= 0:
            raise ValueError(f"candidate-set size k must be positive, got {self.k}")


def candidate_set(graph: KnowledgeGraph, k: int) -> np.ndarray:
    """Top-k entity ids by degree, descending; ties broken by ascending id.

    k larger than |V| is clamped (with a warning) rather than rejected.
    """
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    n = graph.num_entities
    if n == 0:
        raise ValueError("graph has no entities")
    if k > n:
        warnings.warn(f"candidate-set size k={k} exceeds |V|={n}; clamped")
        k = n
    # stable sort on id then on -degree keeps ascending-id order within ties
    order = np.argsort(-graph.degree_table, kind="stable")
    return order[:k].astype(np.int64)


def sample_subgraph(
    graph: KnowledgeGraph,
    params: SamplerParams,
    rng: np.random.Generator | None = None,
) -> SubgraphSample:
    """Draw one connected subgraph by BFS from a high-degree start node.

    The target size is ceil(r * |V|) with r ~ U[r_min, r_max]. Expansion pulls
    each dequeued node's unvisited neighbors in ascending id order and admits
    the whole batch, so the achieved size may overshoot the target. If the
    start node's component is exhausted first, the sample is returned short
    with the exhausted flag set; the search never restarts elsewhere, which
    would break the connectivity guarantee.

    When rng is omitted, a fresh generator seeded with params.rng_seed is
    used and that seed is recorded in the sample's meta.
    """
    if rng is None:
        rng = np.random.default_rng(params.rng_seed)
    n = graph.num_entities
    r = float(rng.uniform(params.r_min, params.r_max))
    target = math.ceil(r * n)

    cands = candidate_set(graph, params.k)
    start = int(cands[rng.integers(len(cands))])

    visited: set[int] = {start}
    queue: deque[int] = deque([start])
    while queue and len(visited) < target:
        u = queue.popleft()
        for w in graph.neighbors(u):
            w = int(w)
            if w not in visited:
                visited.add(w)
                queue.append(w)

    sample = induce_subgraph(graph, visited)
    sample.meta.requested_ratio = r
    sample.meta.achieved_ratio = len(visited) / n
    sample.meta.start_node = start
    sample.meta.rng_seed = params.rng_seed
    sample.meta.target_size = target
    sample.meta.exhausted = len(visited) < target
    if sample.meta.exhausted:
        warnings.warn(
            f"BFS exhausted the start component at {len(visited)} nodes "
            f"(target {target}); sample returned short"
        )
    return sample


def generate_corpus(
    graph: KnowledgeGraph,
    count: int,
    params: SamplerParams,
    master_seed: int,
) -> list[SubgraphSample]:
    """Draw `count` independent samples with per-index derived seeds.

    Index order in the returned list is the draw index, so the corpus is
    reproducible and individual samples can be regenerated in isolation.
    """
    if count < 1:
        raise ValueError(f"corpus count must be >= 1, got {count}")
    if math.ceil(params.r_min * graph.num_entities) < 2:
        raise ValueError(
            f"graph too small for r_min={params.r_min}: target below 2 nodes"
        )
    samples = []
    for i in range(count):
        seed = derive_seed(master_seed, i, "sample")
        per = dataclasses.replace(params, rng_seed=seed)
        samples.append(sample_subgraph(graph, per))
    return samples


def corpus_manifest(samples: list[SubgraphSample]) -> list[dict]:
    rows = []
    for i, s in enumerate(samples):
        rows.append(
            {
                "index": i,
                "seed": int(s.meta.rng_seed),
                "start-node": int(s.meta.start_node),
                "requested-ratio": s.meta.requested_ratio,
                "achieved-ratio": s.meta.achieved_ratio,
                "nodes": s.num_nodes,
                "triples-per-split": {n: int(len(s.induced_splits[n])) for n in SPLIT_NAMES},
                "connected": bool(s.meta.connected),
                "usable": bool(s.usable),
            }
        )
    return rows


def write_corpus(samples: list[SubgraphSample], out_dir: str | Path) -> None:
    """Materialize a corpus: manifest.json plus per-sample TSV split files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = corpus_manifest(samples)
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    for i, s in enumerate(samples):
        s.write_tsv(out / f"sample-{i}")
