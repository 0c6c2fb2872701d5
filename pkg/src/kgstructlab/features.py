"""Structural feature extraction: Gini indices, relation categories, density,
strongly connected components, and global clustering."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .graph import KnowledgeGraph, SubgraphSample


class RelationCategory(str, Enum):
    ONE_ONE = "1-1"
    ONE_N = "1-n"
    N_ONE = "n-1"
    N_N = "n-n"


CATEGORY_ORDER = (
    RelationCategory.ONE_ONE,
    RelationCategory.ONE_N,
    RelationCategory.N_ONE,
    RelationCategory.N_N,
)

FEATURE_NAMES = (
    "category_gini",
    "relation_type_gini",
    "degree_gini",
    "density",
    "scc_count",
    "global_clustering",
)


@dataclass
class StructuralFeatures:
    category_gini: float
    relation_type_gini: float
    degree_gini: float
    density: float
    scc_count: int
    global_clustering: float

    def as_vector(self) -> np.ndarray:
        return np.array([float(getattr(self, n)) for n in FEATURE_NAMES])


def gini(values) -> float:
    """Normalized mean absolute pairwise difference of a nonnegative vector.

    0 for a uniform vector, (n-1)/n for a one-hot vector, and 0 by convention
    when the mean is zero. Computed via the sorted-order identity, O(n log n).
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("gini needs a nonempty 1-d vector")
    if np.any(x < 0):
        raise ValueError("gini is defined for nonnegative values only")
    total = x.sum()
    if total == 0:
        return 0.0
    n = x.size
    xs = np.sort(x)
    i = np.arange(1, n + 1)
    return float(np.sum((2 * i - n - 1) * xs) / (n * total))


def classify_relations(
    graph: KnowledgeGraph, threshold: float = 1.5
) -> dict[int, RelationCategory]:
    """Classify each relation by average head/tail fan-out on the train split.

    tph = train triples per distinct head, hpt = per distinct tail; a side
    with average fan >= threshold counts as "n". Relations absent from train
    are left out of the map (a warning names how many were skipped).
    """
    train = graph.triples("train")
    if len(graph.all_triples) == 0:
        raise ValueError("graph has no triples")
    out: dict[int, RelationCategory] = {}
    missing = []
    for rid in range(graph.num_relations):
        rows = train[train[:, 1] == rid]
        if len(rows) == 0:
            missing.append(rid)
            continue
        tph = len(rows) / len(np.unique(rows[:, 0]))
        hpt = len(rows) / len(np.unique(rows[:, 2]))
        head_many = tph >= threshold
        tail_many = hpt >= threshold
        if head_many and tail_many:
            out[rid] = RelationCategory.N_N
        elif head_many:
            out[rid] = RelationCategory.ONE_N
        elif tail_many:
            out[rid] = RelationCategory.N_ONE
        else:
            out[rid] = RelationCategory.ONE_ONE
    if missing:
        warnings.warn(
            f"{len(missing)} relation(s) have no train triples and were not classified"
        )
    return out


def category_distribution(graph: KnowledgeGraph, threshold: float = 1.5) -> np.ndarray:
    """Train-triple counts per relation category, order (1-1, 1-n, n-1, n-n)."""
    cats = classify_relations(graph, threshold)
    counts = dict.fromkeys(CATEGORY_ORDER, 0)
    train = graph.triples("train")
    for rid, cat in cats.items():
        counts[cat] += int(np.sum(train[:, 1] == rid))
    return np.array([counts[c] for c in CATEGORY_ORDER], dtype=np.int64)


def graph_density(graph: KnowledgeGraph) -> float:
    """Distinct ordered adjacent pairs over |V|(|V|-1), self-loops excluded.

    Parallel relations between the same ordered pair collapse to one edge so
    the value stays in [0, 1].
    """
    n = graph.num_entities
    if n < 2:
        raise ValueError("density needs at least 2 nodes")
    t = graph.all_triples
    if len(t) == 0:
        return 0.0
    pairs = t[:, [0, 2]]
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    if len(pairs) == 0:
        return 0.0
    distinct = len(np.unique(pairs, axis=0))
    return distinct / (n * (n - 1))


def scc_count(graph: KnowledgeGraph) -> int:
    """Number of strongly connected components of the directed projection.

    Iterative Tarjan; relations are ignored and isolated nodes count as
    singleton components.
    """
    n = graph.num_entities
    if n == 0:
        raise ValueError("graph has no nodes")
    succ: list[list[int]] = [[] for _ in range(n)]
    t = graph.all_triples
    if len(t):
        for h, tl in np.unique(t[:, [0, 2]], axis=0):
            if h != tl:
                succ[int(h)].append(int(tl))

    index = np.full(n, -1, dtype=np.int64)
    lowlink = np.zeros(n, dtype=np.int64)
    on_stack = np.zeros(n, dtype=bool)
    stack: list[int] = []
    counter = 0
    components = 0

    for root in range(n):
        if index[root] != -1:
            continue
        # work stack holds (node, iterator position into succ[node])
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = lowlink[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            while pi < len(succ[v]):
                w = succ[v][pi]
                pi += 1
                if index[w] == -1:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if lowlink[v] == index[v]:
                components += 1
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    if w == v:
                        break
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
    return components


def global_clustering(graph: KnowledgeGraph) -> float:
    """Transitivity of the undirected simple projection.

    3 * (#triangles) / (#wedges); 0 when there are no wedges.
    """
    n = graph.num_entities
    if n == 0:
        raise ValueError("graph has no nodes")
    deg = graph.degree_table.astype(np.int64)
    wedges = int(np.sum(deg * (deg - 1) // 2))
    if wedges == 0:
        return 0.0
    triangles = 0
    for u in range(n):
        nu = graph.neighbors(u)
        for v in nu[nu > u]:
            nv = graph.neighbors(int(v))
            common = np.intersect1d(nu, nv, assume_unique=True)
            triangles += int(np.sum(common > v))
    return 3.0 * triangles / wedges


def compute_features(
    sample: SubgraphSample | KnowledgeGraph, threshold: float = 1.5
) -> StructuralFeatures:
    """The six per-sample structural indices.

    Category and relation-type Ginis are computed on the train split only
    (training data determines what a model can learn); degree Gini, density,
    SCC count, and clustering use the union of all splits.
    """
    graph = sample.to_graph() if isinstance(sample, SubgraphSample) else sample
    train = graph.triples("train")
    if len(train) == 0:
        raise ValueError("sample unusable: empty train split")

    cat_counts = category_distribution(graph, threshold)
    per_relation = np.bincount(train[:, 1], minlength=graph.num_relations)
    per_relation = per_relation[per_relation > 0]

    return StructuralFeatures(
        category_gini=gini(cat_counts),
        relation_type_gini=gini(per_relation),
        degree_gini=gini(graph.degree_table),
        density=graph_density(graph),
        scc_count=scc_count(graph),
        global_clustering=global_clustering(graph),
    )
