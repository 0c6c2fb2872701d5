"""Data model and TSV ingestion for directed multi-relational graphs with splits."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

SPLIT_NAMES = ("train", "valid", "test")


class TripleParseError(ValueError):
    """A line in a triple file did not have exactly three tab-separated fields."""


class Triple(NamedTuple):
    head: int
    relation: int
    tail: int


@dataclass
class LoadReport:
    """Summary emitted by :func:`load_graph`."""

    entities: int
    relations: int
    triples_per_split: dict[str, int]
    unseen_in_train: dict[str, int]

    def to_json(self) -> str:
        payload = {
            "entities": self.entities,
            "relations": self.relations,
            "triples-per-split": self.triples_per_split,
            "unseen-in-train": self.unseen_in_train,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


class KnowledgeGraph:
    """Integer-indexed directed multigraph with named splits.

    Immutable after construction: the triple arrays are write-locked and all
    derived indices (neighbor lists, degree table) are built once, so the
    graph can be shared read-only across workers.
    """

    def __init__(
        self,
        entity_labels: list[str],
        relation_labels: list[str],
        splits: dict[str, np.ndarray],
    ):
        self.entity_labels = list(entity_labels)
        self.relation_labels = list(relation_labels)
        self.entity_ids = {label: i for i, label in enumerate(self.entity_labels)}
        self.relation_ids = {label: i for i, label in enumerate(self.relation_labels)}

        self.splits: dict[str, np.ndarray] = {}
        for name in SPLIT_NAMES:
            arr = np.asarray(splits.get(name, np.empty((0, 3), dtype=np.int64)), dtype=np.int64)
            arr = arr.reshape(-1, 3)
            if _has_duplicate_rows(arr):
                raise ValueError(f"duplicate triple in split {name!r}")
            arr.setflags(write=False)
            self.splits[name] = arr

        self.all_triples = np.concatenate([self.splits[n] for n in SPLIT_NAMES], axis=0)
        self.all_triples.setflags(write=False)
        if self.all_triples.size:
            if self.all_triples[:, [0, 2]].max() >= self.num_entities:
                raise ValueError("triple references entity id outside vocabulary")
            if self.all_triples[:, 1].max() >= self.num_relations:
                raise ValueError("triple references relation id outside vocabulary")

        self._neighbors = _build_neighbor_lists(self.num_entities, self.all_triples)
        self.degree_table = np.array([len(n) for n in self._neighbors], dtype=np.int64)
        self.degree_table.setflags(write=False)

    @property
    def num_entities(self) -> int:
        return len(self.entity_labels)

    @property
    def num_relations(self) -> int:
        return len(self.relation_labels)

    def degree(self, v: int) -> int:
        """Number of distinct neighbors of v, direction-agnostic.

        Parallel relations between the same pair count once, and self-loops
        contribute nothing.
        """
        self._check_entity(v)
        return int(self.degree_table[v])

    def neighbors(self, v: int) -> np.ndarray:
        """Distinct neighbors of v in ascending id order (self excluded)."""
        self._check_entity(v)
        return self._neighbors[v]

    def adjacency(self, v: int) -> list[tuple[int, int, str]]:
        """All incident triples of v as (other endpoint, relation, direction)."""
        self._check_entity(v)
        out = []
        t = self.all_triples
        for h, r, tl in t[(t[:, 0] == v) | (t[:, 2] == v)]:
            if h == v:
                out.append((int(tl), int(r), "out"))
            if tl == v:
                out.append((int(h), int(r), "in"))
        return out

    def _check_entity(self, v: int) -> None:
        if not 0 <= v < self.num_entities:
            raise ValueError(f"entity id {v} out of range [0, {self.num_entities})")

    def triples(self, split: str) -> np.ndarray:
        if split not in self.splits:
            raise ValueError(f"unknown split {split!r}")
        return self.splits[split]


@dataclass
class SampleMeta:
    requested_ratio: float
    achieved_ratio: float
    start_node: int
    rng_seed: int
    connected: bool
    exhausted: bool = False
    target_size: int = 0


@dataclass
class SubgraphSample:
    """Connected node set plus induced triples, in parent-graph ids."""

    node_set: frozenset[int]
    induced_splits: dict[str, np.ndarray]
    meta: SampleMeta
    parent: KnowledgeGraph = field(repr=False)

    @property
    def num_nodes(self) -> int:
        return len(self.node_set)

    @property
    def usable(self) -> bool:
        """True when every induced split is nonempty (trainable + evaluable)."""
        return all(len(self.induced_splits[n]) > 0 for n in SPLIT_NAMES)

    def to_graph(self) -> KnowledgeGraph:
        """Compact KnowledgeGraph over the member nodes.

        Entity ids are assigned by first appearance across induced
        train/valid/test (matching what a TSV reload would produce); members
        isolated in the induced edge set are appended afterwards in ascending
        parent-id order so they stay part of the vocabulary.
        """
        order: list[int] = []
        seen: set[int] = set()
        for name in SPLIT_NAMES:
            for h, _, t in self.induced_splits[name]:
                for v in (int(h), int(t)):
                    if v not in seen:
                        seen.add(v)
                        order.append(v)
        for v in sorted(self.node_set - seen):
            order.append(v)
        remap = {v: i for i, v in enumerate(order)}

        rel_order: list[int] = []
        rel_seen: set[int] = set()
        for name in SPLIT_NAMES:
            for _, r, _ in self.induced_splits[name]:
                if int(r) not in rel_seen:
                    rel_seen.add(int(r))
                    rel_order.append(int(r))
        rel_remap = {r: i for i, r in enumerate(rel_order)}

        splits = {}
        for name in SPLIT_NAMES:
            arr = self.induced_splits[name]
            splits[name] = np.array(
                [(remap[int(h)], rel_remap[int(r)], remap[int(t)]) for h, r, t in arr],
                dtype=np.int64,
            ).reshape(-1, 3)
        return KnowledgeGraph(
            [self.parent.entity_labels[v] for v in order],
            [self.parent.relation_labels[r] for r in rel_order],
            splits,
        )

    def write_tsv(self, out_dir: str | Path) -> None:
        """Write induced splits as {train,valid,test}.txt using parent labels."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        ent = self.parent.entity_labels
        rel = self.parent.relation_labels
        for name in SPLIT_NAMES:
            lines = [f"{ent[h]}\t{rel[r]}\t{ent[t]}\n" for h, r, t in self.induced_splits[name]]
            (out / f"{name}.txt").write_text("".join(lines), encoding="utf-8")


def _has_duplicate_rows(arr: np.ndarray) -> bool:
    if len(arr) < 2:
        return False
    return len(np.unique(arr, axis=0)) != len(arr)


def _build_neighbor_lists(n: int, triples: np.ndarray) -> list[np.ndarray]:
    sets: list[set[int]] = [set() for _ in range(n)]
    for h, _, t in triples:
        h, t = int(h), int(t)
        if h == t:
            continue
        sets[h].add(t)
        sets[t].add(h)
    return [np.array(sorted(s), dtype=np.int64) for s in sets]


def _read_triple_file(path: str | Path) -> list[tuple[str, str, str]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise TripleParseError(
                    f"{path}:{lineno}: expected 3 tab-separated fields, got {len(fields)}"
                )
            rows.append((fields[0], fields[1], fields[2]))
    return rows


def load_graph(
    train_path: str | Path,
    valid_path: str | Path,
    test_path: str | Path,
) -> tuple[KnowledgeGraph, LoadReport]:
    """Load a graph from three TSV triple files (FB15k-237 on-disk layout).

    Vocabularies are assigned by first appearance across train, then valid,
    then test. Duplicate triples within a split are dropped (first occurrence
    kept). Entities/relations appearing only outside train are accepted and
    counted in the returned report.
    """
    raw = {
        "train": _read_triple_file(train_path),
        "valid": _read_triple_file(valid_path),
        "test": _read_triple_file(test_path),
    }

    entity_labels: list[str] = []
    relation_labels: list[str] = []
    ent_ids: dict[str, int] = {}
    rel_ids: dict[str, int] = {}

    def ent(label: str) -> int:
        if label not in ent_ids:
            ent_ids[label] = len(entity_labels)
            entity_labels.append(label)
        return ent_ids[label]

    def rel(label: str) -> int:
        if label not in rel_ids:
            rel_ids[label] = len(relation_labels)
            relation_labels.append(label)
        return rel_ids[label]

    splits = {}
    for name in SPLIT_NAMES:
        seen: set[tuple[int, int, int]] = set()
        rows = []
        for h, r, t in raw[name]:
            row = (ent(h), rel(r), ent(t))
            if row not in seen:
                seen.add(row)
                rows.append(row)
        splits[name] = np.array(rows, dtype=np.int64).reshape(-1, 3)

    train_ents = set(splits["train"][:, [0, 2]].ravel().tolist())
    train_rels = set(splits["train"][:, 1].tolist())
    unseen = {
        "entities": len(entity_labels) - len(train_ents),
        "relations": len(relation_labels) - len(train_rels),
    }
    graph = KnowledgeGraph(entity_labels, relation_labels, splits)
    report = LoadReport(
        entities=graph.num_entities,
        relations=graph.num_relations,
        triples_per_split={n: int(len(splits[n])) for n in SPLIT_NAMES},
        unseen_in_train=unseen,
    )
    return graph, report


def save_graph(graph: KnowledgeGraph, out_dir: str | Path) -> None:
    """Write the graph back to {train,valid,test}.txt, preserving triple order."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in SPLIT_NAMES:
        lines = [
            f"{graph.entity_labels[h]}\t{graph.relation_labels[r]}\t{graph.entity_labels[t]}\n"
            for h, r, t in graph.splits[name]
        ]
        (out / f"{name}.txt").write_text("".join(lines), encoding="utf-8")


def induce_subgraph(graph: KnowledgeGraph, node_set: Iterable[int]) -> SubgraphSample:
    """Restrict the graph to the triples with both endpoints in node_set.

    Split membership is inherited from the parent. The connectivity flag is
    computed on the undirected projection of the induced edge set.
    """
    nodes = frozenset(int(v) for v in node_set)
    if not nodes:
        raise ValueError("node set must be nonempty")
    for v in nodes:
        graph._check_entity(v)

    node_arr = np.fromiter(sorted(nodes), dtype=np.int64, count=len(nodes))
    induced = {}
    for name in SPLIT_NAMES:
        arr = graph.splits[name]
        if len(arr):
            mask = np.isin(arr[:, 0], node_arr) & np.isin(arr[:, 2], node_arr)
            induced[name] = arr[mask].copy()
        else:
            induced[name] = np.empty((0, 3), dtype=np.int64)

    all_induced = np.concatenate(list(induced.values()), axis=0)
    connected = _flood_fill_connected(nodes, all_induced)
    meta = SampleMeta(
        requested_ratio=len(nodes) / graph.num_entities,
        achieved_ratio=len(nodes) / graph.num_entities,
        start_node=min(nodes),
        rng_seed=0,
        connected=connected,
    )
    return SubgraphSample(node_set=nodes, induced_splits=induced, meta=meta, parent=graph)


def _flood_fill_connected(nodes: frozenset[int], triples: np.ndarray) -> bool:
    if len(nodes) == 1:
        return True
    adj: dict[int, set[int]] = {v: set() for v in nodes}
    for h, _, t in triples:
        h, t = int(h), int(t)
        if h != t:
            adj[h].add(t)
            adj[t].add(h)
    start = next(iter(nodes))
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(nodes)
