"""Embedding models for link prediction: translation, complex bilinear, and
phase-rotation scorers over shared entity/relation tables.

All three kinds expose one orientation: higher score = more plausible triple.
Complex-valued tables are stored as 2d reals (first d real parts, last d
imaginary parts); the rotation model stores relations as d phases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MODEL_KINDS = ("transe", "complex", "rotate")


def _widths(kind: str, dim: int) -> tuple[int, int]:
    """(entity width, relation width) in stored reals."""
    if kind == "transe":
        return dim, dim
    if kind == "complex":
        return 2 * dim, 2 * dim
    if kind == "rotate":
        return 2 * dim, dim
    raise ValueError(f"unknown model kind {kind!r}")


@dataclass
class EmbeddingModel:
    kind: str
    dim: int
    entity_table: np.ndarray
    relation_table: np.ndarray

    def __post_init__(self) -> None:
        we, wr = _widths(self.kind, self.dim)
        if self.entity_table.ndim != 2 or self.entity_table.shape[1] != we:
            raise ValueError(f"entity table must be |V|x{we} for {self.kind} d={self.dim}")
        if self.relation_table.ndim != 2 or self.relation_table.shape[1] != wr:
            raise ValueError(f"relation table must be |R|x{wr} for {self.kind} d={self.dim}")
        if not (np.isfinite(self.entity_table).all() and np.isfinite(self.relation_table).all()):
            raise ValueError("embedding tables must be finite")

    @property
    def num_entities(self) -> int:
        return self.entity_table.shape[0]

    @property
    def num_relations(self) -> int:
        return self.relation_table.shape[0]

    def copy(self) -> "EmbeddingModel":
        return EmbeddingModel(
            self.kind, self.dim, self.entity_table.copy(), self.relation_table.copy()
        )


def block_widths(model: EmbeddingModel) -> tuple[int, int, int]:
    """Native real widths of the (head, relation, tail) blocks of one triple."""
    we, wr = _widths(model.kind, model.dim)
    return we, wr, we


def init_model(
    kind: str,
    dim: int,
    num_entities: int,
    num_relations: int,
    rng: np.random.Generator,
) -> EmbeddingModel:
    """Uniform init in [-6/sqrt(d), 6/sqrt(d)]; rotation phases in [-pi, pi)."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if num_entities < 1 or num_relations < 1:
        raise ValueError("need at least one entity and one relation")
    we, wr = _widths(kind, dim)
    bound = 6.0 / np.sqrt(dim)
    entity = rng.uniform(-bound, bound, size=(num_entities, we))
    if kind == "rotate":
        relation = rng.uniform(-np.pi, np.pi, size=(num_relations, wr))
    else:
        relation = rng.uniform(-bound, bound, size=(num_relations, wr))
    return EmbeddingModel(kind, dim, entity, relation)


def score_parts(kind: str, dim: int, h: np.ndarray, r: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Score from raw embedding blocks; broadcasts over leading axes.

    transe: -||h + r - t||_1
    complex: Re(sum_j h_j r_j conj(t_j))
    rotate: -sum_j |h_j * e^{i r_j} - t_j| (complex modulus per coordinate)
    """
    if kind == "transe":
        return -np.abs(h + r - t).sum(axis=-1)
    if kind == "complex":
        hre, him = h[..., :dim], h[..., dim:]
        rre, rim = r[..., :dim], r[..., dim:]
        tre, tim = t[..., :dim], t[..., dim:]
        return ((hre * rre - him * rim) * tre + (hre * rim + him * rre) * tim).sum(axis=-1)
    if kind == "rotate":
        hre, him = h[..., :dim], h[..., dim:]
        tre, tim = t[..., :dim], t[..., dim:]
        cos, sin = np.cos(r), np.sin(r)
        u = hre * cos - him * sin - tre
        v = hre * sin + him * cos - tim
        return -np.sqrt(u * u + v * v).sum(axis=-1)
    raise ValueError(f"unknown model kind {kind!r}")


def _check_ids(model: EmbeddingModel, h, r, t) -> None:
    if np.any(np.asarray(h) < 0) or np.any(np.asarray(h) >= model.num_entities):
        raise ValueError("head id out of range")
    if np.any(np.asarray(t) < 0) or np.any(np.asarray(t) >= model.num_entities):
        raise ValueError("tail id out of range")
    if np.any(np.asarray(r) < 0) or np.any(np.asarray(r) >= model.num_relations):
        raise ValueError("relation id out of range")


def score(model: EmbeddingModel, triple) -> float:
    """Plausibility score of one (head, relation, tail) id triple."""
    h, r, t = int(triple[0]), int(triple[1]), int(triple[2])
    _check_ids(model, h, r, t)
    return float(
        score_parts(
            model.kind,
            model.dim,
            model.entity_table[h],
            model.relation_table[r],
            model.entity_table[t],
        )
    )


def score_batch(model: EmbeddingModel, triples: np.ndarray) -> np.ndarray:
    """Scores for an (m, 3) id array."""
    triples = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
    _check_ids(model, triples[:, 0], triples[:, 1], triples[:, 2])
    return score_parts(
        model.kind,
        model.dim,
        model.entity_table[triples[:, 0]],
        model.relation_table[triples[:, 1]],
        model.entity_table[triples[:, 2]],
    )


def score_candidates(model: EmbeddingModel, side: str, anchor: int, relation: int) -> np.ndarray:
    """Scores of every entity as the replacement on one side of a query.

    side="tail" scores (anchor, relation, e) for all e; side="head" scores
    (e, relation, anchor). Rotation and translation distances are computed
    against a single precomposed target so the sweep is one table pass.
    """
    if side not in ("head", "tail"):
        raise ValueError(f"side must be 'head' or 'tail', got {side!r}")
    _check_ids(model, anchor, relation, anchor)
    e = model.entity_table
    r = model.relation_table[relation]
    a = e[anchor]
    d = model.dim
    kind = model.kind

    if kind == "transe":
        target = a + r if side == "tail" else a - r
        return -np.abs(e - target).sum(axis=1)
    if kind == "complex":
        rre, rim = r[:d], r[d:]
        are, aim = a[:d], a[d:]
        if side == "tail":
            # coefficient of (tre, tim): a = h*r
            cre = are * rre - aim * rim
            cim = are * rim + aim * rre
            return e[:, :d] @ cre + e[:, d:] @ cim
        if side == "head":
            # score = Re(sum h * (r * conj(t))): coefficient of (hre, him)
            cre = rre * are + rim * aim
            cim = rre * aim - rim * are
            return e[:, :d] @ cre + e[:, d:] @ cim
    if kind == "rotate":
        are, aim = a[:d], a[d:]
        cos, sin = np.cos(r), np.sin(r)
        if side == "tail":
            tre = are * cos - aim * sin
            tim = are * sin + aim * cos
        else:
            # rotation is an isometry: |h*e^{i r} - t| = |h - t*e^{-i r}|
            tre = are * cos + aim * sin
            tim = -are * sin + aim * cos
        u = e[:, :d] - tre
        v = e[:, d:] - tim
        return -np.sqrt(u * u + v * v).sum(axis=1)
    raise ValueError(f"unknown model kind {kind!r}")


def triple_vector(model: EmbeddingModel, triple) -> np.ndarray:
    """Concatenated [head, relation, tail] block vector in native parameters."""
    h, r, t = int(triple[0]), int(triple[1]), int(triple[2])
    _check_ids(model, h, r, t)
    return np.concatenate(
        [model.entity_table[h], model.relation_table[r], model.entity_table[t]]
    )
