"""Binary model checkpoints with a JSON sidecar.

Layout: 8-byte magic, 8-byte zero-padded kind, three little-endian uint64
(dim, |V|, |R|), then the entity and relation tables as row-major
little-endian float64. The sidecar (same path + ".json") carries the training
config and sha256 hashes of the vocabularies so a checkpoint can be matched
to the graph it was trained on.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .models import EmbeddingModel

_MAGIC = b"KGEMODL1"


def _vocab_hash(labels: list[str]) -> str:
    return hashlib.sha256("\n".join(labels).encode("utf-8")).hexdigest()


def save_checkpoint(
    model: EmbeddingModel,
    path: str | Path,
    config=None,
    graph=None,
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    kind = model.kind.encode("ascii")
    if len(kind) > 8:
        raise ValueError("model kind name too long for header")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(kind.ljust(8, b"\x00"))
        fh.write(struct.pack("<QQQ", model.dim, model.num_entities, model.num_relations))
        fh.write(np.ascontiguousarray(model.entity_table, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(model.relation_table, dtype="<f8").tobytes())

    sidecar = {
        "kind": model.kind,
        "dim": model.dim,
        "entities": model.num_entities,
        "relations": model.num_relations,
    }
    if config is not None:
        sidecar["config"] = dataclasses.asdict(config) if dataclasses.is_dataclass(config) else dict(config)
    if graph is not None:
        sidecar["vocab"] = {
            "entity_sha256": _vocab_hash(graph.entity_labels),
            "relation_sha256": _vocab_hash(graph.relation_labels),
        }
    Path(str(path) + ".json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_checkpoint(path: str | Path, graph=None) -> EmbeddingModel:
    """Read a checkpoint; if graph is given, verify the sidecar vocab hashes."""
    path = Path(path)
    raw = path.read_bytes()
    if raw[:8] != _MAGIC:
        raise ValueError(f"{path}: not a model checkpoint (bad magic)")
    kind = raw[8:16].rstrip(b"\x00").decode("ascii")
    dim, nv, nr = struct.unpack("<QQQ", raw[16:40])
    we = dim if kind == "transe" else 2 * dim
    wr = 2 * dim if kind == "complex" else dim
    ent_bytes = nv * we * 8
    rel_bytes = nr * wr * 8
    if len(raw) != 40 + ent_bytes + rel_bytes:
        raise ValueError(f"{path}: truncated checkpoint")
    entity = np.frombuffer(raw, dtype="<f8", count=nv * we, offset=40).reshape(nv, we).copy()
    relation = (
        np.frombuffer(raw, dtype="<f8", count=nr * wr, offset=40 + ent_bytes)
        .reshape(nr, wr)
        .copy()
    )
    model = EmbeddingModel(kind, int(dim), entity, relation)

    if graph is not None:
        sidecar_path = Path(str(path) + ".json")
        if sidecar_path.exists():
            sidecar = json.loads(sidecar_path.read_text(encoding="utf-8"))
            vocab = sidecar.get("vocab")
            if vocab is not None:
                if vocab["entity_sha256"] != _vocab_hash(graph.entity_labels) or vocab[
                    "relation_sha256"
                ] != _vocab_hash(graph.relation_labels):
                    raise ValueError(f"{path}: checkpoint vocabulary does not match the graph")
        if model.num_entities != graph.num_entities or model.num_relations != graph.num_relations:
            raise ValueError(f"{path}: checkpoint shape does not match the graph")
    return model
