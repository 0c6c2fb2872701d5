from .models import (
    MODEL_KINDS,
    EmbeddingModel,
    block_widths,
    init_model,
    score,
    score_batch,
    score_candidates,
    score_parts,
    triple_vector,
)
from .training import TrainConfig, default_train_config, train
from .evaluation import EvalReport, evaluate, evaluate_by_category, hyperparam_grid
from .checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "MODEL_KINDS",
    "EmbeddingModel",
    "EvalReport",
    "TrainConfig",
    "block_widths",
    "default_train_config",
    "evaluate",
    "evaluate_by_category",
    "hyperparam_grid",
    "init_model",
    "load_checkpoint",
    "save_checkpoint",
    "score",
    "score_batch",
    "score_candidates",
    "score_parts",
    "train",
    "triple_vector",
]
