"""Negative-sampling trainer with hand-derived gradients.

Losses (summed over a batch's positives; each positive's negatives enter
through a normalized contribution so the pull/push balance does not depend
on negatives_per_positive):
  transe: margin ranking max(0, margin - s+ + s-) averaged over each
          positive's negatives, plain SGD; relation rows are L2-normalized
          once at training start and entity rows renormalized to norm <= 1
          after every batch.
  rotate: self-adversarial logistic loss; negatives weighted by a
          softmax over their current scores, and the softmax weights are
          differentiated through (they depend on the same distances).
  complex: logistic loss on +/- labeled examples plus L2 on the embeddings
          each example touches, with element-wise adaptive learning rates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import EmbeddingModel, score_parts

_EPS = 1e-12


@dataclass
class TrainConfig:
    epochs: int = 500
    batch_size: int = 512
    learning_rate: float = 0.01
    negatives_per_positive: int = 8
    margin: float = 5.0
    adv_temperature: float = 1.0
    l2_weight: float = 1e-5
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        for name in ("batch_size", "learning_rate", "negatives_per_positive", "margin"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.adv_temperature < 0 or self.l2_weight < 0:
            raise ValueError("adv_temperature and l2_weight must be nonnegative")


def default_train_config(kind: str, **overrides) -> TrainConfig:
    """Per-kind defaults; rotate prefers a wider margin than transe."""
    base = {"margin": 6.0, "adv_temperature": 1.0} if kind == "rotate" else {}
    base.update(overrides)
    return TrainConfig(**base)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _log_sigmoid(x: np.ndarray) -> np.ndarray:
    return -np.logaddexp(0.0, -x)


def _encode(triples: np.ndarray, num_entities: int, num_relations: int) -> np.ndarray:
    t = triples.reshape(-1, 3).astype(np.int64)
    return (t[:, 0] * num_relations + t[:, 1]) * num_entities + t[:, 2]


def sample_negatives(
    pos: np.ndarray,
    num_entities: int,
    k: int,
    train_codes: np.ndarray,
    rng: np.random.Generator,
    num_relations: int,
    max_tries: int = 50,
) -> np.ndarray:
    """(B, k, 3) corruptions of pos; head or tail replaced by a uniform entity.

    Corruptions that reproduce a known train triple are redrawn (entity only,
    the corrupted side stays fixed) up to max_tries rounds; the rare survivors
    after the cap are kept as false negatives.
    """
    b = len(pos)
    neg = np.repeat(pos[:, None, :], k, axis=1).copy()
    corrupt_head = rng.integers(0, 2, size=(b, k)) == 0
    repl = rng.integers(0, num_entities, size=(b, k))
    neg[:, :, 0] = np.where(corrupt_head, repl, neg[:, :, 0])
    neg[:, :, 2] = np.where(~corrupt_head, repl, neg[:, :, 2])

    for _ in range(max_tries):
        codes = _encode(neg, num_entities, num_relations).reshape(b, k)
        bad = np.isin(codes, train_codes)
        if not bad.any():
            break
        redraw = rng.integers(0, num_entities, size=int(bad.sum()))
        heads = neg[:, :, 0]
        tails = neg[:, :, 2]
        bad_head = bad & corrupt_head
        bad_tail = bad & ~corrupt_head
        n_head = int(bad_head.sum())
        heads[bad_head] = redraw[:n_head]
        tails[bad_tail] = redraw[n_head:]
    return neg


def batch_loss(model: EmbeddingModel, pos: np.ndarray, neg: np.ndarray, config: TrainConfig) -> float:
    """Loss of one batch: pos is (B, 3), neg is (B, K, 3)."""
    loss, _, _ = _loss_and_grad(model, pos, neg, config, want_grad=False)
    return loss


def batch_grad(
    model: EmbeddingModel, pos: np.ndarray, neg: np.ndarray, config: TrainConfig
) -> tuple[float, np.ndarray, np.ndarray]:
    """(loss, d/d entity-table, d/d relation-table) with dense gradient tables."""
    return _loss_and_grad(model, pos, neg, config, want_grad=True)


def _gather(model: EmbeddingModel, triples: np.ndarray):
    e, r = model.entity_table, model.relation_table
    return e[triples[..., 0]], r[triples[..., 1]], e[triples[..., 2]]


def _loss_and_grad(model, pos, neg, config, want_grad):
    pos = np.asarray(pos, dtype=np.int64).reshape(-1, 3)
    neg = np.asarray(neg, dtype=np.int64)
    if neg.ndim != 3 or neg.shape[0] != pos.shape[0] or neg.shape[2] != 3:
        raise ValueError("neg must be (B, K, 3) aligned with pos")
    if model.kind == "transe":
        return _transe_loss_grad(model, pos, neg, config, want_grad)
    if model.kind == "rotate":
        return _rotate_loss_grad(model, pos, neg, config, want_grad)
    if model.kind == "complex":
        return _complex_loss_grad(model, pos, neg, config, want_grad)
    raise ValueError(f"unknown model kind {model.kind!r}")


def _transe_loss_grad(model, pos, neg, config, want_grad):
    hp, rp, tp = _gather(model, pos)
    hn, rn, tn = _gather(model, neg)
    diff_p = hp + rp - tp                      # (B, d)
    diff_n = hn + rn - tn                      # (B, K, d)
    s_pos = -np.abs(diff_p).sum(-1)
    s_neg = -np.abs(diff_n).sum(-1)
    hinge = config.margin - s_pos[:, None] + s_neg
    active = hinge > 0
    loss = float(hinge[active].sum())
    if not want_grad:
        return loss, None, None

    de = np.zeros_like(model.entity_table)
    dr = np.zeros_like(model.relation_table)
    # d loss / d s_pos = -(# active negatives of that positive); ds/d(h,r,t) = (-sign, -sign, +sign)
    n_active = active.sum(1).astype(float)     # (B,)
    sign_p = np.sign(diff_p)
    gp = n_active[:, None] * sign_p
    np.add.at(de, pos[:, 0], gp)
    np.add.at(dr, pos[:, 1], gp)
    np.add.at(de, pos[:, 2], -gp)
    # d loss / d s_neg = +1 where active; ds/d = same pattern
    sign_n = np.sign(diff_n)
    gn = -active[..., None].astype(float) * sign_n
    flat = neg.reshape(-1, 3)
    gnf = gn.reshape(-1, sign_n.shape[-1])
    np.add.at(de, flat[:, 0], gnf)
    np.add.at(dr, flat[:, 1], gnf)
    np.add.at(de, flat[:, 2], -gnf)
    return loss, de, dr


def _rotate_terms(h, theta, t, dim):
    hre, him = h[..., :dim], h[..., dim:]
    tre, tim = t[..., :dim], t[..., dim:]
    cos, sin = np.cos(theta), np.sin(theta)
    u = hre * cos - him * sin - tre
    v = hre * sin + him * cos - tim
    rho = np.sqrt(u * u + v * v)
    return u, v, rho, cos, sin, tre, tim


def _rotate_coord_grads(u, v, rho, cos, sin, tre, tim):
    """Per-coordinate distance gradients wrt (hre, him, theta, tre, tim)."""
    safe = np.maximum(rho, _EPS)
    gu, gv = u / safe, v / safe
    d_hre = gu * cos + gv * sin
    d_him = -gu * sin + gv * cos
    d_theta = (v * tre - u * tim) / safe
    return d_hre, d_him, d_theta, -gu, -gv


def _rotate_loss_grad(model, pos, neg, config, want_grad):
    d = model.dim
    gamma, alpha = config.margin, config.adv_temperature
    hp, rp, tp = _gather(model, pos)
    hn, rn, tn = _gather(model, neg)

    up, vp, rhop, cosp, sinp, trep, timp = _rotate_terms(hp, rp, tp, d)
    un, vn, rhon, cosn, sinn, tren, timn = _rotate_terms(hn, rn, tn, d)
    d_pos = rhop.sum(-1)                        # (B,)
    d_neg = rhon.sum(-1)                        # (B, K)

    # softmax weights over negatives of each positive, at temperature alpha
    logits = -alpha * d_neg
    logits -= logits.max(axis=1, keepdims=True)
    w = np.exp(logits)
    w /= w.sum(axis=1, keepdims=True)

    g_neg = -_log_sigmoid(d_neg - gamma)        # per-negative logistic cost
    loss = float((-_log_sigmoid(gamma - d_pos)).sum() + (w * g_neg).sum())
    if not want_grad:
        return loss, None, None

    de = np.zeros_like(model.entity_table)
    dr = np.zeros_like(model.relation_table)

    coef_pos = _sigmoid(d_pos - gamma)          # d loss / d d_pos
    d_hre, d_him, d_th, d_tre, d_tim = _rotate_coord_grads(up, vp, rhop, cosp, sinp, trep, timp)
    c = coef_pos[:, None]
    np.add.at(de, pos[:, 0], np.concatenate([c * d_hre, c * d_him], axis=-1))
    np.add.at(dr, pos[:, 1], c * d_th)
    np.add.at(de, pos[:, 2], np.concatenate([c * d_tre, c * d_tim], axis=-1))

    # d loss / d d_neg: weighted logistic slope plus the softmax coupling term
    gbar = (w * g_neg).sum(axis=1, keepdims=True)
    coef_neg = w * (_sigmoid(d_neg - gamma) - 1.0) - alpha * w * (g_neg - gbar)
    d_hre, d_him, d_th, d_tre, d_tim = _rotate_coord_grads(un, vn, rhon, cosn, sinn, tren, timn)
    c = coef_neg[..., None]
    flat = neg.reshape(-1, 3)
    np.add.at(de, flat[:, 0], np.concatenate([c * d_hre, c * d_him], axis=-1).reshape(-1, 2 * d))
    np.add.at(dr, flat[:, 1], (c * d_th).reshape(-1, d))
    np.add.at(de, flat[:, 2], np.concatenate([c * d_tre, c * d_tim], axis=-1).reshape(-1, 2 * d))
    return loss, de, dr


def _complex_grads_wrt_blocks(h, r, t, dim):
    hre, him = h[..., :dim], h[..., dim:]
    rre, rim = r[..., :dim], r[..., dim:]
    tre, tim = t[..., :dim], t[..., dim:]
    dh = np.concatenate([rre * tre + rim * tim, rre * tim - rim * tre], axis=-1)
    drl = np.concatenate([hre * tre + him * tim, hre * tim - him * tre], axis=-1)
    dt = np.concatenate([hre * rre - him * rim, him * rre + hre * rim], axis=-1)
    return dh, drl, dt


def _complex_loss_grad(model, pos, neg, config, want_grad):
    d = model.dim
    lam = config.l2_weight
    flat_neg = neg.reshape(-1, 3)
    all_triples = np.concatenate([pos, flat_neg], axis=0)
    y = np.concatenate([np.ones(len(pos)), -np.ones(len(flat_neg))])

    h, r, t = _gather(model, all_triples)
    s = score_parts("complex", d, h, r, t)
    margin_term = np.logaddexp(0.0, -y * s)     # softplus(-y s)
    reg = lam * ((h * h).sum(-1) + (r * r).sum(-1) + (t * t).sum(-1))
    loss = float(margin_term.sum() + reg.sum())
    if not want_grad:
        return loss, None, None

    de = np.zeros_like(model.entity_table)
    dr = np.zeros_like(model.relation_table)
    coef = (-y * _sigmoid(-y * s))[:, None]     # d softplus(-y s) / d s
    dh, drl, dt = _complex_grads_wrt_blocks(h, r, t, d)
    np.add.at(de, all_triples[:, 0], coef * dh + 2.0 * lam * h)
    np.add.at(dr, all_triples[:, 1], coef * drl + 2.0 * lam * r)
    np.add.at(de, all_triples[:, 2], coef * dt + 2.0 * lam * t)
    return loss, de, dr


def _renorm_entities(table: np.ndarray) -> None:
    norms = np.linalg.norm(table, axis=1)
    over = norms > 1.0
    if over.any():
        table[over] /= norms[over, None]


def _wrap_phases(table: np.ndarray) -> None:
    np.mod(table + np.pi, 2.0 * np.pi, out=table)
    table -= np.pi


def train(
    model: EmbeddingModel,
    graph,
    config: TrainConfig,
) -> tuple[EmbeddingModel, list[float]]:
    """Train a copy of the model on the graph's train split.

    Returns the trained model and the per-epoch loss trace (mean loss per
    positive triple). Aborts on a non-finite loss.
    """
    train_triples = np.asarray(graph.triples("train"), dtype=np.int64)
    if len(train_triples) == 0:
        raise ValueError("train split is empty")
    out = model.copy()
    if config.epochs == 0:
        return out, []

    rng = np.random.default_rng(config.rng_seed)
    codes = np.sort(_encode(train_triples, out.num_entities, out.num_relations))
    k = config.negatives_per_positive
    lr = config.learning_rate
    adagrad = out.kind == "complex"
    if adagrad:
        acc_e = np.zeros_like(out.entity_table)
        acc_r = np.zeros_like(out.relation_table)

    trace: list[float] = []
    n = len(train_triples)
    for epoch in range(config.epochs):
        perm = rng.permutation(n)
        total = 0.0
        for start in range(0, n, config.batch_size):
            pos = train_triples[perm[start : start + config.batch_size]]
            neg = sample_negatives(pos, out.num_entities, k, codes, rng, out.num_relations)
            loss, de, dr = batch_grad(out, pos, neg, config)
            if not np.isfinite(loss):
                raise RuntimeError(
                    f"non-finite loss at epoch {epoch}; learning rate {lr} is likely too high"
                )
            total += loss
            if adagrad:
                acc_e += de * de
                acc_r += dr * dr
                out.entity_table -= lr * de / (np.sqrt(acc_e) + 1e-10)
                out.relation_table -= lr * dr / (np.sqrt(acc_r) + 1e-10)
            else:
                out.entity_table -= lr * de
                out.relation_table -= lr * dr
                if out.kind == "transe":
                    _renorm_entities(out.entity_table)
                elif out.kind == "rotate":
                    _wrap_phases(out.relation_table)
        trace.append(total / n)
    return out, trace
