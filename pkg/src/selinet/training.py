"""Manual reverse-mode differentiation through the fixed head topology,
the dynamically-weighted L2 multitask loss, plain SGD with step decay,
the epoch loop with best-validation-AP checkpointing, and a
finite-difference gradient checker.

Loss weights are per sample: 1/(number of true classes) on true
classes, a small constant elsewhere, treated as constants of the label
vector when differentiating.  The loss compares post-sigmoid scores to
the multi-hot targets.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ArgumentError, ConfigError, DimensionError, LabelError
from .model import (
    HeadParams,
    Topology,
    cast_params,
    clone_params,
    forward_batch,
    init_head_params,
    param_items,
)
from .numerics import Rng, sigmoid
from .postprocess import SentimentMap


@dataclass
class TrainConfig:
    batch_size: int = 26
    lr0: float = 0.001
    decay_factor: float = 0.1
    # None: milestones at 60% and 88% of the run ([15, 22] for 25 epochs)
    decay_epochs: list = None
    epochs: int = 25
    lam: float = 0.8  # emotion weight in the combined loss ("lambda" in JSON)
    eps_weight: float = 0.0001
    seed: int = 0
    use_aesthetics: bool = True
    use_attention: bool = True
    use_sentiment: bool = True

    _JSON_KEYS = {
        "batch_size": "batch_size",
        "lr0": "lr0",
        "decay_factor": "decay_factor",
        "decay_epochs": "decay_epochs",
        "epochs": "epochs",
        "lambda": "lam",
        "eps_weight": "eps_weight",
        "seed": "seed",
        "use_aesthetics": "use_aesthetics",
        "use_attention": "use_attention",
        "use_sentiment": "use_sentiment",
    }

    def __post_init__(self):
        if self.lr0 <= 0:
            raise ConfigError(f"lr0 must be > 0, got {self.lr0}")
        if not 0 < self.decay_factor <= 1:
            raise ConfigError(f"decay_factor must be in (0, 1], got {self.decay_factor}")
        if not 0 <= self.lam <= 1:
            raise ConfigError(f"lambda must be in [0, 1], got {self.lam}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.decay_epochs is None:
            self.decay_epochs = [round(0.6 * self.epochs), round(0.88 * self.epochs)]

    @classmethod
    def from_json(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
        if not isinstance(obj, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        unknown = sorted(set(obj) - set(cls._JSON_KEYS))
        if unknown:
            raise ConfigError(f"{path}: unknown config keys {unknown}")
        return cls(**{cls._JSON_KEYS[k]: v for k, v in obj.items()})

    def topology(self) -> Topology:
        return Topology(
            use_aesthetics=self.use_aesthetics,
            use_attention=self.use_attention,
            use_sentiment=self.use_sentiment,
        )


@dataclass
class TrainHistory:
    epochs: list = field(default_factory=list)  # one dict per completed epoch
    best_epoch: int = -1

    def to_json(self):
        return {"epochs": self.epochs, "best_epoch": self.best_epoch}


def dynamic_weights(y_true, eps) -> np.ndarray:
    """Per-class weights: 1/(#true) on true classes, eps elsewhere."""
    y = np.asarray(y_true)
    if y.ndim != 1:
        raise DimensionError(f"label vector must be 1-d, got shape {y.shape}")
    if not np.all((y == 0) | (y == 1)):
        raise LabelError("label vector must be multi-hot (0/1)")
    total = int(y.sum())
    if total == 0:
        raise LabelError("label vector has no true class")
    return np.where(y == 1, 1.0 / total, float(eps))


def weighted_l2_loss(y_true, y_pred, eps) -> float:
    """Sum of squared errors with the dynamic per-class weights."""
    y = np.asarray(y_true, dtype=np.float64)
    p = np.asarray(y_pred, dtype=np.float64)
    if y.shape != p.shape:
        raise DimensionError(f"label/score length mismatch: {y.shape} vs {p.shape}")
    w = dynamic_weights(y_true, eps)
    return float(np.sum((y - p) ** 2 * w))


def total_loss(l_emotion, l_sentiment, lam) -> float:
    """Combined multitask loss: lam * emotion + (1 - lam) * sentiment."""
    if not 0 <= lam <= 1:
        raise ArgumentError(f"lambda must be in [0, 1], got {lam}")
    return lam * l_emotion + (1 - lam) * l_sentiment


def _batch_weights(Y, eps, dtype):
    """Row-wise dynamic weights for a multi-hot label matrix."""
    Y = np.asarray(Y)
    counts = Y.sum(axis=1)
    if np.any(counts == 0):
        raise LabelError("every sample needs at least one true class")
    return np.where(Y == 1, 1.0 / counts[:, None], float(eps)).astype(dtype)


def _relu_bwd(grad, out):
    return grad * (out > 0)


def _forward_loss_backward(body, aes, y_emotion, y_sentiment, p: HeadParams, cfg):
    """One fused pass: returns (total, emotion, sentiment losses, grads dict)."""
    t = p.topology
    dtype = p.dtype
    le, ls, cache = forward_batch(body, aes, p, want_cache=True)
    B = le.shape[0]
    if B == 0:
        raise ArgumentError("empty batch")
    lam = cfg.lam if t.use_sentiment else 1.0

    Ye = np.asarray(y_emotion, dtype=dtype)
    if Ye.shape != le.shape:
        raise DimensionError(f"emotion labels {Ye.shape} vs logits {le.shape}")
    We = _batch_weights(y_emotion, cfg.eps_weight, dtype)
    pe = sigmoid(le)
    loss_e = float(np.sum((Ye - pe) ** 2 * We) / B)
    dle = (lam * 2.0 * (pe - Ye) * We / B) * (pe * (1.0 - pe))

    grads = {}

    def affine_back(x, d, dY, prefix):
        dX, dW, db = kernels.affine_bwd(x, d.W, np.ascontiguousarray(dY))
        grads[f"{prefix}.W"] = dW
        grads[f"{prefix}.b"] = db
        return dX

    dte = _relu_bwd(affine_back(cache["te"], p.emo_out, dle, "emo_out"), cache["te"])
    df2 = affine_back(cache["f2"], p.emo_trunk, dte, "emo_trunk")

    if t.use_sentiment:
        Ys = np.asarray(y_sentiment, dtype=dtype)
        if Ys.shape != ls.shape:
            raise DimensionError(f"sentiment labels {Ys.shape} vs logits {ls.shape}")
        Ws = _batch_weights(y_sentiment, cfg.eps_weight, dtype)
        ps = sigmoid(ls)
        loss_s = float(np.sum((Ys - ps) ** 2 * Ws) / B)
        dls = ((1.0 - lam) * 2.0 * (ps - Ys) * Ws / B) * (ps * (1.0 - ps))
        dts = _relu_bwd(
            affine_back(cache["ts"], p.sen_out, dls, "sen_out"), cache["ts"]
        )
        df2 = df2 + affine_back(cache["f2"], p.sen_trunk, dts, "sen_trunk")
    else:
        loss_s = 0.0

    df2 = _relu_bwd(df2, cache["f2"])
    df1 = _relu_bwd(affine_back(cache["f1"], p.fuse2, df2, "fuse2"), cache["f1"])
    dz = affine_back(cache["z"], p.fuse1, df1, "fuse1")

    bw = t.branch_units

    def branch_back(dh, h, v, F, alpha, dense_p, attn_p, prefix, attn_prefix):
        dh = _relu_bwd(dh, h)
        dv = affine_back(v, dense_p, dh, prefix)
        if t.use_attention:
            dw, db = kernels.attn_pool_bwd(F, alpha, np.ascontiguousarray(dv))
            grads[f"{attn_prefix}.w"] = dw
            grads[f"{attn_prefix}.b"] = np.array([db], dtype=dtype)

    branch_back(
        dz[:, :bw], cache["hb"], cache["vb"], cache["Fb"], cache["alpha_b"],
        p.body_dense, p.body_attn, "body_dense", "body_attn",
    )
    if t.use_aesthetics:
        branch_back(
            dz[:, bw:], cache["ha"], cache["va"], cache["Fa"], cache["alpha_a"],
            p.aes_dense, p.aes_attn, "aes_dense", "aes_attn",
        )

    loss = total_loss(loss_e, loss_s, lam) if t.use_sentiment else loss_e
    return loss, loss_e, loss_s, grads


def backward(body, aes, y_emotion, y_sentiment, p: HeadParams, cfg):
    """Batch-mean multitask loss and its exact gradients."""
    loss, _, _, grads = _forward_loss_backward(body, aes, y_emotion, y_sentiment, p, cfg)
    return loss, grads


def batch_loss(body, aes, y_emotion, y_sentiment, p: HeadParams, cfg):
    """Forward-only batch-mean total loss (used by the gradient checker).

    Computed in the parameter dtype without downcasts, so a longdouble
    parameter set yields an extended-precision loss.
    """
    t = p.topology
    le, ls, _ = forward_batch(body, aes, p)
    B = le.shape[0]
    dt = np.float64 if p.dtype == np.float32 else p.dtype
    lam = cfg.lam if t.use_sentiment else 1.0
    We = _batch_weights(y_emotion, cfg.eps_weight, dt)
    pe = sigmoid(le.astype(dt))
    loss_e = np.sum((np.asarray(y_emotion) - pe) ** 2 * We) / B
    if not t.use_sentiment:
        return loss_e
    Ws = _batch_weights(y_sentiment, cfg.eps_weight, dt)
    ps = sigmoid(ls.astype(dt))
    loss_s = np.sum((np.asarray(y_sentiment) - ps) ** 2 * Ws) / B
    return lam * loss_e + (1 - lam) * loss_s


def sgd_step(p: HeadParams, grads: dict, lr: float) -> HeadParams:
    """In-place p <- p - lr * g; returns p."""
    for name, a in param_items(p):
        g = grads[name]
        if np.shape(g) != a.shape:
            raise DimensionError(f"gradient {name} has shape {np.shape(g)}, want {a.shape}")
        a -= (lr * np.asarray(g)).astype(a.dtype)
    return p


def lr_schedule(epoch: int, cfg: TrainConfig) -> float:
    """Step decay: lr0 * factor^(number of decay epochs reached)."""
    hits = sum(1 for d in cfg.decay_epochs if d <= epoch)
    return cfg.lr0 * cfg.decay_factor**hits


def _stack_split(dataset, split):
    records = dataset.split(split)
    if not records:
        raise ArgumentError(f"split {split!r} is empty")
    bodies, aess, yes, yss = [], [], [], []
    for rec in records:
        body, aes = dataset.features(rec)
        ye, ys = dataset.labels(rec)
        bodies.append(body)
        aess.append(aes)
        yes.append(ye)
        yss.append(ys)
    return (
        np.stack(bodies),
        np.stack(aess),
        np.stack(yes),
        np.stack(yss),
    )


def train(dataset, cfg: TrainConfig, log=None):
    """Full training loop; returns (best params, TrainHistory).

    Deterministic given cfg.seed: parameter init, per-epoch shuffles
    and batch partitions all come from one seeded generator.  The
    checkpoint is the epoch with the best validation mean AP (ties go
    to the earlier epoch); validation never uses boosting.
    """
    from .evaluate import evaluate  # late import, avoids a module cycle

    rng = Rng(cfg.seed)
    p = init_head_params(cfg.topology(), rng, emotions=dataset.emotions)
    body, aes, Ye, Ys = _stack_split(dataset, "train")
    if not cfg.use_aesthetics:
        aes = None
    n = body.shape[0]

    history = TrainHistory()
    best_ap = -1.0
    best_params = clone_params(p)
    for epoch in range(cfg.epochs):
        lr = lr_schedule(epoch, cfg)
        perm = rng.permutation(n)
        sum_total = sum_e = sum_s = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = perm[start : start + cfg.batch_size]
            loss, loss_e, loss_s, grads = _forward_loss_backward(
                body[idx],
                None if aes is None else aes[idx],
                Ye[idx],
                Ys[idx],
                p,
                cfg,
            )
            sgd_step(p, grads, lr)
            sum_total += loss * len(idx)
            sum_e += loss_e * len(idx)
            sum_s += loss_s * len(idx)
        report = evaluate(p, dataset, "val", boost=False)
        train_report = evaluate(p, dataset, "train", boost=False)
        entry = {
            "epoch": epoch,
            "lr": lr,
            "train_emotion_loss": sum_e / n,
            "train_sentiment_loss": sum_s / n,
            "train_total_loss": sum_total / n,
            "train_mean_ap": train_report.mean_ap,
            "val_mean_ap": report.mean_ap,
        }
        history.epochs.append(entry)
        if report.mean_ap > best_ap:
            best_ap = report.mean_ap
            best_params = clone_params(p)
            history.best_epoch = epoch
        if log is not None:
            log(
                f"epoch {epoch:3d}  lr {lr:.6g}  loss {entry['train_total_loss']:.6f}  "
                f"train mAP {train_report.mean_ap:.4f}  val mAP {report.mean_ap:.4f}"
            )
    return best_params, history


# Reduced layer sizes for exhaustive finite-difference coverage; the
# backward code is size-generic, so checking every coordinate of a
# small head exercises the same chain rule as the production sizes.
GRADCHECK_TOPOLOGY_KW = dict(
    body_channels=24,
    aes_channels=32,
    spatial=(3, 3),
    branch_units=16,
    fuse_units=(16, 12),
    trunk_units=10,
)


def _random_batch(rng, topo, n, dtype=np.float64):
    smap = SentimentMap.default()
    body = rng.normals(n * topo.body_channels * topo.locations).reshape(
        n, topo.body_channels, *topo.spatial
    )
    aes = None
    if topo.use_aesthetics:
        aes = rng.normals(n * topo.aes_channels * topo.locations).reshape(
            n, topo.aes_channels, *topo.spatial
        )
    Ye = np.zeros((n, topo.n_emotions), dtype=np.int64)
    Ys = np.zeros((n, topo.n_sentiments), dtype=np.int64)
    for i in range(n):
        k = 1 + rng.below(3)
        for c in rng.permutation(topo.n_emotions)[:k]:
            Ye[i, c] = 1
            Ys[i, smap.indices[c]] = 1
    return body.astype(dtype), None if aes is None else aes.astype(dtype), Ye, Ys


def gradcheck(
    seed=1,
    use_aesthetics=True,
    use_attention=True,
    use_sentiment=True,
    batch_size=4,
    h=1e-6,
    tol=1e-5,
    topology_kw=None,
    coords_per_tensor=None,
    inject_fault=False,
):
    """Compare backward() against central finite differences (float64).

    By default every coordinate of a reduced-size head is checked; pass
    topology_kw={} for the production sizes together with a
    coords_per_tensor budget (full coverage there is prohibitive).
    Relative error is |a - n| / max(1e-8, |a| + |n|).

    The analytic side runs in float64; the difference quotient is
    evaluated through the numpy kernel path in extended precision
    (longdouble), which keeps the h=1e-6 quotient clear of float64
    round-off for near-zero gradients and makes the oracle independent
    of the compiled backend it is checking.

    Returns a report dict; `inject_fault` perturbs one analytic
    gradient entry to prove the harness can fail.
    """
    kw = GRADCHECK_TOPOLOGY_KW if topology_kw is None else topology_kw
    topo = Topology(
        use_aesthetics=use_aesthetics,
        use_attention=use_attention,
        use_sentiment=use_sentiment,
        **kw,
    )
    rng = Rng(seed)
    p = init_head_params(topo, rng, dtype=np.float64)
    body, aes, Ye, Ys = _random_batch(rng, topo, batch_size)
    cfg = TrainConfig(seed=seed)

    _, grads = backward(body, aes, Ye, Ys, p, cfg)
    if inject_fault:
        first = param_items(p)[0][0]
        grads[first] = grads[first].copy()
        grads[first].flat[0] += 1e-2

    ld = np.longdouble
    pl = cast_params(p, ld)
    body_l = body.astype(ld)
    aes_l = None if aes is None else aes.astype(ld)
    items_l = dict(param_items(pl))
    hl = ld(h)

    worst = (None, None)
    max_err = 0.0
    n_checked = 0
    for name, a in param_items(p):
        flat = items_l[name].reshape(-1)
        gflat = np.asarray(grads[name]).reshape(-1)
        if coords_per_tensor is None or coords_per_tensor >= flat.size:
            coords = range(flat.size)
        else:
            coords = sorted({rng.below(flat.size) for _ in range(coords_per_tensor)})
        for j in coords:
            orig = flat[j]
            flat[j] = orig + hl
            lp = batch_loss(body_l, aes_l, Ye, Ys, pl, cfg)
            flat[j] = orig - hl
            lm = batch_loss(body_l, aes_l, Ye, Ys, pl, cfg)
            flat[j] = orig
            numeric = float((lp - lm) / (2 * hl))
            analytic = float(gflat[j])
            err = abs(analytic - numeric) / max(1e-8, abs(analytic) + abs(numeric))
            n_checked += 1
            if err > max_err:
                max_err = err
                worst = (name, j)
    return {
        "passed": max_err <= tol,
        "max_rel_err": max_err,
        "worst": worst,
        "tol": tol,
        "n_coords": n_checked,
        "topology": {
            "use_aesthetics": use_aesthetics,
            "use_attention": use_attention,
            "use_sentiment": use_sentiment,
        },
        "seed": seed,
    }
