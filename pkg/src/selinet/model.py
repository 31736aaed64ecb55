"""The fixed two-branch multitask head: attention pooling over frozen
backbone feature maps, branch dense layers, fusion stack, and the
emotion/sentiment output heads.

Topology (default sizes):

    body   960x7x7 --attn pool--> 960  --dense+relu--> 512 \
                                                            concat(1024)
    aes   1280x7x7 --attn pool--> 1280 --dense+relu--> 512 /
    fusion: 1024 -> 512 -> 256 (relu)
    emotion head:   256 -> 128 (relu) -> 26 (linear)
    sentiment head: 256 -> 128 (relu) -> 3  (linear)

Ablation flags drop the aesthetics branch (fusion input shrinks to
512), replace attention pooling by spatial mean pooling (attention
parameters disappear), or drop the sentiment head entirely.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels_py, kernels, schema
from .errors import ArgumentError, DimensionError
from .numerics import Rng, sigmoid


@dataclass
class Topology:
    """Layer sizes and ablation flags; defaults are the production head."""

    use_aesthetics: bool = True
    use_attention: bool = True
    use_sentiment: bool = True
    body_channels: int = 960
    aes_channels: int = 1280
    spatial: tuple = (7, 7)
    branch_units: int = 512
    fuse_units: tuple = (512, 256)
    trunk_units: int = 128
    n_emotions: int = 26
    n_sentiments: int = 3

    def __post_init__(self):
        dims = [
            self.body_channels,
            self.branch_units,
            *self.fuse_units,
            self.trunk_units,
            self.n_emotions,
            *self.spatial,
        ]
        if self.use_aesthetics:
            dims.append(self.aes_channels)
        if self.use_sentiment:
            dims.append(self.n_sentiments)
        if any(d < 1 for d in dims):
            raise ArgumentError(f"degenerate topology (non-positive size): {self}")

    @property
    def locations(self):
        return self.spatial[0] * self.spatial[1]

    @property
    def fused_width(self):
        return self.branch_units * (2 if self.use_aesthetics else 1)

    def flag_bits(self):
        """Pack the three ablation flags into the low bits of a u16."""
        return (
            (1 if self.use_aesthetics else 0)
            | (2 if self.use_attention else 0)
            | (4 if self.use_sentiment else 0)
        )

    @classmethod
    def from_flag_bits(cls, bits, **kwargs):
        return cls(
            use_aesthetics=bool(bits & 1),
            use_attention=bool(bits & 2),
            use_sentiment=bool(bits & 4),
            **kwargs,
        )


@dataclass
class AttentionPoolParams:
    w: np.ndarray  # (C,) per-channel score weights
    b: np.ndarray  # (1,) score bias


@dataclass
class DenseParams:
    W: np.ndarray  # (out, in)
    b: np.ndarray  # (out,)
    activation: str = "relu"  # "relu" | "linear"


@dataclass
class HeadParams:
    topology: Topology
    emotions: list = field(default_factory=lambda: list(schema.EMOTIONS))
    sentiments: list = field(default_factory=lambda: list(schema.SENTIMENTS))
    body_attn: Optional[AttentionPoolParams] = None
    body_dense: DenseParams = None
    aes_attn: Optional[AttentionPoolParams] = None
    aes_dense: Optional[DenseParams] = None
    fuse1: DenseParams = None
    fuse2: DenseParams = None
    emo_trunk: DenseParams = None
    sen_trunk: Optional[DenseParams] = None
    emo_out: DenseParams = None
    sen_out: Optional[DenseParams] = None

    @property
    def dtype(self):
        return self.body_dense.W.dtype


@dataclass
class Logits:
    emotion: np.ndarray  # (n_emotions,)
    sentiment: Optional[np.ndarray]  # (n_sentiments,) or None when head ablated


class Prediction:
    """Post-sigmoid scores; `boosted` is write-once (one boost per prediction)."""

    def __init__(self, emotion_scores, sentiment_scores=None):
        self.emotion_scores = np.asarray(emotion_scores)
        self.sentiment_scores = (
            None if sentiment_scores is None else np.asarray(sentiment_scores)
        )
        self._boosted = None

    @property
    def boosted(self):
        return self._boosted

    def set_boosted(self, scores):
        if self._boosted is not None:
            raise ArgumentError("prediction already boosted")
        self._boosted = np.asarray(scores)

    def final_scores(self):
        return self.emotion_scores if self._boosted is None else self._boosted


def param_items(p: HeadParams):
    """Canonical (name, array) list: serialization, SGD and init order."""
    items = []

    def attn(name, a):
        if a is not None:
            items.append((f"{name}.w", a.w))
            items.append((f"{name}.b", a.b))

    def dense(name, d):
        if d is not None:
            items.append((f"{name}.W", d.W))
            items.append((f"{name}.b", d.b))

    attn("body_attn", p.body_attn)
    dense("body_dense", p.body_dense)
    attn("aes_attn", p.aes_attn)
    dense("aes_dense", p.aes_dense)
    dense("fuse1", p.fuse1)
    dense("fuse2", p.fuse2)
    dense("emo_trunk", p.emo_trunk)
    dense("sen_trunk", p.sen_trunk)
    dense("emo_out", p.emo_out)
    dense("sen_out", p.sen_out)
    return items


def param_count(p: HeadParams) -> int:
    """Exact number of trainable scalars."""
    return sum(int(a.size) for _, a in param_items(p))


def init_head_params(
    topology: Topology,
    seed,
    emotions=None,
    sentiments=None,
    dtype=np.float32,
) -> HeadParams:
    """Seeded initialization in the canonical parameter order.

    Dense weights are uniform +-sqrt(6/(in+out)), attention score
    weights are N(0, 0.01), all biases zero.  `seed` may be an int or
    an already-advanced Rng (the training loop shares one generator
    for init, shuffles and batching).
    """
    t = topology
    emotions = list(schema.EMOTIONS) if emotions is None else list(emotions)
    sentiments = list(schema.SENTIMENTS) if sentiments is None else list(sentiments)
    if len(emotions) != t.n_emotions or len(sentiments) != t.n_sentiments:
        raise ArgumentError(
            f"schema sizes {len(emotions)}/{len(sentiments)} do not match topology "
            f"{t.n_emotions}/{t.n_sentiments}"
        )
    rng = seed if isinstance(seed, Rng) else Rng(seed)

    def attn(c):
        return AttentionPoolParams(
            w=rng.normals(c, 0.0, 0.01).astype(dtype),
            b=np.zeros(1, dtype=dtype),
        )

    def dense(n_out, n_in, activation="relu"):
        limit = np.sqrt(6.0 / (n_in + n_out))
        W = rng.uniforms(n_out * n_in, -limit, limit).reshape(n_out, n_in)
        return DenseParams(
            W=W.astype(dtype), b=np.zeros(n_out, dtype=dtype), activation=activation
        )

    p = HeadParams(topology=t, emotions=emotions, sentiments=sentiments)
    if t.use_attention:
        p.body_attn = attn(t.body_channels)
    p.body_dense = dense(t.branch_units, t.body_channels)
    if t.use_aesthetics:
        if t.use_attention:
            p.aes_attn = attn(t.aes_channels)
        p.aes_dense = dense(t.branch_units, t.aes_channels)
    p.fuse1 = dense(t.fuse_units[0], t.fused_width)
    p.fuse2 = dense(t.fuse_units[1], t.fuse_units[0])
    p.emo_trunk = dense(t.trunk_units, t.fuse_units[1])
    if t.use_sentiment:
        p.sen_trunk = dense(t.trunk_units, t.fuse_units[1])
    p.emo_out = dense(t.n_emotions, t.trunk_units, activation="linear")
    if t.use_sentiment:
        p.sen_out = dense(t.n_sentiments, t.trunk_units, activation="linear")
    return p


def clone_params(p: HeadParams) -> HeadParams:
    """Deep copy of all parameter arrays (topology/schema shared)."""
    out = HeadParams(topology=p.topology, emotions=p.emotions, sentiments=p.sentiments)
    for name in (
        "body_attn",
        "aes_attn",
    ):
        a = getattr(p, name)
        if a is not None:
            setattr(out, name, AttentionPoolParams(w=a.w.copy(), b=a.b.copy()))
    for name in (
        "body_dense",
        "aes_dense",
        "fuse1",
        "fuse2",
        "emo_trunk",
        "sen_trunk",
        "emo_out",
        "sen_out",
    ):
        d = getattr(p, name)
        if d is not None:
            setattr(
                out, name, DenseParams(W=d.W.copy(), b=d.b.copy(), activation=d.activation)
            )
    return out


def cast_params(p: HeadParams, dtype) -> HeadParams:
    """Copy of p with every array cast to dtype (float64 for gradcheck)."""
    out = clone_params(p)
    for name in ("body_attn", "aes_attn"):
        a = getattr(out, name)
        if a is not None:
            a.w = a.w.astype(dtype)
            a.b = a.b.astype(dtype)
    for name in (
        "body_dense",
        "aes_dense",
        "fuse1",
        "fuse2",
        "emo_trunk",
        "sen_trunk",
        "emo_out",
        "sen_out",
    ):
        d = getattr(out, name)
        if d is not None:
            d.W = d.W.astype(dtype)
            d.b = d.b.astype(dtype)
    return out


def _check_features(name, F, channels, spatial):
    F = np.asarray(F)
    want = (channels, *spatial)
    if F.ndim == 3:
        if F.shape != want:
            raise DimensionError(f"{name} feature map must be {want}, got {F.shape}")
    elif F.ndim != 4 or F.shape[1:] != want:
        raise DimensionError(
            f"{name} feature batch must be (B, {channels}, {spatial[0]}, {spatial[1]}), "
            f"got {F.shape}"
        )
    return F


def attention_pool(F, p: AttentionPoolParams):
    """Softmax-weighted convex combination of the spatial location vectors."""
    F = np.asarray(F)
    if F.ndim != 3:
        raise DimensionError(f"feature map must be (C, H, W), got shape {F.shape}")
    C = p.w.shape[0]
    if F.shape[0] != C:
        raise DimensionError(f"channel mismatch: map has {F.shape[0]}, params expect {C}")
    dtype = p.w.dtype
    Fb = np.ascontiguousarray(F.reshape(1, C, -1), dtype=dtype)
    V, _ = _impl_for(dtype).attn_pool_fwd(Fb, p.w, float(p.b[0]))
    return V[0]


def _relu_fwd(x):
    return np.maximum(x, 0)


def _impl_for(dtype):
    """Kernel module for a dtype; exotic floats (longdouble gradcheck
    oracle) always go through the numpy implementation."""
    if dtype == np.float32 or dtype == np.float64:
        return kernels
    return _kernels_py


def forward_batch(body, aes, p: HeadParams, want_cache=False):
    """Batched forward pass.

    body: (B, Cb, H, W); aes: (B, Ca, H, W) or None when the aesthetics
    branch is ablated.  Returns (emotion_logits[B,E], sentiment_logits
    [B,S] or None, cache) where cache holds the intermediates needed by
    the backward pass (None unless requested).
    """
    t = p.topology
    dtype = p.dtype
    body = _check_features("body", body, t.body_channels, t.spatial)
    if body.ndim == 3:
        body = body[None]
    B = body.shape[0]
    Fb = np.ascontiguousarray(body.reshape(B, t.body_channels, -1), dtype=dtype)

    cache = {} if want_cache else None
    impl = _impl_for(dtype)

    def pool(F, attn):
        if t.use_attention:
            return impl.attn_pool_fwd(F, attn.w, float(attn.b[0]))
        return impl.mean_pool(F), None

    def dense(x, d):
        y = impl.affine_fwd(x, d.W, d.b)
        return _relu_fwd(y) if d.activation == "relu" else y

    vb, alpha_b = pool(Fb, p.body_attn)
    hb = dense(vb, p.body_dense)

    if t.use_aesthetics:
        if aes is None:
            raise DimensionError("aesthetics feature map required by this topology")
        aes = _check_features("aesthetic", aes, t.aes_channels, t.spatial)
        if aes.ndim == 3:
            aes = aes[None]
        if aes.shape[0] != B:
            raise DimensionError(
                f"batch mismatch: body has {B} samples, aesthetic has {aes.shape[0]}"
            )
        Fa = np.ascontiguousarray(aes.reshape(B, t.aes_channels, -1), dtype=dtype)
        va, alpha_a = pool(Fa, p.aes_attn)
        ha = dense(va, p.aes_dense)
        z = np.ascontiguousarray(np.concatenate([hb, ha], axis=1))
    else:
        Fa = va = alpha_a = ha = None
        z = hb

    f1 = dense(z, p.fuse1)
    f2 = dense(f1, p.fuse2)
    te = dense(f2, p.emo_trunk)
    le = impl.affine_fwd(te, p.emo_out.W, p.emo_out.b)
    if t.use_sentiment:
        ts = dense(f2, p.sen_trunk)
        ls = impl.affine_fwd(ts, p.sen_out.W, p.sen_out.b)
    else:
        ts = ls = None

    if not (np.all(np.isfinite(le)) and (ls is None or np.all(np.isfinite(ls)))):
        raise ArgumentError("non-finite logits (diverged parameters or bad input)")

    if want_cache:
        cache.update(
            Fb=Fb, alpha_b=alpha_b, vb=vb, hb=hb,
            Fa=Fa, alpha_a=alpha_a, va=va, ha=ha,
            z=z, f1=f1, f2=f2, te=te, ts=ts,
        )
    return le, ls, cache


def head_forward(body, aes, p: HeadParams) -> Logits:
    """Single-sample forward pass returning raw (pre-sigmoid) logits."""
    le, ls, _ = forward_batch(
        np.asarray(body)[None], None if aes is None else np.asarray(aes)[None], p
    )
    return Logits(emotion=le[0], sentiment=None if ls is None else ls[0])


def predict(logits: Logits) -> Prediction:
    """Elementwise sigmoid over the logits."""
    return Prediction(
        emotion_scores=sigmoid(logits.emotion),
        sentiment_scores=None if logits.sentiment is None else sigmoid(logits.sentiment),
    )
