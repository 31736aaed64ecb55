"""End-to-end acceptance checks, one test per numbered criterion.

Each test prints a single "criterion N: PASS" line on success (visible
with -s or in captured output on failure).
"""

import itertools
import json
import time

import numpy as np
import pytest

from selinet.data import synth_dataset
from selinet.errors import UndefinedMetricError
from selinet.evaluate import average_precision, evaluate
from selinet.model import (
    Topology,
    forward_batch,
    init_head_params,
    param_count,
    param_items,
)
from selinet.modelio import model_bytes
from selinet.numerics import Rng, sigmoid
from selinet.postprocess import SentimentMap, boost, topk
from selinet.quantize import (
    QuantizedTensor,
    dequantize_tensor,
    quantize_model,
    size_report,
)
from selinet.training import (
    TrainConfig,
    gradcheck,
    total_loss,
    train,
    weighted_l2_loss,
)

# distinct head topologies of the published ablation grid (the final
# grid row only toggles post-processing, not the architecture)
ABLATION_TOPOLOGIES = [
    dict(use_aesthetics=False, use_attention=False, use_sentiment=False),
    dict(use_aesthetics=True, use_attention=False, use_sentiment=False),
    dict(use_aesthetics=True, use_attention=True, use_sentiment=False),
    dict(use_aesthetics=True, use_attention=True, use_sentiment=True),
]


def test_criterion_1_gradient_correctness():
    start = time.monotonic()
    for seed in (1, 2, 3):
        for kw in ABLATION_TOPOLOGIES:
            report = gradcheck(seed=seed, batch_size=4, h=1e-6, tol=1e-5, **kw)
            assert report["passed"], (seed, kw, report)
    elapsed = time.monotonic() - start
    assert elapsed < 120.0, f"gradcheck sweep took {elapsed:.1f}s"
    print("criterion 1: PASS")


def test_criterion_2_loss_oracles():
    eps = 0.0001
    assert weighted_l2_loss([1, 0], [0.5, 0.5], eps) == pytest.approx(
        0.250025, abs=1e-12
    )
    # uniform weights: every class true, weight 1/n each
    n = 26
    got = weighted_l2_loss([1] * n, [0.5] * n, eps)
    assert got == pytest.approx(0.25, abs=1e-12)
    assert total_loss(2.0, 1.0, 0.8) == 0.8 * 2.0 + 0.2 * 1.0
    print("criterion 2: PASS")


def test_criterion_3_ap_oracle():
    def brute(scores, labels):
        order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
        hits, acc = 0, 0.0
        for rank, i in enumerate(order, start=1):
            if labels[i] == 1:
                hits += 1
                acc += hits / rank
        return acc / hits

    rng = Rng(99)
    for n in range(1, 9):
        patterns = [p for p in itertools.product([0, 1], repeat=n) if sum(p)]
        score_vecs = [rng.uniforms(n) for _ in range(50)]
        for labels in patterns:
            for scores in score_vecs:
                assert average_precision(scores, labels) == pytest.approx(
                    brute(scores, labels), abs=1e-12
                )
    # closed-form worst ranking: positives behind all negatives
    m, P = 10, 4
    scores = np.arange(m, 0, -1, dtype=float)
    labels = np.array([0] * (m - P) + [1] * P)
    want = sum(i / (m - P + i) for i in range(1, P + 1)) / P
    assert average_precision(scores, labels) == want
    print("criterion 3: PASS")


def test_criterion_4_boost_semantics():
    smap = SentimentMap.default()
    rng = Rng(4)
    # full-width, zero-threshold boost is the elementwise update rule
    for _ in range(1000):
        e, s = rng.uniforms(26), rng.uniforms(3)
        out = boost(e, s, smap, k=26, sentiment_threshold=0.0)
        want = np.array([sigmoid(e[i] + s[smap.indices[i]]) for i in range(26)])
        np.testing.assert_allclose(out, want, rtol=1e-12)
    # all sentiments below threshold: identity
    for _ in range(100):
        e = rng.uniforms(26)
        s = rng.uniforms(3, 0.0, 0.499)
        np.testing.assert_array_equal(boost(e, s, smap), e)
    # every boosted score lands at >= 0.5
    for _ in range(100):
        e, s = rng.uniforms(26), rng.uniforms(3)
        out = boost(e, s, smap)
        assert np.all(out[out != e] >= 0.5)
    print("criterion 4: PASS")


def test_criterion_5_overfit(tmp_path):
    start = time.monotonic()
    ds = synth_dataset(tmp_path / "ds", seed=7, n_per_split=32, separability=10.0)
    _, history = train(ds, TrainConfig(epochs=200))
    final = history.epochs[-1]
    elapsed = time.monotonic() - start
    assert final["train_mean_ap"] >= 0.99, final
    assert final["train_total_loss"] < 0.01, final
    assert elapsed < 300.0, f"overfit run took {elapsed:.1f}s"
    print("criterion 5: PASS")


def test_criterion_6_determinism(tmp_path):
    ds_a = synth_dataset(tmp_path / "a", seed=5, n_per_split=8, separability=2.0)
    ds_b = synth_dataset(tmp_path / "b", seed=5, n_per_split=8, separability=2.0)
    cfg = TrainConfig(epochs=3, batch_size=4, seed=9)
    blobs, reports = [], []
    for ds in (ds_a, ds_b):
        p, _ = train(ds, cfg)
        blobs.append(model_bytes(p))
        rep = evaluate(p, ds, "test", boost=True)
        reports.append(json.dumps(rep.to_json(), sort_keys=True))
    assert blobs[0] == blobs[1]
    assert reports[0] == reports[1]
    print("criterion 6: PASS")


def test_criterion_7_quantization():
    p = init_head_params(Topology(), seed=42)
    qm = quantize_model(p)
    frep, qrep = size_report(p), size_report(qm)
    reduction = 1.0 - qrep["weight_payload_bytes"] / frep["weight_payload_bytes"]
    assert reduction >= 0.70, reduction

    originals = dict(param_items(p))
    for name, t in qm.tensors.items():
        if isinstance(t, QuantizedTensor):
            orig = originals[name]
            err = np.abs(
                dequantize_tensor(t).astype(np.float64) - orig.astype(np.float64)
            )
            assert np.max(err) <= t.scale / 2 + 1e-9, name

    rng = Rng(1000)
    n = 100
    body = rng.normals(n * 960 * 49).reshape(n, 960, 7, 7).astype(np.float32)
    aes = rng.normals(n * 1280 * 49).reshape(n, 1280, 7, 7).astype(np.float32)
    le, ls, _ = forward_batch(body, aes, p)
    qp = qm.dequantized_params()
    lq, lsq, _ = forward_batch(body, aes, qp)
    diff = max(
        float(np.max(np.abs(sigmoid(lq) - sigmoid(le)))),
        float(np.max(np.abs(sigmoid(lsq) - sigmoid(ls)))),
    )
    assert diff <= 0.05, diff
    print("criterion 7: PASS")


def test_criterion_8_sentiment_table():
    from selinet.data import derive_sentiment

    smap = SentimentMap.default()
    assert smap.sentiments == ["positive", "negative", "neutral"]
    # the three published example derivations
    np.testing.assert_array_equal(
        derive_sentiment(["Confidence", "Excitement"], smap), [1, 0, 0]
    )
    np.testing.assert_array_equal(
        derive_sentiment(["Peace", "Sensitivity"], smap), [1, 0, 1]
    )
    np.testing.assert_array_equal(
        derive_sentiment(["Disapproval", "Sadness"], smap), [0, 1, 0]
    )
    print("criterion 8: PASS")


def test_criterion_9_parameter_accounting(tmp_path):
    p = init_head_params(Topology(), seed=0)
    # closed-form sum, evaluated by hand: attention 961 + 1281; branch
    # dense 512*961 + 512*1281; fusion 512*1025 + 256*513; two trunks
    # 128*257 each; outputs 26*129 + 3*129
    want = (
        (960 + 1)
        + (1280 + 1)
        + 512 * (960 + 1)
        + 512 * (1280 + 1)
        + 512 * (1024 + 1)
        + 256 * (512 + 1)
        + 2 * 128 * (256 + 1)
        + 26 * (128 + 1)
        + 3 * (128 + 1)
    )
    assert want == 1_875_807
    assert param_count(p) == 1_875_807

    from selinet.modelio import save_model
    from selinet.quantize import save_quantized

    rep = size_report(p)
    path = tmp_path / "m.slnm"
    save_model(p, path)
    assert rep["file_bytes"] == path.stat().st_size
    qm = quantize_model(p)
    qrep = size_report(qm)
    qpath = tmp_path / "m.slnq"
    save_quantized(qm, qpath)
    assert qrep["file_bytes"] == qpath.stat().st_size
    print("criterion 9: PASS")
