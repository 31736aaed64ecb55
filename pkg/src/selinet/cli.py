"""Batch command-line surface.

Commands: train, eval, predict, quantize, gradcheck, synth, ablate,
inspect.  Machine-readable output is JSON; human-facing tables are
plain text.  Exit code 0 on success, 1 with a one-line diagnostic on
any expected failure.
"""

import argparse
import json
import sys

import numpy as np

from . import data, modelio, postprocess, quantize, training
from .errors import SelinetError
from .evaluate import evaluate
from .model import head_forward, param_count, predict
from .postprocess import SentimentMap
from .quantize import load_quantized, quantize_model, save_quantized, size_report


def _load_dataset(path, smap=None):
    return data.load_annotations(path, smap=smap)


def _load_map(args, emotions=None, sentiments=None):
    if getattr(args, "map", None):
        return SentimentMap.from_json(args.map, emotions, sentiments)
    return SentimentMap.default(emotions, sentiments)


def cmd_train(args):
    cfg = training.TrainConfig.from_json(args.config)
    ds = _load_dataset(args.data)
    best, history = training.train(ds, cfg, log=lambda s: print(s, file=sys.stderr))
    modelio.save_model(best, args.out)
    if args.history:
        with open(args.history, "w", encoding="utf-8") as fh:
            json.dump(history.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(f"saved model to {args.out} (best epoch {history.best_epoch})")
    return 0


def cmd_eval(args):
    if args.model.endswith(".slnq"):
        m = load_quantized(args.model)
        emotions, sentiments = m.emotions, m.sentiments
    else:
        m = modelio.load_model(args.model)
        emotions, sentiments = m.emotions, m.sentiments
    smap = _load_map(args, emotions, sentiments)
    ds = _load_dataset(args.data, smap=smap)
    report = evaluate(m, ds, args.split, boost=args.boost, smap=smap)
    print(report.to_text())
    if args.report:
        report.save_json(args.report)
    return 0


def cmd_predict(args):
    p = modelio.load_model(args.model)
    maps = data.read_feature_file(args.features)
    for key in ("body", "aesthetic"):
        if key not in maps:
            raise SelinetError(f"{args.features}: missing tensor {key!r}")
    logits = head_forward(
        maps["body"], maps["aesthetic"] if p.topology.use_aesthetics else None, p
    )
    pred = predict(logits)
    scores = pred.emotion_scores
    if args.boost:
        if pred.sentiment_scores is None:
            raise SelinetError("cannot boost: model has no sentiment head")
        smap = _load_map(args, p.emotions, p.sentiments)
        pred.set_boosted(postprocess.boost(scores, pred.sentiment_scores, smap))
        scores = pred.boosted
    order = postprocess.topk(scores, args.top)
    out = {
        "emotions": {p.emotions[i]: float(scores[i]) for i in order},
        "sentiments": (
            None
            if pred.sentiment_scores is None
            else {
                name: float(s)
                for name, s in zip(p.sentiments, pred.sentiment_scores)
            }
        ),
        "boosted": pred.boosted is not None,
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_quantize(args):
    p = modelio.load_model(args.model)
    qm = quantize_model(p)
    save_quantized(qm, args.out)
    if args.report:
        rep = {"fp32": size_report(p), "quantized": size_report(qm)}
        print(json.dumps(rep, indent=2, sort_keys=True))
    print(f"saved quantized model to {args.out}")
    return 0


def cmd_gradcheck(args):
    report = training.gradcheck(
        seed=args.seed,
        use_aesthetics=not args.no_aesthetics,
        use_attention=not args.no_attention,
        use_sentiment=not args.no_sentiment,
    )
    status = "PASS" if report["passed"] else "FAIL"
    print(
        f"gradcheck {status}: max rel err {report['max_rel_err']:.3e} "
        f"over {report['n_coords']} coordinates (tol {report['tol']:g}), "
        f"worst at {report['worst']}"
    )
    return 0 if report["passed"] else 1


def cmd_synth(args):
    data.synth_dataset(args.out, args.seed, args.n, separability=args.separability)
    print(f"wrote synthetic dataset to {args.out}/annotations.jsonl")
    return 0


# (aesthetics, attention, sentiment, boost) per published ablation row
ABLATION_GRID = [
    (False, False, False, False),
    (True, False, False, False),
    (True, True, False, False),
    (True, True, True, False),
    (True, True, True, True),
]


def cmd_ablate(args):
    base = training.TrainConfig.from_json(args.config)
    ds = _load_dataset(args.data)
    rows = []
    for use_aes, use_attn, use_sen, use_boost in ABLATION_GRID:
        cfg = training.TrainConfig(
            batch_size=base.batch_size,
            lr0=base.lr0,
            decay_factor=base.decay_factor,
            decay_epochs=list(base.decay_epochs),
            epochs=base.epochs,
            lam=base.lam,
            eps_weight=base.eps_weight,
            seed=base.seed,
            use_aesthetics=use_aes,
            use_attention=use_attn,
            use_sentiment=use_sen,
        )
        best, _ = training.train(ds, cfg)
        report = evaluate(best, ds, "test", boost=use_boost)
        rows.append(
            {
                "aesthetics": use_aes,
                "attention": use_attn,
                "sentiment": use_sen,
                "boost": use_boost,
                "mean_ap": report.mean_ap,
                "param_count": param_count(best),
            }
        )
    header = f"{'aes':>5} {'attn':>5} {'sent':>5} {'boost':>5} {'params':>9} {'mean AP':>8}"
    print(header)
    for r in rows:
        print(
            f"{str(r['aesthetics']):>5} {str(r['attention']):>5} "
            f"{str(r['sentiment']):>5} {str(r['boost']):>5} "
            f"{r['param_count']:>9} {r['mean_ap']:>8.4f}"
        )
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def cmd_inspect(args):
    if args.model.endswith(".slnq"):
        m = load_quantized(args.model)
        emotions, sentiments, t = m.emotions, m.sentiments, m.topology
    else:
        m = modelio.load_model(args.model)
        emotions, sentiments, t = m.emotions, m.sentiments, m.topology
    out = {
        "emotions": emotions,
        "sentiments": sentiments,
        "flags": {
            "use_aesthetics": t.use_aesthetics,
            "use_attention": t.use_attention,
            "use_sentiment": t.use_sentiment,
        },
        "sizes": size_report(m),
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="selinet")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a head on a JSONL dataset")
    p.add_argument("--config", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--history")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on a split")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--split", default="test", choices=list(data.SPLITS))
    p.add_argument("--boost", action="store_true")
    p.add_argument("--map")
    p.add_argument("--report")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("predict", help="score one feature file")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--boost", action="store_true")
    p.add_argument("--map")
    p.add_argument("--top", type=int, default=5)
    p.set_defaults(fn=cmd_predict)

    p = sub.add_parser("quantize", help="int8-quantize a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", action="store_true")
    p.set_defaults(fn=cmd_quantize)

    p = sub.add_parser("gradcheck", help="finite-difference gradient check")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--no-aesthetics", action="store_true")
    p.add_argument("--no-attention", action="store_true")
    p.add_argument("--no-sentiment", action="store_true")
    p.set_defaults(fn=cmd_gradcheck)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--separability", type=float, default=1.0)
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("ablate", help="train/evaluate the 5-row ablation grid")
    p.add_argument("--config", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--report")
    p.set_defaults(fn=cmd_ablate)

    p = sub.add_parser("inspect", help="print schema and size accounting")
    p.add_argument("--model", required=True)
    p.set_defaults(fn=cmd_inspect)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (SelinetError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
