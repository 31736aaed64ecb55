"""Model serialization: the "SLNM" container.

Layout: magic "SLNM", u16 version, u16 ablation flag bits, schema block
(emotion names then sentiment names, u16-counted, each u16-length
UTF-8), u16 parameter record count, records (name, rank u8, dims u32[],
f32 payload), trailing CRC32.  Round-trips are bit-exact.
"""

import numpy as np

from .binio import Reader, Writer
from .errors import FormatError
from .model import (
    AttentionPoolParams,
    DenseParams,
    HeadParams,
    Topology,
    param_items,
)

MAGIC = b"SLNM"
VERSION = 1


def _write_schema(w: Writer, names):
    w.u16(len(names))
    for name in names:
        w.string(name)


def _read_schema(r: Reader):
    return [r.string() for _ in range(r.u16())]


def model_bytes(p: HeadParams) -> bytes:
    """Serialized form of a head; payloads are stored as f32."""
    w = Writer(MAGIC)
    w.u16(VERSION)
    w.u16(p.topology.flag_bits())
    _write_schema(w, p.emotions)
    _write_schema(w, p.sentiments)
    items = param_items(p)
    w.u16(len(items))
    for name, a in items:
        w.tensor(name, np.asarray(a, dtype=np.float32))
    return w.finish()


def save_model(p: HeadParams, path) -> None:
    data = model_bytes(p)
    with open(path, "wb") as fh:
        fh.write(data)


def _params_from_records(records, flags, emotions, sentiments, spatial, path):
    def need(name):
        if name not in records:
            raise FormatError(f"{path}: missing parameter record {name!r}")
        return records.pop(name)

    use_aes, use_attn, use_sen = bool(flags & 1), bool(flags & 2), bool(flags & 4)

    def attn(prefix):
        return AttentionPoolParams(w=need(f"{prefix}.w"), b=need(f"{prefix}.b"))

    def dense(prefix, activation="relu"):
        return DenseParams(
            W=need(f"{prefix}.W"), b=need(f"{prefix}.b"), activation=activation
        )

    body_dense = dense("body_dense")
    p = HeadParams(
        topology=None,  # filled below once all shapes are known
        emotions=emotions,
        sentiments=sentiments,
        body_dense=body_dense,
    )
    if use_attn:
        p.body_attn = attn("body_attn")
    if use_aes:
        if use_attn:
            p.aes_attn = attn("aes_attn")
        p.aes_dense = dense("aes_dense")
    p.fuse1 = dense("fuse1")
    p.fuse2 = dense("fuse2")
    p.emo_trunk = dense("emo_trunk")
    if use_sen:
        p.sen_trunk = dense("sen_trunk")
    p.emo_out = dense("emo_out", activation="linear")
    if use_sen:
        p.sen_out = dense("sen_out", activation="linear")
    if records:
        raise FormatError(f"{path}: unexpected parameter records {sorted(records)}")

    p.topology = Topology(
        use_aesthetics=use_aes,
        use_attention=use_attn,
        use_sentiment=use_sen,
        body_channels=body_dense.W.shape[1],
        aes_channels=p.aes_dense.W.shape[1] if use_aes else 1280,
        spatial=spatial,
        branch_units=body_dense.W.shape[0],
        fuse_units=(p.fuse1.W.shape[0], p.fuse2.W.shape[0]),
        trunk_units=p.emo_trunk.W.shape[0],
        n_emotions=p.emo_out.W.shape[0],
        n_sentiments=p.sen_out.W.shape[0] if use_sen else 3,
    )
    return p


def load_model(path, spatial=(7, 7)) -> HeadParams:
    """Load an "SLNM" file; shapes are rebuilt from the stored records."""
    r = Reader.open(path, MAGIC)
    version = r.u16()
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}", offset=4)
    flags = r.u16()
    emotions = _read_schema(r)
    sentiments = _read_schema(r)
    n_records = r.u16()
    records = {}
    for _ in range(n_records):
        name, a = r.tensor(np.float32)
        if name in records:
            raise FormatError(f"{path}: duplicate parameter record {name!r}")
        records[name] = a
    r.expect_done()
    p = _params_from_records(records, flags, emotions, sentiments, spatial, path)
    if len(emotions) != p.topology.n_emotions or len(sentiments) != p.topology.n_sentiments:
        raise FormatError(
            f"{path}: schema sizes {len(emotions)}/{len(sentiments)} disagree with "
            f"output layers {p.topology.n_emotions}/{p.topology.n_sentiments}"
        )
    return p
