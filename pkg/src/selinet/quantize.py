"""Post-training int8 affine quantization of the head.

Weight matrices are quantized per tensor (asymmetric, scale +
zero-point); biases and attention parameters stay float32.  Inference
is simulated quantization: weights are dequantized on the fly and the
regular forward path is reused, so the numeric effect of the int8 grid
is measured without integer kernels.
"""

from dataclasses import dataclass, field

import numpy as np

from .binio import Reader, Writer
from .errors import FormatError
from .model import HeadParams, param_count, param_items
from .modelio import (
    _params_from_records,
    _read_schema,
    _write_schema,
    model_bytes,
)

QUANT_MAGIC = b"SLNQ"
QUANT_VERSION = 1
_DTYPE_F32 = 0
_DTYPE_I8 = 1

QMIN, QMAX = -128, 127


@dataclass
class QuantizedTensor:
    data: np.ndarray  # int8, row-major
    scale: float
    zero_point: int
    dims: tuple


def quantize_tensor(x) -> QuantizedTensor:
    """Per-tensor affine map onto the int8 grid.

    scale = (max - min) / 255 (1.0 for a constant tensor), zero_point =
    round(-128 - min/scale) clamped to the int8 range.
    """
    x = np.asarray(x, dtype=np.float64)
    lo, hi = float(x.min()), float(x.max())
    scale = 1.0 if hi == lo else (hi - lo) / (QMAX - QMIN)
    zero_point = int(np.clip(np.round(QMIN - lo / scale), QMIN, QMAX))
    q = np.clip(np.round(x / scale + zero_point), QMIN, QMAX).astype(np.int8)
    return QuantizedTensor(data=q, scale=scale, zero_point=zero_point, dims=x.shape)


def dequantize_tensor(q: QuantizedTensor) -> np.ndarray:
    """(q - zero_point) * scale, as float32 (production precision)."""
    return (
        (q.data.astype(np.float64) - q.zero_point) * q.scale
    ).astype(np.float32).reshape(q.dims)


@dataclass
class QuantizedModel:
    topology: object
    emotions: list
    sentiments: list
    tensors: dict  # name -> QuantizedTensor (weights) or float32 ndarray
    _deq: HeadParams = field(default=None, repr=False)

    def dequantized_params(self) -> HeadParams:
        """Float32 HeadParams with weights reconstructed from the grid."""
        if self._deq is None:
            records = {
                name: dequantize_tensor(t) if isinstance(t, QuantizedTensor) else t.copy()
                for name, t in self.tensors.items()
            }
            self._deq = _params_from_records(
                records,
                self.topology.flag_bits(),
                self.emotions,
                self.sentiments,
                self.topology.spatial,
                "<quantized model>",
            )
        return self._deq


def quantize_model(p: HeadParams) -> QuantizedModel:
    """Quantize every weight matrix; keep biases and attention in f32."""
    tensors = {}
    for name, a in param_items(p):
        if name.endswith(".W"):
            tensors[name] = quantize_tensor(a)
        else:
            tensors[name] = np.asarray(a, dtype=np.float32).copy()
    return QuantizedModel(
        topology=p.topology,
        emotions=list(p.emotions),
        sentiments=list(p.sentiments),
        tensors=tensors,
    )


def quantized_forward(qm: QuantizedModel, body, aes):
    """Logits of the simulated-quantization head (see model.head_forward)."""
    from .model import head_forward

    return head_forward(body, aes, qm.dequantized_params())


def quantized_bytes(qm: QuantizedModel) -> bytes:
    w = Writer(QUANT_MAGIC)
    w.u16(QUANT_VERSION)
    w.u16(qm.topology.flag_bits())
    _write_schema(w, qm.emotions)
    _write_schema(w, qm.sentiments)
    w.u16(len(qm.tensors))
    for name, t in qm.tensors.items():
        w.string(name)
        if isinstance(t, QuantizedTensor):
            w.u8(_DTYPE_I8)
            w.u8(len(t.dims))
            for d in t.dims:
                w.u32(d)
            w.f64(t.scale)
            w.i32(t.zero_point)
            w.array(t.data)
        else:
            w.u8(_DTYPE_F32)
            w.u8(t.ndim)
            for d in t.shape:
                w.u32(d)
            w.array(np.asarray(t, dtype=np.float32))
    return w.finish()


def save_quantized(qm: QuantizedModel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(quantized_bytes(qm))


def load_quantized(path, spatial=(7, 7)) -> QuantizedModel:
    r = Reader.open(path, QUANT_MAGIC)
    version = r.u16()
    if version != QUANT_VERSION:
        raise FormatError(f"{path}: unsupported version {version}", offset=4)
    flags = r.u16()
    emotions = _read_schema(r)
    sentiments = _read_schema(r)
    count = r.u16()
    tensors = {}
    for _ in range(count):
        name = r.string()
        dtype = r.u8()
        dims = r.dims()
        n = 1
        for d in dims:
            n *= d
        if dtype == _DTYPE_I8:
            scale = r.f64()
            zero_point = r.i32()
            data = r.array(np.int8, n).reshape(dims)
            tensors[name] = QuantizedTensor(
                data=data, scale=scale, zero_point=zero_point, dims=dims
            )
        elif dtype == _DTYPE_F32:
            tensors[name] = r.array(np.float32, n).reshape(dims)
        else:
            raise FormatError(f"{path}: unknown dtype tag {dtype}", offset=r.pos)
    r.expect_done()
    # structural validation via the same reconstruction used for inference
    qm = QuantizedModel(
        topology=None, emotions=emotions, sentiments=sentiments, tensors=tensors
    )
    records = {
        name: dequantize_tensor(t) if isinstance(t, QuantizedTensor) else t
        for name, t in tensors.items()
    }
    p = _params_from_records(dict(records), flags, emotions, sentiments, spatial, str(path))
    qm.topology = p.topology
    return qm


def size_report(m) -> dict:
    """Exact payload/file byte accounting for a HeadParams or QuantizedModel."""
    if isinstance(m, QuantizedModel):
        payload = sum(
            t.data.size if isinstance(t, QuantizedTensor) else 4 * t.size
            for t in m.tensors.values()
        )
        file_bytes = len(quantized_bytes(m))
        n_params = sum(
            (np.prod(t.dims, dtype=int) if isinstance(t, QuantizedTensor) else t.size)
            for t in m.tensors.values()
        )
        weight_payload = sum(
            t.data.size for t in m.tensors.values() if isinstance(t, QuantizedTensor)
        )
    else:
        payload = 4 * param_count(m)
        file_bytes = len(model_bytes(m))
        n_params = param_count(m)
        weight_payload = sum(
            4 * a.size for name, a in param_items(m) if name.endswith(".W")
        )
    return {
        "param_count": int(n_params),
        "param_bytes": int(payload),
        "weight_payload_bytes": int(weight_payload),
        "file_bytes": int(file_bytes),
    }
