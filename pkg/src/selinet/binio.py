"""Low-level binary IO shared by the model/feature/quantized file formats.

All formats are little-endian, open with a 4-byte magic, and close with
a CRC32 (zlib polynomial) of every preceding byte.  Strings are u16
length-prefixed UTF-8; tensors are name + rank u8 + dims u32[] + payload.
"""

import struct
import zlib

import numpy as np

from .errors import FormatError


class Writer:
    """Accumulates the file body in memory; finish() appends the CRC."""

    def __init__(self, magic):
        assert len(magic) == 4
        self._chunks = [magic]

    def raw(self, data: bytes):
        self._chunks.append(data)

    def u8(self, v):
        self.raw(struct.pack("<B", v))

    def u16(self, v):
        self.raw(struct.pack("<H", v))

    def u32(self, v):
        self.raw(struct.pack("<I", v))

    def i32(self, v):
        self.raw(struct.pack("<i", v))

    def f64(self, v):
        self.raw(struct.pack("<d", v))

    def string(self, s: str):
        data = s.encode("utf-8")
        self.u16(len(data))
        self.raw(data)

    def array(self, a: np.ndarray):
        """Payload only; dtype must already be the on-disk dtype."""
        self.raw(np.ascontiguousarray(a).astype(a.dtype.newbyteorder("<")).tobytes())

    def tensor(self, name: str, a: np.ndarray):
        self.string(name)
        self.u8(a.ndim)
        for d in a.shape:
            self.u32(d)
        self.array(a)

    def finish(self) -> bytes:
        body = b"".join(self._chunks)
        return body + struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF)

    def save(self, path):
        data = self.finish()
        with open(path, "wb") as fh:
            fh.write(data)
        return data


class Reader:
    """Cursor over a fully loaded file; validates magic and trailing CRC."""

    def __init__(self, data: bytes, magic: bytes, path="<bytes>"):
        self.path = path
        self.data = data
        self.pos = 0
        if len(data) < 8:
            raise FormatError(f"{path}: file truncated ({len(data)} bytes)", offset=0)
        body, crc = data[:-4], struct.unpack("<I", data[-4:])[0]
        if zlib.crc32(body) & 0xFFFFFFFF != crc:
            raise FormatError(f"{path}: CRC mismatch", offset=len(body))
        self.end = len(body)
        got = self.take(4)
        if got != magic:
            raise FormatError(
                f"{path}: bad magic {got!r}, expected {magic!r}", offset=0
            )

    @classmethod
    def open(cls, path, magic):
        with open(path, "rb") as fh:
            return cls(fh.read(), magic, path=str(path))

    def take(self, n) -> bytes:
        if self.pos + n > self.end:
            raise FormatError(
                f"{self.path}: truncated record (wanted {n} bytes)", offset=self.pos
            )
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self):
        return struct.unpack("<B", self.take(1))[0]

    def u16(self):
        return struct.unpack("<H", self.take(2))[0]

    def u32(self):
        return struct.unpack("<I", self.take(4))[0]

    def i32(self):
        return struct.unpack("<i", self.take(4))[0]

    def f64(self):
        return struct.unpack("<d", self.take(8))[0]

    def string(self) -> str:
        n = self.u16()
        try:
            return self.take(n).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"{self.path}: bad UTF-8 string", offset=self.pos) from exc

    def array(self, dtype, count) -> np.ndarray:
        dtype = np.dtype(dtype).newbyteorder("<")
        raw = self.take(count * dtype.itemsize)
        return np.frombuffer(raw, dtype=dtype).astype(dtype.newbyteorder("="))

    def dims(self) -> tuple:
        rank = self.u8()
        return tuple(self.u32() for _ in range(rank))

    def tensor(self, dtype=np.float32):
        name = self.string()
        shape = self.dims()
        n = 1
        for d in shape:
            n *= d
        return name, self.array(dtype, n).reshape(shape)

    def expect_done(self):
        if self.pos != self.end:
            raise FormatError(
                f"{self.path}: {self.end - self.pos} trailing bytes before CRC",
                offset=self.pos,
            )
