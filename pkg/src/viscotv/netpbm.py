"""Minimal PGM/PPM (netpbm) reader and writer.

Supports P2/P5 (grayscale) and P3/P6 (color) with maxval up to 65535;
binary samples above 255 are two bytes, big endian.  The writer emits the
canonical single-line header ``magic\\nwidth height\\nmaxval\\n`` so that a
binary file written by this module round-trips bit for bit.

Parse failures raise :class:`NetpbmError` carrying the byte offset at which
the problem was detected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["NetpbmError", "NetpbmImage", "read", "write"]

_MAGICS = {b"P2": 1, b"P3": 3, b"P5": 1, b"P6": 3}
_BINARY = {b"P5", b"P6"}
_WHITESPACE = b" \t\r\n\x0b\x0c"


class NetpbmError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


@dataclass
class NetpbmImage:
    magic: str  # "P2", "P3", "P5" or "P6"
    maxval: int
    samples: np.ndarray  # (height, width, channels), integer dtype

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def channels(self) -> int:
        return self.samples.shape[2]


class _Cursor:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def skip_space_and_comments(self):
        data = self.data
        while self.pos < len(data):
            c = data[self.pos : self.pos + 1]
            if c in (b"#",):
                nl = data.find(b"\n", self.pos)
                self.pos = len(data) if nl < 0 else nl + 1
            elif c and c in _WHITESPACE:
                self.pos += 1
            else:
                return

    def next_token(self, what: str) -> bytes:
        self.skip_space_and_comments()
        if self.pos >= len(self.data):
            raise NetpbmError(f"unexpected end of file while reading {what}", self.pos)
        start = self.pos
        while self.pos < len(self.data):
            c = self.data[self.pos : self.pos + 1]
            if c in _WHITESPACE or c == b"#":
                break
            self.pos += 1
        return self.data[start : self.pos]

    def next_int(self, what: str) -> int:
        start_before = self.pos
        token = self.next_token(what)
        try:
            return int(token)
        except ValueError:
            raise NetpbmError(
                f"expected an integer for {what}, got {token!r}", start_before
            ) from None


def read(path) -> NetpbmImage:
    with open(path, "rb") as handle:
        data = handle.read()
    cur = _Cursor(data)
    if len(data) < 2:
        raise NetpbmError("file too short for a netpbm magic number", 0)
    magic = data[0:2]
    if magic not in _MAGICS:
        raise NetpbmError(f"unsupported magic {magic!r}", 0)
    cur.pos = 2
    channels = _MAGICS[magic]

    width = cur.next_int("width")
    height = cur.next_int("height")
    maxval = cur.next_int("maxval")
    if width < 1 or height < 1:
        raise NetpbmError(f"invalid dimensions {width}x{height}", cur.pos)
    if not 0 < maxval <= 65535:
        raise NetpbmError(f"maxval {maxval} out of range (1..65535)", cur.pos)

    count = width * height * channels
    if magic in _BINARY:
        if cur.pos >= len(data):
            raise NetpbmError("missing whitespace after maxval", cur.pos)
        if data[cur.pos : cur.pos + 1] not in _WHITESPACE:
            raise NetpbmError("expected single whitespace after maxval", cur.pos)
        cur.pos += 1
        bytes_per = 2 if maxval > 255 else 1
        need = count * bytes_per
        payload = data[cur.pos : cur.pos + need]
        if len(payload) < need:
            raise NetpbmError(
                f"truncated payload: expected {need} bytes, found {len(payload)}",
                cur.pos + len(payload),
            )
        dtype = ">u2" if bytes_per == 2 else "u1"
        flat = np.frombuffer(payload, dtype=dtype).astype(np.uint16)
    else:
        flat = np.empty(count, dtype=np.uint16)
        for i in range(count):
            at = cur.pos
            value = cur.next_int("sample")
            if value < 0:
                raise NetpbmError(f"negative sample {value}", at)
            flat[i] = value
    if int(flat.max(initial=0)) > maxval:
        raise NetpbmError(f"sample exceeds maxval {maxval}", cur.pos)
    samples = flat.reshape(height, width, channels)
    return NetpbmImage(magic=magic.decode(), maxval=maxval, samples=samples)


def write(path, image: NetpbmImage) -> None:
    magic = image.magic.encode()
    if magic not in _MAGICS:
        raise ValueError(f"unsupported magic {image.magic!r}")
    samples = np.asarray(image.samples)
    if samples.ndim != 3 or samples.shape[2] != _MAGICS[magic]:
        raise ValueError(
            f"{image.magic} expects {_MAGICS[magic]} channel(s), got shape {samples.shape}"
        )
    if samples.min(initial=0) < 0 or samples.max(initial=0) > image.maxval:
        raise ValueError("samples out of range for maxval")
    header = b"%s\n%d %d\n%d\n" % (magic, samples.shape[1], samples.shape[0], image.maxval)
    with open(path, "wb") as handle:
        handle.write(header)
        if magic in _BINARY:
            dtype = ">u2" if image.maxval > 255 else "u1"
            handle.write(samples.astype(dtype).tobytes())
        else:
            lines = []
            for row in samples.reshape(samples.shape[0], -1):
                lines.append(" ".join(str(int(v)) for v in row))
            handle.write(("\n".join(lines) + "\n").encode())
