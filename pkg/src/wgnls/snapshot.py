"""Binary snapshot files.

Layout (little-endian): 6-byte magic ``WGNLS1``, int64 version, int64 n1,
int64 n2, then float64 length1, eps, lambda, time, then n1*n2 complex values
as interleaved float64 (re, im), row-major with x1 the slow index. A 1D field
is stored with n2 = 0 and n1 values.
"""

from dataclasses import dataclass
import os
import struct
import tempfile

import numpy as np

from .errors import ValidationError

MAGIC = b"WGNLS1"
VERSION = 1
HEADER = struct.Struct("<6sqqqdddd")


@dataclass
class Snapshot:
    field: np.ndarray
    length1: float
    eps: float
    lam: float
    time: float

    @property
    def n1(self):
        return self.field.shape[0]

    @property
    def n2(self):
        return 0 if self.field.ndim == 1 else self.field.shape[1]


def encode(snap):
    field = np.ascontiguousarray(snap.field, dtype="<c16")
    if field.ndim not in (1, 2):
        raise ValidationError("snapshots hold 1D or 2D fields")
    head = HEADER.pack(MAGIC, VERSION, snap.n1, snap.n2, snap.length1, snap.eps, snap.lam, snap.time)
    return head + field.tobytes()


def decode(data):
    if len(data) < HEADER.size:
        raise ValidationError("snapshot too short for its header")
    magic, version, n1, n2, length1, eps, lam, time = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValidationError(f"bad snapshot magic {magic!r}")
    if version != VERSION:
        raise ValidationError(f"unsupported snapshot version {version}")
    count = n1 * max(n2, 1)
    body = data[HEADER.size:]
    if n1 <= 0 or n2 < 0 or len(body) != 16 * count:
        raise ValidationError("snapshot payload does not match its header")
    field = np.frombuffer(body, dtype="<c16").astype(complex)
    if n2:
        field = field.reshape(n1, n2)
    return Snapshot(field, length1, eps, lam, time)


def _atomic_write(path, payload, mode="wb"):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_snapshot(path, snap):
    _atomic_write(path, encode(snap))


def read_snapshot(path):
    with open(path, "rb") as fh:
        return decode(fh.read())


def write_text(path, text):
    _atomic_write(path, text, mode="w")
