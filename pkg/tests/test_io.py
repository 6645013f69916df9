import os
import struct

import numpy as np
import pytest

from wgnls.errors import ValidationError
from wgnls.snapshot import HEADER, MAGIC, Snapshot, decode, encode, read_snapshot, write_snapshot


def test_header_layout():
    snap = Snapshot(np.array([[1 + 2j, 3 - 4j]]), 6.5, 0.1, -1.0, 0.25)
    data = encode(snap)
    assert data[:6] == b"WGNLS1"
    magic, version, n1, n2 = struct.unpack_from("<6sqqq", data)
    assert (magic, version, n1, n2) == (MAGIC, 1, 1, 2)
    assert struct.unpack_from("<dddd", data, 30) == (6.5, 0.1, -1.0, 0.25)
    # interleaved re/im, little-endian float64
    assert struct.unpack_from("<4d", data, HEADER.size) == (1.0, 2.0, 3.0, -4.0)
    assert len(data) == HEADER.size + 32


def test_round_trip_2d_and_1d(tmp_path, rng):
    f2 = rng.standard_normal((16, 5)) + 1j * rng.standard_normal((16, 5))
    p = tmp_path / "a.wgs"
    write_snapshot(p, Snapshot(f2, 2 * np.pi, 0.05, 1.0, 0.5))
    s = read_snapshot(p)
    np.testing.assert_array_equal(s.field, f2)
    assert (s.n1, s.n2, s.eps, s.lam, s.time) == (16, 5, 0.05, 1.0, 0.5)
    f1 = f2[:, 0].copy()
    s1 = decode(encode(Snapshot(f1, 1.0, 0.1, 0.0, 0.0)))
    assert s1.n2 == 0 and s1.field.shape == (16,)
    np.testing.assert_array_equal(s1.field, f1)
    assert not [n for n in os.listdir(tmp_path) if n.startswith(".tmp")]


def test_corrupt_snapshots():
    good = encode(Snapshot(np.ones((2, 2), complex), 1.0, 0.1, 0.0, 0.0))
    with pytest.raises(ValidationError):
        decode(b"XXXXXX" + good[6:])
    with pytest.raises(ValidationError):
        decode(good[:-8])
    with pytest.raises(ValidationError):
        decode(good[:10])
