"""Binary snapshot files (``.nls3``).

Layout, little-endian throughout:

- magic ``b"NLS3"``, u32 version (``1``), u32 grid kind (``0`` box, ``1`` radial), u32 ``d``;
- u64 ``N`` per axis (``d`` entries for a box, one for a radial grid);
- f64 extent, f64 time, f64 ``kappa1``, ``kappa2``, ``kappa3``;
- the three fields one after another, complex samples stored as interleaved
  f64 ``(re, im)``, row-major with the last axis fastest.
"""
import logging
import struct
from pathlib import Path

import numpy as np

from src.constants import SNAPSHOT_MAGIC, SNAPSHOT_VERSION
from src.errors import GridError, SnapshotError
from src.FieldTriple import FieldTriple, SystemParams
from src.grid import PERIODIC_BOX, RADIAL, make_grid

logger = logging.getLogger(__name__)

_KIND_CODES = {PERIODIC_BOX: 0, RADIAL: 1}
_SAMPLE = np.dtype('<c16')


class Snapshot:
    def __init__(self, time, params, fields):
        self.time = float(time)
        self.params = params
        self.fields = fields

    @property
    def grid(self):
        return self.fields.grid

    def __repr__(self):
        return "Snapshot(time={0}, params={1!r}, grid={2!r})".format(self.time, self.params, self.grid)


def write_snapshot(snapshot, path):
    g = snapshot.grid
    p = snapshot.params
    counts = g.shape
    header = struct.pack('<4sIII', SNAPSHOT_MAGIC, SNAPSHOT_VERSION, _KIND_CODES[g.kind], g.dimension)
    header += struct.pack('<{0}Q'.format(len(counts)), *counts)
    header += struct.pack('<5d', g.extent, snapshot.time, p.kappa1, p.kappa2, p.kappa3)
    path = Path(path)
    with open(path, 'wb') as file:
        file.write(header)
        for u in snapshot.fields:
            file.write(np.ascontiguousarray(u, dtype=_SAMPLE).tobytes())
    logger.debug("snapshot t=%g written to %s", snapshot.time, path)


def _unpack(fmt, data, offset):
    size = struct.calcsize(fmt)
    if len(data) < offset + size:
        raise SnapshotError("truncated payload: header ends early")
    return struct.unpack_from(fmt, data, offset), offset + size


def read_snapshot(path):
    with open(path, 'rb') as file:
        data = file.read()
    if data[:len(SNAPSHOT_MAGIC)] != SNAPSHOT_MAGIC:
        raise SnapshotError("not a snapshot: {0}".format(path))
    (_, version, kind_code, d), offset = _unpack('<4sIII', data, 0)
    if version != SNAPSHOT_VERSION:
        raise SnapshotError("unsupported version {0}".format(version))
    kinds = {code: kind for kind, code in _KIND_CODES.items()}
    if kind_code not in kinds:
        raise SnapshotError("unknown grid kind code {0}".format(kind_code))
    kind = kinds[kind_code]
    n_axes = d if kind == PERIODIC_BOX else 1
    counts, offset = _unpack('<{0}Q'.format(n_axes), data, offset)
    (extent, time, k1, k2, k3), offset = _unpack('<5d', data, offset)
    if len(set(counts)) != 1:
        raise SnapshotError("dimension mismatch: unequal axis counts {0}".format(counts))
    try:
        grid = make_grid(kind, d, extent, counts[0])
    except GridError as exc:
        raise SnapshotError("dimension mismatch: {0}".format(exc)) from exc
    n_bytes = grid.size * _SAMPLE.itemsize
    if len(data) - offset < 3 * n_bytes:
        raise SnapshotError("truncated payload: expected {0} bytes, found {1}".format(
            3 * n_bytes, len(data) - offset))
    if len(data) - offset > 3 * n_bytes:
        raise SnapshotError("dimension mismatch: {0} trailing bytes".format(len(data) - offset - 3 * n_bytes))
    fields = []
    for i in range(3):
        chunk = data[offset + i * n_bytes:offset + (i + 1) * n_bytes]
        fields.append(np.frombuffer(chunk, dtype=_SAMPLE).reshape(grid.shape))
    return Snapshot(time, SystemParams(k1, k2, k3), FieldTriple(*fields, grid))
