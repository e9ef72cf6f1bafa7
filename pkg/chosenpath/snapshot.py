"""
Binary index snapshots.

Layout, little-endian throughout:

    header      magic "CPIX", version u16, b1 f64, b2 f64, R u32
    points      n u32, then per point: size u32, elements u32 * size
    repetition  k u32, w u32, b1 f64, master seed u64, level seeds u64 * k,
                bucket count u32, then per bucket in fingerprint order:
                fingerprint u64, count u32, ids u32 * count

The header is followed by the points section and R repetition sections.
"""
import io
import struct

import humanize
import numpy as np

from chosenpath import fail, logger, SnapshotError
from chosenpath.core import SparseSet
from chosenpath.index import BucketTable, CPIndex
from chosenpath.paths import ChosenPathParams

MAGIC = b"CPIX"
VERSION = 1

_HEADER = struct.Struct("<4sHddI")
_U32 = struct.Struct("<I")
_REP_HEAD = struct.Struct("<IIdQ")
_BUCKET_HEAD = struct.Struct("<QI")


def encoded_size(index):
    """Return the number of bytes to_bytes(index) produces, without encoding"""
    size = _HEADER.size + _U32.size
    size += sum(_U32.size * (1 + len(x)) for x in index.points)
    for params, table in index.repetitions:
        size += _REP_HEAD.size + 8 * params.k + _U32.size
        size += _BUCKET_HEAD.size * len(table) + 4 * table.pairs
    return size


def to_bytes(index):
    """Encode a CPIndex

    Args:
        index (CPIndex): The index

    Returns:
        bytes: The snapshot
    """
    out = io.BytesIO()
    out.write(_HEADER.pack(MAGIC, VERSION, index.b1, index.b2, index.R))

    out.write(_U32.pack(index.n))
    for x in index.points:
        out.write(_U32.pack(len(x)))
        out.write(x.dims.astype("<u4").tobytes())

    for params, table in index.repetitions:
        out.write(_REP_HEAD.pack(params.k, params.w, params.b1, params.master_seed))
        out.write(np.asarray(params.level_seeds, dtype="<u8").tobytes())
        out.write(_U32.pack(len(table)))
        for fingerprint, ids in table.items():
            out.write(_BUCKET_HEAD.pack(fingerprint, ids.size))
            out.write(ids.astype("<u4").tobytes())
    return out.getvalue()


class _Reader(object):
    """Sequential reader over a snapshot buffer that raises SnapshotError when truncated"""

    def __init__(self, data):
        self.data = memoryview(data)
        self.pos = 0

    def unpack(self, fmt):
        if self.pos + fmt.size > len(self.data):
            fail(SnapshotError, "BAD_SNAPSHOT", "truncated at byte {}".format(self.pos))
        values = fmt.unpack_from(self.data, self.pos)
        self.pos += fmt.size
        return values

    def u32(self):
        return self.unpack(_U32)[0]

    def array(self, dtype, count):
        dtype = np.dtype(dtype)
        end = self.pos + dtype.itemsize * count
        if end > len(self.data):
            fail(SnapshotError, "BAD_SNAPSHOT", "truncated at byte {}".format(self.pos))
        arr = np.frombuffer(self.data[self.pos:end], dtype=dtype)
        self.pos = end
        return arr

    def at_end(self):
        return self.pos == len(self.data)


def _read_table(reader, n):
    count = reader.u32()
    keys = np.zeros(count, dtype=np.uint64)
    offsets = np.zeros(count + 1, dtype=np.int64)
    parts = list()
    for i in range(count):
        fingerprint, size = reader.unpack(_BUCKET_HEAD)
        if size == 0:
            fail(SnapshotError, "BAD_SNAPSHOT", "empty bucket")
        ids = reader.array("<u4", size)
        if np.any(ids >= n) or np.any(ids[1:] <= ids[:-1]):
            fail(SnapshotError, "BAD_SNAPSHOT", "invalid point ids in bucket {:#x}".format(fingerprint))
        keys[i] = fingerprint
        offsets[i + 1] = offsets[i] + size
        parts.append(ids)
    if count > 1 and np.any(keys[1:] <= keys[:-1]):
        fail(SnapshotError, "BAD_SNAPSHOT", "buckets out of order")
    ids = np.concatenate(parts).astype(np.uint32) if parts else np.zeros(0, dtype=np.uint32)
    return BucketTable(keys, offsets, ids)


def from_bytes(data):
    """Decode a snapshot produced by to_bytes

    Args:
        data (bytes): The snapshot

    Returns:
        CPIndex: The decoded index

    Raises:
        SnapshotError: If the data is truncated, has trailing bytes or does not describe a valid index
    """
    reader = _Reader(data)
    magic, version, b1, b2, repetitions = reader.unpack(_HEADER)
    if magic != MAGIC:
        fail(SnapshotError, "BAD_SNAPSHOT", "bad magic {!r}".format(magic))
    if version != VERSION:
        fail(SnapshotError, "BAD_SNAPSHOT", "unsupported version {}".format(version))
    if not 0 < b2 < b1 < 1:
        fail(SnapshotError, "BAD_SNAPSHOT", "thresholds b1={} b2={}".format(b1, b2))

    points = list()
    for _ in range(reader.u32()):
        dims = reader.array("<u4", reader.u32())
        if dims.size == 0 or np.any(dims[1:] <= dims[:-1]):
            fail(SnapshotError, "BAD_SNAPSHOT", "invalid point {}".format(len(points)))
        points.append(SparseSet(dims))

    reps = list()
    for _ in range(repetitions):
        k, w, rep_b1, master_seed = reader.unpack(_REP_HEAD)
        seeds = tuple(int(s) for s in reader.array("<u8", k))
        if k < 1 or w < 1 or rep_b1 != b1:
            fail(SnapshotError, "BAD_SNAPSHOT", "repetition {} parameters".format(len(reps)))
        params = ChosenPathParams(b1=rep_b1, k=k, w=w, master_seed=master_seed, b2=b2)
        if params.level_seeds != seeds:
            fail(SnapshotError, "BAD_SNAPSHOT", "repetition {} level seeds".format(len(reps)))
        reps.append((params, _read_table(reader, len(points))))

    if not reader.at_end():
        fail(SnapshotError, "BAD_SNAPSHOT", "{} trailing bytes".format(len(reader.data) - reader.pos))
    return CPIndex(points, b1, b2, reps)


def dump(index, path):
    """Write a snapshot of index to path"""
    data = to_bytes(index)
    with io.open(path, "wb") as f:
        f.write(data)
    logger.info("Wrote snapshot {} ({})".format(path, humanize.naturalsize(len(data), binary=True)))


def load(path):
    """Read a snapshot from path

    Raises:
        SnapshotError: If the file is not a valid snapshot
    """
    with io.open(path, "rb") as f:
        data = f.read()
    index = from_bytes(data)
    logger.info("Loaded {} from {}".format(index, path))
    return index
