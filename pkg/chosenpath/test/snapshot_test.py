import os
import shutil
import struct
import tempfile
import unittest

from chosenpath import SnapshotError
from chosenpath.core import SparseSet
from chosenpath.index import CPIndex
from chosenpath.snapshot import dump, encoded_size, from_bytes, load, to_bytes, MAGIC


class SnapshotTest(unittest.TestCase):

    def setUp(self):
        self.points = [SparseSet([1, 2, 3]), SparseSet([2, 3, 4, 5]), SparseSet([10, 20])]
        self.index = CPIndex.build(self.points, 0.5, 0.25, master_seed=17)
        self.data = to_bytes(self.index)
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_identical_after_reload(self):
        restored = from_bytes(self.data)
        self.assertEqual(restored, self.index)
        self.assertEqual(to_bytes(restored), self.data)
        q = SparseSet([2, 3, 4])
        self.assertEqual(restored.query(q), self.index.query(q))

    def test_file(self):
        path = os.path.join(self.tmpdir, "index.cpix")
        dump(self.index, path)
        self.assertEqual(os.path.getsize(path), len(self.data))
        self.assertEqual(load(path), self.index)

    def test_encoded_size(self):
        self.assertEqual(encoded_size(self.index), len(self.data))
        self.assertEqual(self.index.stats()["bytes"], len(self.data))

    def test_deterministic(self):
        again = CPIndex.build(self.points, 0.5, 0.25, master_seed=17)
        self.assertEqual(to_bytes(again), self.data)

    def test_header(self):
        self.assertEqual(self.data[:4], MAGIC)
        self.assertEqual(struct.unpack_from("<H", self.data, 4)[0], 1)

    def test_bad_magic(self):
        with self.assertRaises(SnapshotError):
            from_bytes(b"XXXX" + self.data[4:])

    def test_bad_version(self):
        with self.assertRaises(SnapshotError):
            from_bytes(self.data[:4] + struct.pack("<H", 2) + self.data[6:])

    def test_truncated(self):
        for cut in (3, 20, len(self.data) - 1):
            with self.assertRaises(SnapshotError):
                from_bytes(self.data[:cut])

    def test_trailing_bytes(self):
        with self.assertRaises(SnapshotError):
            from_bytes(self.data + b"\0")

    def test_bad_thresholds(self):
        header = struct.pack("<4sHddI", MAGIC, 1, 0.25, 0.5, self.index.R)
        with self.assertRaises(SnapshotError):
            from_bytes(header + self.data[len(header):])


if __name__ == '__main__':
    unittest.main()
