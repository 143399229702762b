"""FeatureMatrix persistence as CSV or the ``PBFT`` binary format.

Binary layout (little-endian)::

    b"PBFT" | version u16 | d u32 | N u64 | N*d float64 (row-major)
    | N x (u32 byte length, UTF-8 label)
"""

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..exceptions import FormatError, GeometryError, ParseError

MAGIC = b"PBFT"
VERSION = 1
_HEAD = struct.Struct("<4sHIQ")


@dataclass(eq=False)
class FeatureMatrix:
    X: np.ndarray
    labels: list
    representation: str | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        if self.X.ndim != 2:
            raise GeometryError(f"feature matrix must be 2-D, got {self.X.shape}")
        self.labels = [str(label) for label in self.labels]
        if len(self.labels) != self.X.shape[0]:
            raise GeometryError(
                f"{len(self.labels)} labels for {self.X.shape[0]} feature rows")

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]

    @property
    def y(self):
        return np.asarray(self.labels, dtype=object)

    def __eq__(self, other):
        return (isinstance(other, FeatureMatrix) and self.labels == other.labels
                and self.X.shape == other.X.shape
                and np.array_equal(self.X.view(np.uint64), other.X.view(np.uint64)))

    def save(self, path):
        path = Path(path)
        if path.suffix == ".csv":
            write_csv(path, self)
        elif path.suffix == ".pbft":
            write_pbft(path, self)
        else:
            raise FormatError(f"unknown feature file extension {path.suffix!r} "
                              "(use .csv or .pbft)", path=path)

    @classmethod
    def load(cls, path):
        path = Path(path)
        if path.suffix == ".csv":
            return read_csv(path)
        if path.suffix == ".pbft":
            return read_pbft(path)
        raise FormatError(f"unknown feature file extension {path.suffix!r}", path=path)


def write_csv(path, fm):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label"] + [f"f{i}" for i in range(fm.d)])
        for label, row in zip(fm.labels, fm.X):
            writer.writerow([label] + [repr(float(v)) for v in row])


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty feature file", path=path) from None
        if not header or header[0] != "label" or header[1:] != [
                f"f{i}" for i in range(len(header) - 1)]:
            raise ParseError("expected header 'label,f0,...'", line=1, path=path)
        d = len(header) - 1
        labels, rows = [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != d + 1:
                raise ParseError(f"expected {d + 1} fields, got {len(row)}",
                                 line=lineno, path=path)
            try:
                rows.append([float(v) for v in row[1:]])
            except ValueError:
                raise ParseError("non-numeric feature value", line=lineno,
                                 path=path) from None
            labels.append(row[0])
    return FeatureMatrix(np.array(rows, dtype=np.float64).reshape(len(rows), d), labels)


def write_pbft(path, fm):
    with open(path, "wb") as fh:
        fh.write(_HEAD.pack(MAGIC, VERSION, fm.d, fm.n))
        fh.write(np.ascontiguousarray(fm.X, dtype="<f8").tobytes())
        for label in fm.labels:
            raw = label.encode("utf-8")
            fh.write(struct.pack("<I", len(raw)))
            fh.write(raw)


def read_pbft(path):
    data = Path(path).read_bytes()
    if len(data) < _HEAD.size:
        raise FormatError("truncated header", path=path)
    magic, version, d, n = _HEAD.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}", path=path)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", path=path)
    pos = _HEAD.size
    nbytes = 8 * n * d
    if len(data) < pos + nbytes:
        raise FormatError("truncated feature block", path=path)
    X = np.frombuffer(data, dtype="<f8", count=n * d, offset=pos).reshape(n, d)
    pos += nbytes
    labels = []
    for _ in range(n):
        if len(data) < pos + 4:
            raise FormatError("truncated label table", path=path)
        (size,) = struct.unpack_from("<I", data, pos)
        pos += 4
        labels.append(data[pos:pos + size].decode("utf-8"))
        pos += size
    if pos != len(data):
        raise FormatError("trailing bytes after label table", path=path)
    return FeatureMatrix(X.astype(np.float64), labels)
