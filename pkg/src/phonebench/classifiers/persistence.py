"""``PBML`` model files.

Layout (little-endian)::

    b"PBML" | version u16 | header length u32 | JSON header | array blobs

The JSON header holds the kind tag, constructor parameters, class labels,
kind-specific metadata and, for each array, its name, dtype, shape and
byte offset into the blob section.
"""

import json
import struct
from pathlib import Path

import numpy as np

from ..exceptions import FormatError
from .registry import ModelSpec, make_classifier

MAGIC = b"PBML"
VERSION = 1


def _jsonable(value):
    if isinstance(value, tuple):
        return list(value)
    if isinstance(value, np.generic):
        return value.item()
    return value


def save_model(path, model):
    meta, arrays = model._get_state()
    header = {
        "kind": model.kind,
        "params": {k: _jsonable(v) for k, v in model.get_params().items()},
        "classes": [str(c) for c in model.classes_],
        "n_features": int(model.n_features_in_),
        "meta": meta,
        "arrays": [],
    }
    blobs, offset = [], 0
    for name in sorted(arrays):
        arr = np.asarray(arrays[name])
        dtype = "<i8" if arr.dtype.kind in "iu" else "<f8"
        raw = np.ascontiguousarray(arr, dtype=dtype).tobytes()
        header["arrays"].append({"name": name, "dtype": dtype,
                                 "shape": list(arr.shape), "offset": offset})
        blobs.append(raw)
        offset += len(raw)
    head = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC + struct.pack("<HI", VERSION, len(head)))
        fh.write(head)
        for raw in blobs:
            fh.write(raw)


def load_model(path):
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise FormatError(f"bad magic {data[:4]!r}", path=path)
    version, size = struct.unpack_from("<HI", data, 4)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", path=path)
    try:
        header = json.loads(data[10:10 + size].decode("utf-8"))
    except ValueError:
        raise FormatError("corrupt header", path=path) from None
    base = 10 + size
    arrays = {}
    for entry in header["arrays"]:
        count = int(np.prod(entry["shape"], dtype=np.int64))
        arr = np.frombuffer(data, dtype=entry["dtype"], count=count,
                            offset=base + entry["offset"])
        arrays[entry["name"]] = arr.reshape(entry["shape"]).astype(
            np.int64 if entry["dtype"] == "<i8" else np.float64)
    params = header["params"]
    if "hidden" in params:
        params["hidden"] = tuple(params["hidden"])
    model = make_classifier(ModelSpec(header["kind"], params))
    model.classes_ = np.array(header["classes"], dtype=object)
    model.n_features_in_ = header["n_features"]
    model._set_state(header["meta"], arrays)
    return model
