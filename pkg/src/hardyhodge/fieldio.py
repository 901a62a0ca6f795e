"""HHF1 binary field files with a JSON provenance sidecar.

Layout, little-endian::

    "HHF1" | u32 version=1 | u32 n | u32 kindCode | u32 componentCount
    | u64 shape[n] | f64 lengths[n]
    | componentCount * prod(shape) f64, component-major, last axis fastest

kindCode: 0 scalar, 1 paravector, 2 vector(n+1), 3 quaternion, 4 multivector.
"""

from __future__ import annotations

import json
import math
import struct
from pathlib import Path

import numpy as np

from .errors import GridError, MalformedHeader, ShapeOverflow, TruncatedPayload
from .grid import GridSpec, SampledField, component_count

MAGIC = b"HHF1"
VERSION = 1
KIND_CODES = {"scalar": 0, "paravector": 1, "vector": 2, "quaternion": 3, "multivector": 4}
CODE_KINDS = {v: k for k, v in KIND_CODES.items()}
MAX_VALUES = 1 << 36

_HEAD = struct.Struct("<4sIIII")


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def encode_field(f: SampledField) -> bytes:
    n = f.spec.n
    head = _HEAD.pack(MAGIC, VERSION, n, KIND_CODES[f.kind], len(f))
    dims = struct.pack(f"<{n}Q", *f.spec.shape) + struct.pack(f"<{n}d", *f.spec.lengths)
    payload = np.ascontiguousarray(f.components, dtype="<f8").tobytes()
    return head + dims + payload


def decode_field(buf: bytes) -> SampledField:
    if len(buf) < _HEAD.size:
        raise MalformedHeader(f"file too short for header ({len(buf)} bytes)")
    magic, version, n, code, ncomp = _HEAD.unpack_from(buf, 0)
    if magic != MAGIC:
        raise MalformedHeader(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise MalformedHeader(f"unsupported version {version}")
    if not 1 <= n <= 10:
        raise MalformedHeader(f"dimension n={n} out of range")
    if code not in CODE_KINDS:
        raise MalformedHeader(f"unknown kind code {code}")
    kind = CODE_KINDS[code]
    if ncomp != component_count(kind, n):
        raise MalformedHeader(f"{kind} in dimension {n} cannot have {ncomp} components")
    off = _HEAD.size
    if len(buf) < off + 16 * n:
        raise MalformedHeader("header truncated before shape/lengths")
    shape = struct.unpack_from(f"<{n}Q", buf, off)
    lengths = struct.unpack_from(f"<{n}d", buf, off + 8 * n)
    off += 16 * n
    count = ncomp
    for s in shape:
        count *= s
        if count > MAX_VALUES:
            raise ShapeOverflow(f"declared shape {shape} x {ncomp} exceeds {MAX_VALUES} values")
    if count == 0:
        raise ShapeOverflow(f"declared shape {shape} is empty")
    if len(buf) - off != 8 * count:
        raise TruncatedPayload(f"payload has {len(buf) - off} bytes, header implies {8 * count}")
    try:
        spec = GridSpec(tuple(shape), tuple(lengths))
    except GridError as exc:
        raise MalformedHeader(str(exc)) from exc
    data = np.frombuffer(buf, dtype="<f8", count=count, offset=off)
    return SampledField(spec, kind, data.reshape((ncomp,) + spec.shape).astype(float))


def write_field(f: SampledField, path, provenance: dict | None = None) -> None:
    path = Path(path)
    path.write_bytes(encode_field(f))
    if provenance is not None:
        sidecar_path(path).write_text(json.dumps(provenance, indent=2, sort_keys=True) + "\n")


def read_field(path) -> SampledField:
    return decode_field(Path(path).read_bytes())


def read_provenance(path) -> dict | None:
    side = sidecar_path(path)
    if not side.exists():
        return None
    return json.loads(side.read_text())


def payload_bytes(spec: GridSpec, kind: str) -> int:
    return 8 * component_count(kind, spec.n) * math.prod(spec.shape)
