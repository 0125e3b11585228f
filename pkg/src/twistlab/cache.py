"""Binary cache files for coefficient and trace tables.

Layout (all integers little-endian):

    b"TWL1"                      magic, the final byte is the format version
    kind        1 byte           1 integer table, 2 complex table, 3 float table
    count       8 bytes          number of records
    records                      kind 1: sign byte (0 or 1), 4-byte length L, L magnitude bytes
                                 kind 2: real, imag as IEEE-754 binary64
                                 kind 3: one IEEE-754 binary64
    checksum    8 bytes          64-bit FNV-1a of every preceding byte
"""

from __future__ import annotations

import os
import re
import struct
from dataclasses import dataclass
from pathlib import Path

import numba
import numpy as np

from .errors import BadMagic, CacheMiss, ChecksumMismatch, VersionUnsupported
from .hecke import GL2CoefficientTable, eigenform_coefficients
from .trace import TraceFunction, hyper_kloosterman

MAGIC = b"TWL1"
KIND_INT, KIND_COMPLEX, KIND_FLOAT = 1, 2, 3
FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_HEADER = struct.Struct("<4sBQ")


@numba.njit(cache=True)
def _fnv1a(buf, h):
    for b in buf:
        h ^= np.uint64(b)
        h *= np.uint64(FNV_PRIME)
    return h


def fnv1a64(data: bytes) -> int:
    return int(_fnv1a(np.frombuffer(data, dtype=np.uint8), np.uint64(FNV_OFFSET)))


def _encode_ints(values) -> bytes:
    parts = []
    for v in values:
        v = int(v)
        mag = abs(v)
        body = mag.to_bytes((mag.bit_length() + 7) // 8, "little")
        parts.append(struct.pack("<BI", 1 if v < 0 else 0, len(body)))
        parts.append(body)
    return b"".join(parts)


def _decode_ints(payload: memoryview, count: int) -> list[int]:
    out = []
    pos = 0
    for _ in range(count):
        if pos + 5 > len(payload):
            raise ChecksumMismatch("record payload ends before the record count is reached")
        sign, length = struct.unpack_from("<BI", payload, pos)
        pos += 5
        if pos + length > len(payload):
            raise ChecksumMismatch("record runs past the end of the payload")
        mag = int.from_bytes(payload[pos : pos + length], "little")
        pos += length
        out.append(-mag if sign else mag)
    if pos != len(payload):
        raise ChecksumMismatch("record payload length disagrees with the record count")
    return out


def encode(kind: int, values) -> bytes:
    if kind == KIND_INT:
        body = _encode_ints(values)
        count = len(values)
    elif kind == KIND_COMPLEX:
        arr = np.ascontiguousarray(values, dtype="<c16")
        body, count = arr.tobytes(), len(arr)
    elif kind == KIND_FLOAT:
        arr = np.ascontiguousarray(values, dtype="<f8")
        body, count = arr.tobytes(), len(arr)
    else:
        raise ValueError(f"unknown payload kind {kind}")
    head = _HEADER.pack(MAGIC, kind, count) + body
    return head + struct.pack("<Q", fnv1a64(head))


def decode(data: bytes) -> tuple[int, object]:
    """Return (kind, values); ints come back as a list, floats and complex as arrays."""
    if len(data) < 4 or data[:4] != MAGIC:
        if len(data) >= 4 and data[:3] == MAGIC[:3]:
            raise VersionUnsupported(f"cache format version {data[3:4]!r} is not supported")
        raise BadMagic("not a TWL1 cache file")
    if len(data) < _HEADER.size + 8:
        raise ChecksumMismatch("file too short to hold header and checksum")
    (stored,) = struct.unpack_from("<Q", data, len(data) - 8)
    if fnv1a64(data[:-8]) != stored:
        raise ChecksumMismatch("checksum does not match file contents")
    _, kind, count = _HEADER.unpack_from(data, 0)
    payload = memoryview(data)[_HEADER.size : len(data) - 8]
    if kind == KIND_INT:
        return kind, _decode_ints(payload, count)
    width = {KIND_COMPLEX: 16, KIND_FLOAT: 8}.get(kind)
    if width is None:
        raise BadMagic(f"unknown payload kind {kind}")
    if len(payload) != width * count:
        raise ChecksumMismatch("record payload length disagrees with the record count")
    dtype = "<c16" if kind == KIND_COMPLEX else "<f8"
    return kind, np.frombuffer(payload, dtype=dtype).copy()


def cache_store(path, kind: int, values) -> Path:
    """Write atomically: the file appears only once it is complete."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_bytes(encode(kind, values))
    os.replace(tmp, path)
    return path


def cache_load(path) -> tuple[int, object]:
    return decode(Path(path).read_bytes())


@dataclass(frozen=True)
class CacheInfo:
    path: Path
    kind: int
    count: int
    size: int


def cache_info(path) -> CacheInfo:
    path = Path(path)
    kind, values = cache_load(path)
    return CacheInfo(path, kind, len(values), path.stat().st_size)


# named tables

def gl2_filename(weight: int, N: int) -> str:
    return f"tau_N{N}.twl" if weight == 12 else f"eigen_k{weight}_N{N}.twl"


def kloosterman_filename(d: int, p: int) -> str:
    return f"kl{d}_p{p}.twl"


def _covering_file(cache_dir: Path, weight: int, N: int) -> Path | None:
    pattern = re.compile(re.escape(gl2_filename(weight, 0)).replace("N0", r"N(\d+)"))
    best = None
    for entry in cache_dir.glob("*.twl"):
        m = pattern.fullmatch(entry.name)
        if m and int(m.group(1)) >= N and (best is None or int(m.group(1)) < best[0]):
            best = (int(m.group(1)), entry)
    return None if best is None else best[1]


def load_or_build_gl2(weight: int, N: int, cache_dir=None, *, build: bool = True) -> GL2CoefficientTable:
    """Coefficients up to N, from the smallest cached table covering N if any.

    A freshly built table passes the exact Hecke checks before it is stored.
    """
    if cache_dir is None:
        return eigenform_coefficients(weight, N)
    cache_dir = Path(cache_dir)
    found = _covering_file(cache_dir, weight, N) if cache_dir.is_dir() else None
    if found is not None:
        _, ints = cache_load(found)
        return GL2CoefficientTable(weight, ints[: N + 1])
    if not build:
        raise CacheMiss(f"no cached weight-{weight} table covering N = {N} in {cache_dir}")
    table = eigenform_coefficients(weight, N)
    cache_store(cache_dir / gl2_filename(weight, N), KIND_INT, table.ints)
    return table


def load_or_build_kloosterman(d: int, p: int, cache_dir=None, *, build: bool = True) -> TraceFunction:
    if cache_dir is None:
        return hyper_kloosterman(d, p)
    path = Path(cache_dir) / kloosterman_filename(d, p)
    if path.exists():
        _, vals = cache_load(path)
        return TraceFunction(p, vals, f"Kl_{d} mod {p}", float(d))
    if not build:
        raise CacheMiss(f"no cached Kl_{d} table mod {p} in {cache_dir}")
    K = hyper_kloosterman(d, p)
    cache_store(path, KIND_COMPLEX, K.values)
    return K
