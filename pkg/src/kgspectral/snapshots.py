"""Binary snapshot files for solver states.

Layout (all little-endian):

    magic   4 bytes  b"KGS1"
    version u32      currently 1
    a, b    2 * f64  domain endpoints
    N       u64      grid size
    eps     f64
    tau     f64      step size of the producing run (0 if not applicable)
    t       f64      simulation time of the stored state
    scheme  16 bytes scheme tag, NUL-padded UTF-8
    crc32   u32      zlib.crc32 over the payload bytes
    payload 3 arrays, each u64 count then count f64 values:
            Phi (N), PhiDot (N), Psi interleaved re/im (2N)

Round trips are bit-exact; the checksum is verified before any state is
constructed, so a corrupted file never yields a partial state.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .grid import make_grid
from .stepper import FieldState

__all__ = ["SnapshotHeader", "save_snapshot", "load_snapshot", "read_snapshot_header"]

_MAGIC = b"KGS1"
_VERSION = 1
_HEADER = struct.Struct("<4sIddQddd16sI")


@dataclass(frozen=True)
class SnapshotHeader:
    version: int
    a: float
    b: float
    N: int
    eps: float
    tau: float
    t: float
    scheme: str


def _payload_bytes(state: FieldState) -> bytes:
    n = state.grid.N
    parts = []
    for arr, count in (
        (np.ascontiguousarray(state.Phi, dtype="<f8"), n),
        (np.ascontiguousarray(state.PhiDot, dtype="<f8"), n),
        (
            np.ascontiguousarray(
                np.column_stack([state.Psi.real, state.Psi.imag]).ravel(), dtype="<f8"
            ),
            2 * n,
        ),
    ):
        parts.append(struct.pack("<Q", count))
        parts.append(arr.tobytes())
    return b"".join(parts)


def save_snapshot(path, state: FieldState, *, tau: float = 0.0, scheme: str = "mti-fp") -> None:
    tag = scheme.encode("utf-8")
    if len(tag) > 16:
        raise ValueError(f"scheme tag {scheme!r} exceeds 16 bytes")
    payload = _payload_bytes(state)
    header = _HEADER.pack(
        _MAGIC,
        _VERSION,
        state.grid.a,
        state.grid.b,
        state.grid.N,
        state.eps,
        float(tau),
        state.t,
        tag.ljust(16, b"\0"),
        zlib.crc32(payload),
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def _parse_header(blob: bytes, path) -> tuple[SnapshotHeader, int]:
    if len(blob) < _HEADER.size:
        raise ValueError(f"{path}: truncated snapshot ({len(blob)} bytes)")
    magic, version, a, b, n, eps, tau, t, tag, crc = _HEADER.unpack_from(blob)
    if magic != _MAGIC:
        raise ValueError(f"{path}: not a snapshot file (bad magic {magic!r})")
    if version != _VERSION:
        raise ValueError(f"{path}: unknown snapshot version {version}")
    header = SnapshotHeader(
        version=version,
        a=a,
        b=b,
        N=int(n),
        eps=eps,
        tau=tau,
        t=t,
        scheme=tag.rstrip(b"\0").decode("utf-8"),
    )
    return header, crc


def read_snapshot_header(path) -> SnapshotHeader:
    with open(path, "rb") as fh:
        blob = fh.read(_HEADER.size)
    header, _ = _parse_header(blob, path)
    return header


def load_snapshot(path) -> FieldState:
    with open(path, "rb") as fh:
        blob = fh.read()
    header, crc = _parse_header(blob, path)
    payload = blob[_HEADER.size :]
    n = header.N
    expected = 3 * 8 + 8 * (n + n + 2 * n)
    if len(payload) != expected:
        raise ValueError(
            f"{path}: truncated snapshot payload ({len(payload)} of {expected} bytes)"
        )
    if zlib.crc32(payload) != crc:
        raise ValueError(f"{path}: payload checksum mismatch (corrupted file)")

    arrays = []
    offset = 0
    for count in (n, n, 2 * n):
        (stored,) = struct.unpack_from("<Q", payload, offset)
        if stored != count:
            raise ValueError(
                f"{path}: array length {stored} does not match header N={n}"
            )
        offset += 8
        arrays.append(np.frombuffer(payload, dtype="<f8", count=count, offset=offset))
        offset += 8 * count
    phi = arrays[0].astype(np.float64)
    phidot = arrays[1].astype(np.float64)
    inter = arrays[2]
    psi = inter[0::2] + 1j * inter[1::2]
    grid = make_grid(header.a, header.b, n)
    for arr in (phi, phidot, psi):
        arr.flags.writeable = False
    return FieldState(
        grid=grid, eps=header.eps, t=header.t, Phi=phi, PhiDot=phidot, Psi=psi
    )
