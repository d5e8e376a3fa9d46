"""Self-describing binary field snapshots.

A text header declares grid extents, spacing, time, field layout, byte
order and float width; the payload is the raw row-major float64 bytes
of each field in declared order. Round trips are bit-exact, and the
reader refuses payloads whose length disagrees with the header.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np

MAGIC = "growcell-snapshot 1"


class SnapshotError(RuntimeError):
    pass


@dataclass
class SnapshotMeta:
    extents: tuple[int, ...]
    dx: float
    time: float
    fields: list[tuple[str, int]]   # (name, components)


def write_snapshot(path, fields: dict[str, np.ndarray], extents: tuple[int, ...],
                   dx: float, time: float) -> None:
    """Write named fields sharing one grid; leading axis = components."""
    if not fields:
        raise SnapshotError("nothing to write")
    extents = tuple(int(n) for n in extents)
    layout = []
    for name, arr in fields.items():
        if " " in name or ":" in name:
            raise SnapshotError(f"bad field name {name!r}")
        if arr.shape == extents:
            comp = 1
        elif arr.shape[1:] == extents:
            comp = arr.shape[0]
        else:
            raise SnapshotError(f"field {name!r} shape {arr.shape} does not match grid {extents}")
        layout.append((name, comp))
    header = [MAGIC,
              "grid = " + " ".join(str(n) for n in extents),
              f"dx_mm = {dx!r}",
              f"time_s = {time!r}",
              "fields = " + " ".join(f"{n}:{c}" for n, c in layout),
              "byte_order = little",
              "float_bytes = 8",
              "end"]
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        for name, arr in fields.items():
            data = np.ascontiguousarray(arr, dtype="<f8")
            fh.write(data.tobytes())


def read_snapshot(path) -> tuple[SnapshotMeta, dict[str, np.ndarray]]:
    with open(path, "rb") as fh:
        blob = fh.read()
    nl = 0
    lines = []
    pos = 0
    while True:
        end = blob.find(b"\n", pos)
        if end < 0:
            raise SnapshotError("truncated header")
        line = blob[pos:end].decode("ascii")
        pos = end + 1
        lines.append(line)
        if line == "end":
            break
        if len(lines) > 64:
            raise SnapshotError("header not terminated")
    if lines[0] != MAGIC:
        raise SnapshotError(f"not a snapshot file (header {lines[0]!r})")
    kv = {}
    for line in lines[1:-1]:
        key, _, value = line.partition("=")
        kv[key.strip()] = value.strip()
    if kv.get("byte_order") != "little" or kv.get("float_bytes") != "8":
        raise SnapshotError("unsupported payload encoding")
    extents = tuple(int(tok) for tok in kv["grid"].split())
    fields_decl = []
    for tok in kv["fields"].split():
        name, _, comp = tok.partition(":")
        fields_decl.append((name, int(comp)))
    meta = SnapshotMeta(extents, float(kv["dx_mm"]), float(kv["time_s"]), fields_decl)

    cells = int(np.prod(extents))
    expected = sum(comp * cells for _, comp in fields_decl) * 8
    payload = blob[pos:]
    if len(payload) != expected:
        raise SnapshotError(
            f"payload length {len(payload)} does not match header ({expected} bytes)")
    out = {}
    offset = 0
    for name, comp in fields_decl:
        count = comp * cells
        arr = np.frombuffer(payload, dtype="<f8", count=count, offset=offset).copy()
        offset += count * 8
        shape = (comp, *extents) if comp > 1 else extents
        out[name] = arr.reshape(shape)
    return meta, out
