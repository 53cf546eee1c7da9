"""Flat retrieval index over fused chunk vectors.

Each entry stores exactly d + 2 scalars (v_f, k, n) no matter how many
sub-segments were fused into it, and a search evaluates exactly one corrected
cosine per entry; ``scores_computed`` counts those evaluations so tests can
assert the per-entry cost. Upserts require exclusive access relative to
searches (single-writer, multi-reader); searches may run concurrently.

Persistence: a little-endian binary file

    magic 'CFIX' | u32 version | u32 d | u64 count
    per record: u32 id_len | id UTF-8 | d * f64 v_f | f64 k | u64 n

plus a JSON-lines debug export that also carries payloads (payloads are
in-memory metadata and are not part of the binary format).
"""

from __future__ import annotations

import json
import struct
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, InputError
from .fusion import FusedVector, _query_vector

MAGIC = b"CFIX"
VERSION = 1
_HEADER = struct.Struct("<4sIIQ")


@dataclass
class IndexEntry:
    chunk_id: str
    fused: FusedVector
    payload: dict | None = field(default=None)


class FusedIndex:
    """Exhaustive-scan index; exact, no approximation."""

    def __init__(self, dim: int | None = None):
        self._dim = dim
        self._ids: list[str] = []
        self._rows: dict[str, int] = {}
        self._vf: list[np.ndarray] = []
        self._k: list[float] = []
        self._n: list[int] = []
        self._payloads: list[dict | None] = []
        self._lock = threading.Lock()
        self.scores_computed = 0

    def __len__(self) -> int:
        return len(self._ids)

    @property
    def dim(self) -> int | None:
        return self._dim

    def upsert(self, entry: IndexEntry) -> None:
        fused = entry.fused
        with self._lock:
            if self._dim is None:
                self._dim = fused.dim
            elif fused.dim != self._dim:
                raise DimensionMismatchError(
                    f"entry {entry.chunk_id!r} has dimension {fused.dim}, index holds {self._dim}"
                )
            v_f = np.asarray(fused.v_f, dtype=np.float64)
            expected_k = float(np.linalg.norm(v_f)) / fused.n
            if abs(fused.k - expected_k) > 1e-9:
                raise InputError(
                    f"entry {entry.chunk_id!r}: k={fused.k} inconsistent with |v_f|/n={expected_k}"
                )
            if entry.chunk_id in self._rows:
                row = self._rows[entry.chunk_id]
                self._vf[row] = v_f
                self._k[row] = fused.k
                self._n[row] = fused.n
                self._payloads[row] = entry.payload
            else:
                self._rows[entry.chunk_id] = len(self._ids)
                self._ids.append(entry.chunk_id)
                self._vf.append(v_f)
                self._k.append(fused.k)
                self._n.append(fused.n)
                self._payloads.append(entry.payload)

    def get(self, chunk_id: str) -> IndexEntry | None:
        row = self._rows.get(chunk_id)
        if row is None:
            return None
        return IndexEntry(
            chunk_id=chunk_id,
            fused=FusedVector(v_f=self._vf[row], k=self._k[row], n=self._n[row]),
            payload=self._payloads[row],
        )

    def search(self, query: Sequence[float] | np.ndarray, top_k: int = 10) -> list[tuple[str, float]]:
        """Descending corrected-cosine scores, ties broken by chunk_id."""
        if top_k < 0:
            raise InputError(f"top_k must be non-negative, got {top_k}")
        if not self._ids:
            return []
        q = _query_vector(query, self._dim)
        q_hat = q / np.linalg.norm(q)
        matrix = np.stack(self._vf)
        ns = np.asarray(self._n, dtype=np.float64)
        # k * cos(v_f, q) == (v_f · q̂) / n; one dot product per entry.
        scores = (matrix @ q_hat) / ns
        self.scores_computed += len(self._ids)
        ranked = sorted(zip(self._ids, scores.tolist()), key=lambda item: (-item[1], item[0]))
        return ranked[:top_k]

    # -- persistence ------------------------------------------------------

    def save(self, path: str | Path) -> None:
        if self._dim is None:
            raise InputError("cannot save an index with no entries and no dimension")
        with self._lock, open(path, "wb") as fp:
            fp.write(_HEADER.pack(MAGIC, VERSION, self._dim, len(self._ids)))
            for row, chunk_id in enumerate(self._ids):
                raw_id = chunk_id.encode("utf-8")
                fp.write(struct.pack("<I", len(raw_id)))
                fp.write(raw_id)
                fp.write(self._vf[row].astype("<f8").tobytes())
                fp.write(struct.pack("<dQ", self._k[row], self._n[row]))

    @classmethod
    def load(cls, path: str | Path) -> "FusedIndex":
        data = Path(path).read_bytes()
        if len(data) < _HEADER.size:
            raise InputError(f"{path}: not an index file (truncated header)")
        magic, version, dim, count = _HEADER.unpack_from(data, 0)
        if magic != MAGIC:
            raise InputError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise InputError(f"{path}: unsupported version {version}")
        index = cls(dim=dim)
        offset = _HEADER.size
        for _ in range(count):
            (id_len,) = struct.unpack_from("<I", data, offset)
            offset += 4
            chunk_id = data[offset : offset + id_len].decode("utf-8")
            offset += id_len
            v_f = np.frombuffer(data, dtype="<f8", count=dim, offset=offset).astype(np.float64)
            offset += 8 * dim
            k, n = struct.unpack_from("<dQ", data, offset)
            offset += 16
            index.upsert(IndexEntry(chunk_id=chunk_id, fused=FusedVector(v_f=v_f, k=k, n=int(n))))
        return index

    def export_jsonl(self, path: str | Path) -> None:
        """Debug view: one JSON object per entry, payloads included."""
        with open(path, "w", encoding="utf-8") as fp:
            for row, chunk_id in enumerate(self._ids):
                fp.write(
                    json.dumps(
                        {
                            "chunk_id": chunk_id,
                            "v_f": self._vf[row].tolist(),
                            "k": self._k[row],
                            "n": self._n[row],
                            "payload": self._payloads[row],
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )


def record_size(dim: int, chunk_id: str) -> int:
    """On-disk bytes for one entry: id prefix + id + d+2 fixed-width scalars."""
    return 4 + len(chunk_id.encode("utf-8")) + 8 * dim + 8 + 8
