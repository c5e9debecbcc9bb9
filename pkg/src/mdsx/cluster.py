"""Directory-backed storage cluster simulation.

Layout::

    <root>/manifest.json
    <root>/node_00/shard.bin
    <root>/node_01/shard.bin
    ...

Each shard file is a fixed little-endian header followed by
``stripe_count * N`` symbols stored as 4-byte little-endian integers.
Bytes of the input file map to symbols one byte per symbol when ``q > 255``
and one nibble per symbol (high nibble first) when ``15 < q <= 255``.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .builder import AccessOptimalCode
from .code_model import decode_any_k, encode
from .errors import (BadHelperSet, CodeMismatch, NodeHealthy, NodeOutOfRange,
                     ShardFormatError, TooFewSurvivors)
from .repair import BandwidthReport, repair_from_downloads

log = logging.getLogger(__name__)

MAGIC = b"MDSA"
VERSION = 1
HEADER = struct.Struct("<4sBIHHHHHIQ")
SYMBOL_BYTES = 4
MANIFEST = "manifest.json"
STRIPE_CHUNK = 1 << 15


@dataclass(frozen=True)
class ShardHeader:
    q: int
    n: int
    k: int
    delta: int
    tau: int
    node_id: int
    stripe_count: int
    original_length: int

    def pack(self) -> bytes:
        return HEADER.pack(MAGIC, VERSION, self.q, self.n, self.k, self.delta, self.tau,
                           self.node_id, self.stripe_count, self.original_length)

    @classmethod
    def unpack(cls, raw: bytes) -> "ShardHeader":
        if len(raw) < HEADER.size:
            raise ShardFormatError(f"shard header truncated ({len(raw)} < {HEADER.size} bytes)")
        magic, version, *fields = HEADER.unpack(raw[:HEADER.size])
        if magic != MAGIC:
            raise ShardFormatError(f"bad magic {magic!r}")
        if version != VERSION:
            raise ShardFormatError(f"unsupported shard version {version}")
        return cls(*fields)


def _atomic_write(path: Path, chunks: Iterable[bytes]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            for chunk in chunks:
                fh.write(chunk)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def write_shard(path: Path, header: ShardHeader, body: np.ndarray) -> None:
    """Write ``body`` (``(stripe_count, N)`` symbols) atomically."""
    body = np.ascontiguousarray(body, dtype="<u4")
    if body.shape[0] != header.stripe_count:
        raise ShardFormatError("body stripe count disagrees with header")
    _atomic_write(path, [header.pack(), body.tobytes()])


def read_header(path: Path) -> ShardHeader:
    with open(path, "rb") as fh:
        return ShardHeader.unpack(fh.read(HEADER.size))


def open_body(path: Path, header: ShardHeader, N: int) -> np.ndarray:
    """Memory-map the body as a ``(stripe_count, N)`` read-only array."""
    expected = HEADER.size + header.stripe_count * N * SYMBOL_BYTES
    size = path.stat().st_size
    if size != expected:
        raise ShardFormatError(f"{path}: {size} bytes, expected {expected}")
    if header.stripe_count == 0:
        return np.zeros((0, N), dtype="<u4")
    return np.memmap(path, dtype="<u4", mode="r", offset=HEADER.size,
                     shape=(header.stripe_count, N))


def packing_for(q: int) -> str:
    if q > 255:
        return "byte"
    if q > 15:
        return "nibble"
    raise CodeMismatch(f"q={q} is too small to hold a nibble per symbol")


def bytes_to_symbols(data: bytes, packing: str) -> np.ndarray:
    raw = np.frombuffer(data, dtype=np.uint8)
    if packing == "byte":
        return raw.astype(np.int64)
    out = np.empty(raw.size * 2, dtype=np.int64)
    out[0::2] = raw >> 4
    out[1::2] = raw & 0x0F
    return out


def symbols_to_bytes(symbols: np.ndarray, packing: str) -> bytes:
    symbols = np.asarray(symbols)
    if packing == "byte":
        return symbols.astype(np.uint8).tobytes()
    pairs = symbols.reshape(-1, 2)
    return ((pairs[:, 0] << 4) | pairs[:, 1]).astype(np.uint8).tobytes()


@dataclass(frozen=True)
class RepairSummary:
    stripes: int
    per_stripe: BandwidthReport
    symbols_downloaded: int
    symbols_accessed: int

    @property
    def bytes_downloaded(self) -> int:
        return self.symbols_downloaded * SYMBOL_BYTES

    @property
    def bound_symbols(self) -> int:
        return self.stripes * self.per_stripe.bound


class Cluster:
    """A simulated cluster rooted at a directory."""

    def __init__(self, root: Path, built: AccessOptimalCode, manifest: dict):
        self.root = Path(root)
        self.built = built
        self.manifest = manifest

    @property
    def packing(self) -> str:
        return self.manifest["packing"]

    @property
    def stripe_count(self) -> int:
        return int(self.manifest["stripe_count"])

    @property
    def original_length(self) -> int:
        return int(self.manifest["original_length"])

    def shard_path(self, node: int) -> Path:
        return self.root / f"node_{node:02d}" / "shard.bin"

    def header_for(self, node: int) -> ShardHeader:
        b = self.built
        return ShardHeader(b.code.q, b.n, b.k, b.delta, b.tau, node,
                           self.stripe_count, self.original_length)

    def present(self) -> list[int]:
        return [i for i in range(self.built.n) if self.shard_path(i).exists()]

    def _check_node(self, node: int) -> None:
        if not 0 <= node < self.built.n:
            raise NodeOutOfRange(f"node {node} outside [0, {self.built.n})")

    def load_body(self, node: int) -> np.ndarray:
        path = self.shard_path(node)
        header = read_header(path)
        if header != self.header_for(node):
            raise CodeMismatch(f"{path}: header {header} disagrees with manifest")
        return open_body(path, header, self.built.N)

    @classmethod
    def open(cls, root: Path) -> "Cluster":
        root = Path(root)
        try:
            manifest = json.loads((root / MANIFEST).read_text())
        except FileNotFoundError:
            raise CodeMismatch(f"{root} has no {MANIFEST}") from None
        built = AccessOptimalCode.from_json(manifest["code"])
        if manifest.get("packing") != packing_for(built.code.q):
            raise CodeMismatch("manifest packing disagrees with the code's field size")
        return cls(root, built, manifest)

    @classmethod
    def ingest(cls, built: AccessOptimalCode, input_file: Path, root: Path) -> "Cluster":
        code = built.code
        packing = packing_for(code.q)
        data = Path(input_file).read_bytes()
        symbols = bytes_to_symbols(data, packing)
        stripe = code.k * code.N
        stripes = -(-symbols.size // stripe)
        padded = np.zeros(stripes * stripe, dtype=np.int64)
        padded[:symbols.size] = symbols
        # (stripe, k, N) -> message columns of shape (k*N, S)
        msg = padded.reshape(stripes, stripe).T
        bodies = np.empty((code.n, stripes, code.N), dtype="<u4")
        for lo in range(0, stripes, STRIPE_CHUNK):
            hi = min(stripes, lo + STRIPE_CHUNK)
            cw = encode(code, msg[:, lo:hi])  # (n, N, s)
            bodies[:, lo:hi] = cw.transpose(0, 2, 1)
        root = Path(root)
        root.mkdir(parents=True, exist_ok=True)
        manifest = {
            "code": built.to_json(),
            "file_name": Path(input_file).name,
            "checksum": hashlib.sha256(data).hexdigest(),
            "packing": packing,
            "original_length": len(data),
            "stripe_count": stripes,
        }
        cluster = cls(root, built, manifest)
        for node in range(code.n):
            write_shard(cluster.shard_path(node), cluster.header_for(node), bodies[node])
        _atomic_write(root / MANIFEST, [json.dumps(manifest).encode()])
        log.info("ingested %d bytes into %d stripes", len(data), stripes)
        return cluster

    def kill(self, node: int) -> None:
        self._check_node(node)
        path = self.shard_path(node)
        if not path.exists():
            raise NodeOutOfRange(f"node {node} is already down")
        path.unlink()

    def repair(self, node: int, helpers: Sequence[int] | None = None,
               force: bool = False) -> RepairSummary:
        self._check_node(node)
        built = self.built
        d = built.k + built.delta - 1
        present = self.present()
        if node in present and not force:
            raise NodeHealthy(f"node {node} has a shard; pass force to rebuild it")
        survivors = [j for j in present if j != node]
        if helpers is None:
            if len(survivors) < d:
                raise TooFewSurvivors(f"{len(survivors)} survivors, repair needs d={d}")
            helpers = survivors[:d]
        helpers = sorted(set(int(h) for h in helpers))
        if len(helpers) < d:
            raise TooFewSurvivors(f"{len(helpers)} helpers given, repair needs d={d}")
        missing = [h for h in helpers if h not in survivors]
        if missing:
            raise BadHelperSet(f"helpers {missing} have no shard")
        if len(helpers) > d:
            raise BadHelperSet(f"{len(helpers)} helpers given, repair uses exactly d={d}")
        plan = built.plans[node]
        idx = np.asarray(plan.accessed)
        downloads = {}
        accessed = 0
        for h in helpers:
            part = np.asarray(self.load_body(h)[:, idx], dtype=np.int64)  # (S, |T|)
            accessed += part.size
            downloads[h] = part.T
        if self.stripe_count:
            shard, report = repair_from_downloads(built.code, plan, built.delta, node, downloads)
            body = shard.T
        else:
            # nothing to solve; still produce the per-stripe accounting
            _, report = repair_from_downloads(
                built.code, plan, built.delta, node,
                {h: np.zeros(len(idx), dtype=np.int64) for h in helpers})
            body = np.zeros((0, built.N))
        write_shard(self.shard_path(node), self.header_for(node), body)
        downloaded = sum(v.size for v in downloads.values())
        return RepairSummary(self.stripe_count, report, downloaded, accessed)

    def reassemble(self, out: Path) -> None:
        built = self.built
        code = built.code
        present = self.present()
        if len(present) < code.k:
            raise TooFewSurvivors(f"{len(present)} shards present, need k={code.k}")
        use = present[:code.k]
        shards = {i: np.asarray(self.load_body(i), dtype=np.int64).T for i in use}
        if use != list(range(code.k)) and self.stripe_count:
            full = decode_any_k(code, shards)
            data_shards = full[:code.k]
        else:
            data_shards = np.stack([shards[i] for i in range(code.k)]) if self.stripe_count \
                else np.zeros((code.k, code.N, 0), dtype=np.int64)
        # (k, N, S) -> stripe-major symbol stream
        stream = data_shards.transpose(2, 0, 1).reshape(-1)
        per_byte = 1 if self.packing == "byte" else 2
        data = symbols_to_bytes(stream[:self.original_length * per_byte], self.packing)
        if hashlib.sha256(data).hexdigest() != self.manifest["checksum"]:
            raise CodeMismatch("reassembled data fails the manifest checksum")
        _atomic_write(Path(out), [data])

