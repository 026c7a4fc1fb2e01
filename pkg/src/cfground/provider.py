"""Embedding acquisition backends behind one small contract.

Backends: a seeded synthetic generator (isotropic unit vectors, used by all
core tests), a fixture backend reading a binary cache file, and a remote
client speaking newline-delimited JSON to an encoder process (stdio or TCP).
A write-through caching wrapper snapshots any backend into a cache.

Vectors are stored and transmitted as 32-bit little-endian floats; geometry
is computed in 64-bit. Quantization happens only at cache and wire
boundaries, so cache round-trips are exact.
"""

from __future__ import annotations

import json
import os
import socket
import struct
import subprocess
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from .errors import (
    EmptyCache,
    IoError,
    MissingEmbeddingError,
    ProviderError,
    ValidationError,
)
from .geometry import Embedding
from .textnorm import hash64

CACHE_MAGIC = b"EMB1"
CACHE_VERSION = 1
_HEADER = struct.Struct("<4sHIQ")  # magic, version, dimension, entry count
_ENTRY_LEN = struct.Struct("<I")


@dataclass(frozen=True)
class EmbeddingRequest:
    texts: tuple[str, ...]
    request_id: int

    def __post_init__(self) -> None:
        if not self.texts or any(not t for t in self.texts):
            raise ValidationError("request must carry non-empty texts")


class EmbeddingProvider:
    """Base contract: fixed dimension, ordered batch embedding."""

    @property
    def dimension(self) -> int:
        raise NotImplementedError

    @property
    def identity(self) -> str:
        raise NotImplementedError

    def embed_batch(self, texts: Sequence[str]) -> list[Embedding]:
        raise NotImplementedError

    def close(self) -> None:
        pass

    def __enter__(self) -> "EmbeddingProvider":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class SyntheticProvider(EmbeddingProvider):
    """Deterministic unit vectors keyed by (seed, text).

    Each text seeds its own generator from a stable 64-bit hash, so results
    never depend on batching or call order. The default is isotropic; a
    nonzero ``concentration`` a mixes in a fixed mean direction so that the
    expected random-pair cosine is roughly a, mimicking the anisotropy of
    real sentence encoders.
    """

    def __init__(self, seed: int, dim: int = 64, concentration: float = 0.0):
        if dim < 1:
            raise ValidationError("dimension must be positive")
        if not 0.0 <= concentration < 1.0:
            raise ValidationError("concentration must be in [0, 1)")
        self._seed = int(seed)
        self._dim = int(dim)
        self._conc = float(concentration)
        if self._conc > 0.0:
            rng = np.random.Generator(
                np.random.PCG64(hash64(self._seed, "__anisotropy_mean__"))
            )
            mu = rng.standard_normal(self._dim)
            self._mean_dir = mu / np.linalg.norm(mu)
        else:
            self._mean_dir = None

    @property
    def dimension(self) -> int:
        return self._dim

    @property
    def identity(self) -> str:
        base = f"synthetic:{self._seed}:d{self._dim}"
        return base if self._conc == 0.0 else f"{base}:a{self._conc:g}"

    def embed_batch(self, texts: Sequence[str]) -> list[Embedding]:
        out = []
        for text in texts:
            rng = np.random.Generator(np.random.PCG64(hash64(self._seed, text)))
            vec = rng.standard_normal(self._dim)
            vec /= np.linalg.norm(vec)
            if self._mean_dir is not None:
                vec = np.sqrt(self._conc) * self._mean_dir + np.sqrt(1.0 - self._conc) * vec
                vec /= np.linalg.norm(vec)
            out.append(Embedding(vec))
        return out


@dataclass
class EmbeddingCache:
    """In-memory text -> vector map, mirrored by the binary cache format.

    Entries are held at float32 precision (the storage precision), so a
    write/reload cycle reproduces them exactly. Keys are expected to be
    normalization-canonical.
    """

    dimension: int
    entries: dict[str, np.ndarray] = field(default_factory=dict)
    path: Path | None = None

    def put(self, text: str, embedding: Embedding) -> np.ndarray:
        if embedding.dim != self.dimension:
            raise ValidationError(
                f"cache dimension {self.dimension}, vector has {embedding.dim}"
            )
        quantized = embedding.values.astype(np.float32)
        quantized.setflags(write=False)
        self.entries[text] = quantized
        return quantized

    def get(self, text: str) -> np.ndarray | None:
        return self.entries.get(text)

    def __len__(self) -> int:
        return len(self.entries)


def write_cache(cache: EmbeddingCache, path: str | Path) -> None:
    """Write a cache to disk; entries are sorted by key for stable bytes."""
    if not cache.entries:
        raise EmptyCache("refusing to write an empty cache")
    try:
        with open(path, "wb") as fh:
            fh.write(
                _HEADER.pack(CACHE_MAGIC, CACHE_VERSION, cache.dimension, len(cache.entries))
            )
            for text in sorted(cache.entries):
                raw = text.encode("utf-8")
                fh.write(_ENTRY_LEN.pack(len(raw)))
                fh.write(raw)
                fh.write(cache.entries[text].astype("<f4").tobytes())
    except OSError as exc:
        raise IoError(f"writing {path}: {exc}") from exc


def read_cache(path: str | Path) -> EmbeddingCache:
    try:
        with open(path, "rb") as fh:
            header = fh.read(_HEADER.size)
            if len(header) != _HEADER.size:
                raise IoError(f"{path}: truncated header")
            magic, version, dim, count = _HEADER.unpack(header)
            if magic != CACHE_MAGIC:
                raise IoError(f"{path}: bad magic {magic!r}")
            if version != CACHE_VERSION:
                raise IoError(f"{path}: unsupported version {version}")
            cache = EmbeddingCache(dimension=int(dim), path=Path(path))
            vec_bytes = 4 * dim
            for _ in range(count):
                (text_len,) = _ENTRY_LEN.unpack(fh.read(_ENTRY_LEN.size))
                text = fh.read(text_len).decode("utf-8")
                data = fh.read(vec_bytes)
                if len(data) != vec_bytes:
                    raise IoError(f"{path}: truncated vector for {text!r}")
                vec = np.frombuffer(data, dtype="<f4").astype(np.float32)
                vec.setflags(write=False)
                cache.entries[text] = vec
            return cache
    except OSError as exc:
        raise IoError(f"reading {path}: {exc}") from exc
    except struct.error as exc:
        raise IoError(f"{path}: truncated entry ({exc})") from exc


class FixtureProvider(EmbeddingProvider):
    """Serves embeddings from a cache file; unknown texts are an error."""

    def __init__(self, path: str | Path):
        self._cache = read_cache(path)
        self._name = Path(path).name

    @property
    def dimension(self) -> int:
        return self._cache.dimension

    @property
    def identity(self) -> str:
        return f"fixture:{self._name}:d{self._cache.dimension}"

    def embed_batch(self, texts: Sequence[str]) -> list[Embedding]:
        out = []
        for text in texts:
            vec = self._cache.get(text)
            if vec is None:
                raise MissingEmbeddingError(f"no fixture embedding for {text!r}")
            out.append(Embedding(vec))
        return out


class CachingProvider(EmbeddingProvider):
    """Write-through wrapper: every served vector lives in the cache exactly.

    Vectors are quantized to storage precision on first sight so that the
    cache, the returned embeddings, and any later cache file all agree
    bit for bit. Concurrent readers are safe; insertion is serialized.
    """

    def __init__(self, inner: EmbeddingProvider, cache: EmbeddingCache | None = None):
        self._inner = inner
        self.cache = cache if cache is not None else EmbeddingCache(inner.dimension)
        if self.cache.dimension != inner.dimension:
            raise ValidationError(
                f"cache dimension {self.cache.dimension} != provider {inner.dimension}"
            )
        self._lock = threading.Lock()

    @property
    def dimension(self) -> int:
        return self._inner.dimension

    @property
    def identity(self) -> str:
        return self._inner.identity

    def embed_batch(self, texts: Sequence[str]) -> list[Embedding]:
        missing = [t for t in texts if self.cache.get(t) is None]
        if missing:
            unique = list(dict.fromkeys(missing))
            fetched = self._inner.embed_batch(unique)
            with self._lock:
                for text, emb in zip(unique, fetched):
                    if self.cache.get(text) is None:
                        self.cache.put(text, emb)
        return [Embedding(self.cache.get(t)) for t in texts]

    def close(self) -> None:
        self._inner.close()


class RemoteProvider(EmbeddingProvider):
    """Client for the newline-delimited JSON embedding protocol.

    The first server line is a handshake {"proto": 1, "dim": d, "encoder":
    name}; afterwards requests {"id", "op": "embed", "texts"} are answered by
    {"id", "dim", "vectors"} or {"id", "error"}. Responses may arrive out of
    order; they are matched to callers by id, so requests can be pipelined.
    """

    def __init__(self, reader: IO[bytes], writer: IO[bytes], on_close=None):
        self._reader = reader
        self._writer = writer
        self._on_close = on_close
        self._write_lock = threading.Lock()
        self._cond = threading.Condition()
        self._responses: dict[int, dict] = {}
        self._next_id = 0
        self._dead: str | None = None

        handshake = self._read_line_blocking()
        if handshake is None:
            raise ProviderError("server closed the stream before the handshake")
        if handshake.get("proto") != 1 or "dim" not in handshake:
            raise ProviderError(f"bad handshake: {handshake}")
        self._dim = int(handshake["dim"])
        self._encoder = str(handshake.get("encoder", "unknown"))

        self._pump = threading.Thread(target=self._pump_responses, daemon=True)
        self._pump.start()

    @classmethod
    def connect_tcp(cls, host: str, port: int) -> "RemoteProvider":
        try:
            sock = socket.create_connection((host, port), timeout=30)
        except OSError as exc:
            raise ProviderError(f"cannot connect to {host}:{port}: {exc}") from exc
        reader = sock.makefile("rb")
        writer = sock.makefile("wb")
        return cls(reader, writer, on_close=sock.close)

    @classmethod
    def launch(cls, command: Sequence[str]) -> "RemoteProvider":
        try:
            proc = subprocess.Popen(
                list(command), stdin=subprocess.PIPE, stdout=subprocess.PIPE
            )
        except OSError as exc:
            raise ProviderError(f"cannot launch {command!r}: {exc}") from exc

        def _shutdown() -> None:
            try:
                proc.terminate()
                proc.wait(timeout=10)
            except Exception:
                proc.kill()

        return cls(proc.stdout, proc.stdin, on_close=_shutdown)

    @property
    def dimension(self) -> int:
        return self._dim

    @property
    def identity(self) -> str:
        return f"remote:{self._encoder}:d{self._dim}"

    def _read_line_blocking(self) -> dict | None:
        line = self._reader.readline()
        if not line:
            return None
        try:
            return json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProviderError(f"malformed server line: {line[:80]!r}") from exc

    def _pump_responses(self) -> None:
        while True:
            try:
                doc = self._read_line_blocking()
            except ProviderError as exc:
                doc = None
                reason = str(exc)
            else:
                reason = "server closed the stream"
            if doc is None:
                with self._cond:
                    self._dead = reason
                    self._cond.notify_all()
                return
            with self._cond:
                rid = doc.get("id")
                if isinstance(rid, int):
                    self._responses[rid] = doc
                    self._cond.notify_all()

    def embed_batch(self, texts: Sequence[str]) -> list[Embedding]:
        request = EmbeddingRequest(tuple(texts), self._take_id())
        payload = (
            json.dumps(
                {"id": request.request_id, "op": "embed", "texts": list(request.texts)},
                ensure_ascii=False,
            ).encode("utf-8")
            + b"\n"
        )
        with self._write_lock:
            try:
                self._writer.write(payload)
                self._writer.flush()
            except (OSError, ValueError) as exc:
                raise ProviderError(f"writing request: {exc}") from exc

        doc = self._await_response(request.request_id)
        if "error" in doc:
            raise ProviderError(f"server error: {doc['error']}")
        if int(doc.get("dim", -1)) != self._dim:
            raise ProviderError(
                f"dimension changed mid-session: handshake {self._dim}, response {doc.get('dim')}"
            )
        vectors = doc.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(request.texts):
            raise ProviderError(
                f"expected {len(request.texts)} vectors, got {type(vectors).__name__}"
            )
        out = []
        for vec in vectors:
            arr = np.asarray(vec, dtype=np.float32)
            if arr.ndim != 1 or arr.size != self._dim:
                raise ProviderError(f"vector of length {arr.size}, expected {self._dim}")
            out.append(Embedding(arr))
        return out

    def _take_id(self) -> int:
        with self._cond:
            rid = self._next_id
            self._next_id += 1
            return rid

    def _await_response(self, rid: int, timeout: float = 300.0) -> dict:
        with self._cond:
            while rid not in self._responses:
                if self._dead is not None:
                    raise ProviderError(self._dead)
                if not self._cond.wait(timeout=timeout):
                    raise ProviderError(f"timed out waiting for response {rid}")
            return self._responses.pop(rid)

    def close(self) -> None:
        for stream in (self._writer, self._reader):
            try:
                stream.close()
            except Exception:
                pass
        if self._on_close is not None:
            self._on_close()


def provider_from_spec(spec: str, dim: int = 64) -> EmbeddingProvider:
    """Build a provider from a CLI-style spec string.

    synthetic:SEED[:DIM[:CONCENTRATION]] | fixture:PATH | remote:HOST:PORT |
    remote:cmd:... — the CFGROUND_SIDECAR environment variable, when set,
    overrides the remote launch command (the address argument is ignored).
    """
    kind, _, rest = spec.partition(":")
    if kind == "synthetic":
        parts = rest.split(":") if rest else []
        if not parts or not parts[0]:
            raise ValidationError("synthetic provider needs a seed: synthetic:SEED[:DIM]")
        seed = int(parts[0])
        sdim = int(parts[1]) if len(parts) > 1 else dim
        conc = float(parts[2]) if len(parts) > 2 else 0.0
        return SyntheticProvider(seed, sdim, conc)
    if kind == "fixture":
        if not rest:
            raise ValidationError("fixture provider needs a path: fixture:PATH")
        return FixtureProvider(rest)
    if kind == "remote":
        override = os.environ.get("CFGROUND_SIDECAR")
        if override:
            remote = RemoteProvider.launch(override.split())
        elif rest.startswith("cmd:"):
            remote = RemoteProvider.launch(rest[len("cmd:"):].split())
        else:
            host, _, port = rest.rpartition(":")
            if not host or not port.isdigit():
                raise ValidationError(
                    "remote provider needs remote:HOST:PORT or remote:cmd:COMMAND"
                )
            remote = RemoteProvider.connect_tcp(host, int(port))
        return CachingProvider(remote)
    raise ValidationError(f"unknown provider spec {spec!r}")
