"""Embedding server speaking the newline-delimited JSON provider protocol.

First line out is the handshake {"proto": 1, "dim": d, "encoder": name};
each request {"id", "op": "embed", "texts": [...]} is answered by
{"id", "dim", "vectors": [[...], ...]} or {"id", "error": "..."}. A bad
request produces an error response and the session continues. Vectors are
rounded to float32 before serialization, matching the cache precision.

Transports: stdio (one pipelined stream on stdin/stdout) or a single TCP
connection.
"""

from __future__ import annotations

import json
import socket
import sys
from typing import IO

import numpy as np

from .encoders import EncoderSpec, TextEncoder


def _vector_rows(array: np.ndarray) -> list[list[float]]:
    return [[float(np.float32(v)) for v in row] for row in array]


def handle_request(encoder: TextEncoder, line: str) -> dict:
    try:
        req = json.loads(line)
    except json.JSONDecodeError:
        return {"id": -1, "error": "malformed JSON request"}
    rid = req.get("id")
    if not isinstance(rid, int):
        return {"id": -1, "error": "request id must be an integer"}
    if req.get("op") != "embed":
        return {"id": rid, "error": f"unknown op {req.get('op')!r}"}
    texts = req.get("texts")
    if not isinstance(texts, list) or not texts or any(
        not isinstance(t, str) or not t for t in texts
    ):
        return {"id": rid, "error": "texts must be a non-empty list of non-empty strings"}
    try:
        vectors = encoder.encode(texts)
    except Exception as exc:  # per-request failure; session survives
        return {"id": rid, "error": f"{type(exc).__name__}: {exc}"}
    return {"id": rid, "dim": encoder.dimension, "vectors": _vector_rows(vectors)}


def serve_stream(encoder: TextEncoder, reader: IO[str], writer: IO[str]) -> None:
    writer.write(
        json.dumps({"proto": 1, "dim": encoder.dimension, "encoder": encoder.name})
        + "\n"
    )
    writer.flush()
    for line in reader:
        if not line.strip():
            continue
        response = handle_request(encoder, line)
        writer.write(json.dumps(response) + "\n")
        writer.flush()


def serve(
    spec: EncoderSpec,
    transport: str = "stdio",
    host: str = "127.0.0.1",
    port: int = 0,
    announce: IO[str] | None = None,
) -> None:
    """Load the encoder and serve one session over the chosen transport."""
    encoder = TextEncoder(spec)
    if transport == "stdio":
        serve_stream(encoder, sys.stdin, sys.stdout)
        return
    if transport != "tcp":
        raise ValueError(f"unknown transport {transport!r}")
    srv = socket.create_server((host, port))
    actual_port = srv.getsockname()[1]
    if announce is not None:
        announce.write(f"listening on {host}:{actual_port}\n")
        announce.flush()
    conn, _ = srv.accept()
    with conn:
        reader = conn.makefile("r", encoding="utf-8")
        writer = conn.makefile("w", encoding="utf-8")
        serve_stream(encoder, reader, writer)
    srv.close()
