"""Feature sequence files: a diffable text format and a compact binary one.

Text format
    line 1:      ``T=<frames> K=<features>``
    lines 2..T+1: K space-separated decimal values (shortest round-trip
    representation, so save -> load is bit-exact)

Binary format
    magic ``OACP``, one version byte (1), little-endian uint32 T and K,
    then T*K little-endian float64 values in row-major order.

Loading sniffs the first four bytes for the magic and otherwise parses text.
"""

from __future__ import annotations

import struct

import numpy as np

from ..errors import ParseError
from ..sequences import FeatureSequence

MAGIC = b"OACP"
BINARY_VERSION = 1
_HEADER = struct.Struct("<II")


def save_features(seq: FeatureSequence, path, binary: bool = False) -> None:
    """Write a sequence losslessly in the text (default) or binary format."""
    if binary:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(bytes([BINARY_VERSION]))
            fh.write(_HEADER.pack(seq.num_frames, seq.num_features))
            fh.write(seq.frames.astype("<f8").tobytes(order="C"))
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"T={seq.num_frames} K={seq.num_features}\n")
        for row in seq.frames:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def _load_binary(path, raw: bytes) -> FeatureSequence:
    if len(raw) < len(MAGIC) + 1 + _HEADER.size:
        raise ParseError(f"{path}: truncated binary header")
    version = raw[len(MAGIC)]
    if version != BINARY_VERSION:
        raise ParseError(f"{path}: unsupported binary version {version}")
    t, k = _HEADER.unpack_from(raw, len(MAGIC) + 1)
    if t < 1 or k < 1:
        raise ParseError(f"{path}: invalid shape T={t} K={k}")
    payload = raw[len(MAGIC) + 1 + _HEADER.size :]
    expected = t * k * 8
    if len(payload) != expected:
        raise ParseError(
            f"{path}: expected {expected} payload bytes for T={t} K={k}, got {len(payload)}"
        )
    frames = np.frombuffer(payload, dtype="<f8").reshape(t, k)
    if not np.isfinite(frames).all():
        raise ParseError(f"{path}: payload contains non-finite values")
    return FeatureSequence(frames)


def _parse_header(path, line: str) -> tuple[int, int]:
    tokens = line.split()
    if (
        len(tokens) != 2
        or not tokens[0].startswith("T=")
        or not tokens[1].startswith("K=")
    ):
        raise ParseError(f"{path}: line 1: expected 'T=<frames> K=<features>', got {line!r}")
    try:
        t = int(tokens[0][2:])
        k = int(tokens[1][2:])
    except ValueError:
        raise ParseError(f"{path}: line 1: non-integer shape in {line!r}") from None
    if t < 1 or k < 1:
        raise ParseError(f"{path}: line 1: invalid shape T={t} K={k}")
    return t, k


def _load_text(path, raw: bytes) -> FeatureSequence:
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: neither binary (no magic) nor utf-8 text: {exc}") from None
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError(f"{path}: empty feature file")
    t, k = _parse_header(path, lines[0])
    body = [
        (lineno, line)
        for lineno, line in enumerate(lines[1:], start=2)
        if line.strip()
    ]
    if len(body) != t:
        raise ParseError(
            f"{path}: header declares T={t} but found {len(body)} data rows"
        )
    frames = np.empty((t, k))
    for r, (lineno, line) in enumerate(body):
        parts = line.split()
        if len(parts) != k:
            raise ParseError(
                f"{path}: line {lineno}: expected {k} values, got {len(parts)}"
            )
        try:
            frames[r] = [float(p) for p in parts]
        except ValueError:
            raise ParseError(f"{path}: line {lineno}: non-numeric value") from None
        if not np.isfinite(frames[r]).all():
            raise ParseError(f"{path}: line {lineno}: non-finite value")
    return FeatureSequence(frames)


def load_features(path) -> FeatureSequence:
    """Read a feature file in either format; errors carry the offending line."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if not raw:
        raise ParseError(f"{path}: empty feature file")
    if raw[: len(MAGIC)] == MAGIC:
        return _load_binary(path, raw)
    return _load_text(path, raw)
