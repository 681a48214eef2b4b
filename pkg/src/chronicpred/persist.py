"""Versioned, checksummed text container for fitted models and bundles.

Layout::

    CHRONICPRED-MODEL v1 sha256=<64 hex> bytes=<payload length>\\n
    <canonical JSON payload>

JSON floats are written with ``repr``, which round-trips every finite double
exactly; infinite thresholds are stored as the JSON extension ``Infinity``.
"""

from __future__ import annotations

import hashlib
import json
import re
from typing import Any

from .errors import (
    ArtifactChecksumError,
    ArtifactError,
    ArtifactFormatError,
    ArtifactTruncatedError,
    ArtifactVersionError,
)
from .models import config_values, family, make_config

MAGIC = "CHRONICPRED-MODEL"
VERSION = 1
_HEADER = re.compile(rb"^CHRONICPRED-MODEL v(\d+) sha256=([0-9a-f]{64}) bytes=(\d+)$")


def encode_container(payload: dict) -> bytes:
    body = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    digest = hashlib.sha256(body).hexdigest()
    return f"{MAGIC} v{VERSION} sha256={digest} bytes={len(body)}\n".encode("ascii") + body


def decode_container(data: bytes) -> dict:
    if not isinstance(data, (bytes, bytearray)):
        raise ArtifactFormatError("artifact must be bytes")
    data = bytes(data)
    newline = data.find(b"\n")
    if newline < 0:
        if MAGIC.encode().startswith(data[: len(MAGIC)]) and len(data) < 200:
            raise ArtifactTruncatedError("artifact ends inside its header")
        raise ArtifactFormatError("artifact has no header line")
    header = data[:newline]
    if not header.startswith(MAGIC.encode() + b" v"):
        raise ArtifactFormatError("not a model artifact (bad format tag)")
    match = _HEADER.match(header)
    if match is None:
        version = re.match(rb"^CHRONICPRED-MODEL v(\d+) ", header)
        if version and int(version.group(1)) != VERSION:
            raise ArtifactVersionError(f"unsupported artifact version {int(version.group(1))}; "
                                       f"this build reads version {VERSION}")
        raise ArtifactFormatError("malformed artifact header")
    version, digest, length = int(match.group(1)), match.group(2).decode(), int(match.group(3))
    if version != VERSION:
        raise ArtifactVersionError(f"unsupported artifact version {version}; this build reads version {VERSION}")
    body = data[newline + 1:]
    if len(body) < length:
        raise ArtifactTruncatedError(f"artifact payload truncated: {len(body)} of {length} bytes")
    if len(body) > length:
        raise ArtifactFormatError(f"artifact has {len(body) - length} trailing bytes")
    if hashlib.sha256(body).hexdigest() != digest:
        raise ArtifactChecksumError("artifact checksum mismatch; the file is corrupted")
    try:
        payload = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, ValueError) as exc:
        raise ArtifactFormatError(f"artifact payload is not valid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise ArtifactFormatError("artifact payload must be an object")
    return payload


def model_to_dict(model) -> dict:
    return {"kind": model.kind, "hp": config_values(model.hp), "params": model.params()}


def model_from_dict(data: dict):
    try:
        kind = data["kind"]
        fam = family(kind)
        hp = make_config(kind, data["hp"])
        return fam.model.from_params(hp, data["params"])
    except ArtifactError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ArtifactFormatError(f"invalid model record: {exc!r}") from None


def save_model(model) -> bytes:
    return encode_container({"type": "model", "model": model_to_dict(model)})


def load_model(data: bytes):
    payload = decode_container(data)
    if payload.get("type") != "model":
        raise ArtifactFormatError(f"expected a model artifact, found {payload.get('type')!r}")
    return model_from_dict(payload.get("model", {}))


def save_payload(kind: str, body: dict[str, Any]) -> bytes:
    return encode_container({"type": kind, **body})


def load_payload(data: bytes, kind: str) -> dict:
    payload = decode_container(data)
    if payload.get("type") != kind:
        raise ArtifactFormatError(f"expected a {kind} artifact, found {payload.get('type')!r}")
    return payload
