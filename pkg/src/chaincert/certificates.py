"""Certificate and family files: canonical JSON, hashing, atomic writes.

Every structured output is serialized with sorted keys, compact separators
and a trailing newline, so identical runs produce byte-identical files and
certificates can be referenced by content hash.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile

SCHEMA_CERT = "cert-v1"
SCHEMA_FAMILY = "family-v1"

# default seed for the randomized certifiers; recorded in every certificate
DEFAULT_SEED = 271828

CERT_KINDS = (
    "witness",
    "independence",
    "not-in-y",
    "density",
    "union-span",
    "extract",
    "combo-not-in-y",
    "cross-independence",
    "pointwise",
)


class SchemaError(ValueError):
    """File does not carry the expected schema tag."""


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def canonical_bytes(obj) -> bytes:
    return (canonical_dumps(obj) + "\n").encode("ascii")


def content_hash(obj) -> str:
    return hashlib.sha256(canonical_bytes(obj)).hexdigest()


def write_json(path: str, obj) -> None:
    """Atomic write: temp file in the target directory, then rename."""
    data = canonical_bytes(obj)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-cert-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def read_json(path: str) -> dict:
    with open(path, "rb") as fh:
        return json.loads(fh.read().decode("ascii"))


def make_certificate(kind: str, params, claim: dict, *, seed: int | None = None,
                     family: dict | None = None, trials: list | None = None,
                     notes: tuple[str, ...] = ()) -> dict:
    """Assemble a cert-v1 document.

    `family`, when given, is embedded whole and also hashed, so a certificate
    is self-contained while mutations of the embedded copy stay detectable.
    """
    if kind not in CERT_KINDS:
        raise ValueError(f"unknown certificate kind {kind!r}")
    out = {
        "schema": SCHEMA_CERT,
        "kind": kind,
        "params": params.to_json(),
        "claim": claim,
        "notes": list(notes),
    }
    if seed is not None:
        out["seed"] = seed
    if family is not None:
        out["family"] = family
        out["family_sha256"] = content_hash(family)
    if trials is not None:
        out["trials"] = trials
    return out


def expect_schema(obj: dict, schema: str) -> None:
    got = obj.get("schema")
    if got != schema:
        raise SchemaError(f"expected {schema}, found {got!r}")
