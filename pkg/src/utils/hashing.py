"""Provenance hashes for configurations and bases"""

import hashlib
import json
from typing import Any


def canonical_json(payload: Any) -> str:
    """Serialize with sorted keys and no whitespace so that equal payloads hash equally"""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def payload_hash(payload: Any) -> str:
    """SHA-256 of the canonical JSON form of ``payload``"""
    return sha256_text(canonical_json(payload))
