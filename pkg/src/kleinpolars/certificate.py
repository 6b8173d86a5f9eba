"""Sealed JSON payloads: a sha256 over the canonical serialization."""

from __future__ import annotations

import hashlib
import json


class IntegrityError(ValueError):
    """A certificate's content does not match its recorded hash."""


def canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def digest(payload: dict) -> str:
    body = canonical({k: v for k, v in payload.items() if k != "sha256"})
    return hashlib.sha256(body.encode()).hexdigest()


def seal(payload: dict) -> dict:
    payload = dict(payload)
    payload["sha256"] = digest(payload)
    return payload


def verify_seal(payload: dict) -> None:
    if payload.get("sha256") != digest(payload):
        raise IntegrityError("certificate hash mismatch")
