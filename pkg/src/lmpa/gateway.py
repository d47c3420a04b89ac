"""Uniform gateway to a language model.

Every request and response is a JSON document validated against a
per-kind schema. Three provider modes:

* ``off``   — no model; callers branch to their deterministic fallbacks.
* ``mock``  — responses come from fixture files ``<kind>__<function>.json``
  in a directory (retries consult ``<kind>__<function>.retry<N>.json``).
  Bit-deterministic, used by the test corpus.
* ``http``  — chat-completions style endpoint; the final message demands
  JSON-only output and the first JSON object of the reply is extracted.

`self_validate` implements the review loop: a domain validator examines
a schema-valid response, and complaints are fed back to the model (at
most ``max_retries`` times, default 2) before the response is returned
tagged rejected so callers fall back.

No other module performs network I/O.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Callable

import httpx
import jsonschema

from .errors import (
    FixtureMissingError,
    GatewayTransportError,
    SchemaViolationError,
    UsageError,
)

KINDS = (
    "behavior_classify",
    "param_spec",
    "summary_encode",
    "summary_decode",
    "summary_refine",
)

ENDPOINT_ENV = "LMPA_LLM_ENDPOINT"
MODEL_ENV = "LMPA_LLM_MODEL"
API_KEY_ENV = "LMPA_LLM_API_KEY"

_SUMMARY_OP_SCHEMA = {
    "type": "object",
    "properties": {
        "op": {"enum": ["alloc", "store", "copy", "return", "kill"]},
        "dst": {"type": "string"},
        "src": {"type": ["string", "null"]},
        "cond": {"type": ["string", "null"]},
    },
    "required": ["op", "dst"],
}

REQUEST_SCHEMAS: dict[str, dict] = {
    "behavior_classify": {
        "type": "object",
        "properties": {
            "source": {"type": "string"},
            "signature": {"type": "string"},
            "api_catalog": {"type": "array", "items": {"type": "string"}},
            "validator_feedback": {"type": "string"},
        },
        "required": ["source", "signature", "api_catalog"],
    },
    "param_spec": {
        "type": "object",
        "properties": {
            "signature": {"type": "string"},
            "record_layouts": {"type": "object"},
            "usage_sites": {"type": "array", "items": {"type": "string"}},
            "validator_feedback": {"type": "string"},
        },
        "required": ["signature", "record_layouts", "usage_sites"],
    },
    "summary_encode": {
        "type": "object",
        "properties": {
            "source": {"type": "string"},
            "raw_ops": {"type": "array", "items": _SUMMARY_OP_SCHEMA},
            "conditions": {"type": "array", "items": {"type": "string"}},
            "validator_feedback": {"type": "string"},
        },
        "required": ["source", "raw_ops", "conditions"],
    },
    "summary_decode": {
        "type": "object",
        "properties": {
            "text": {"type": "string"},
            "conditions": {"type": "array", "items": {"type": "string"}},
            "callee_signature": {"type": "string"},
            "validator_feedback": {"type": "string"},
        },
        "required": ["text", "conditions", "callee_signature"],
    },
    "summary_refine": {
        "type": "object",
        "properties": {
            "source": {"type": "string"},
            "raw_ops": {"type": "array", "items": _SUMMARY_OP_SCHEMA},
            "validator_feedback": {"type": "string"},
        },
        "required": ["source", "raw_ops"],
    },
}

RESPONSE_SCHEMAS: dict[str, dict] = {
    "behavior_classify": {
        "type": "object",
        "properties": {
            "abstractable": {"type": "boolean"},
            "api_list": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "api": {"type": "string"},
                        "arg_map": {"type": "object", "additionalProperties": {"type": "string"}},
                    },
                    "required": ["api", "arg_map"],
                },
            },
            "side_effect_notes": {"type": "string"},
        },
        "required": ["abstractable"],
    },
    "param_spec": {
        "type": "object",
        "properties": {
            "params": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "index": {"type": "integer"},
                        "materialize": {"type": "array", "items": {"type": "string"}},
                    },
                    "required": ["index", "materialize"],
                },
            }
        },
        "required": ["params"],
    },
    "summary_encode": {
        "type": "object",
        "properties": {
            "text": {"type": "string", "minLength": 1},
            "conditions": {"type": "array", "items": {"type": "string"}},
        },
        "required": ["text", "conditions"],
    },
    "summary_decode": {
        "type": "object",
        "properties": {"ops": {"type": "array", "items": _SUMMARY_OP_SCHEMA}},
        "required": ["ops"],
    },
    "summary_refine": {
        "type": "object",
        "properties": {
            "kills": {"type": "array", "items": _SUMMARY_OP_SCHEMA},
            "rationale": {"type": "string"},
        },
        "required": ["kills"],
    },
}


@dataclass(frozen=True)
class ProviderConfig:
    mode: str  # "off" | "mock" | "http"
    fixtures_dir: Path | None = None
    endpoint: str | None = None
    model: str | None = None
    timeout: float = 30.0
    max_retries: int = 2
    transport: object | None = None  # test hook: httpx transport

    @staticmethod
    def off() -> "ProviderConfig":
        return ProviderConfig("off")

    @staticmethod
    def mock(fixtures_dir: str | Path) -> "ProviderConfig":
        path = Path(fixtures_dir)
        if not path.is_dir():
            raise UsageError(f"mock fixture directory not found: {path}")
        return ProviderConfig("mock", fixtures_dir=path)

    @staticmethod
    def http(endpoint: str | None = None, model: str | None = None, **kw) -> "ProviderConfig":
        endpoint = endpoint or os.environ.get(ENDPOINT_ENV)
        model = model or os.environ.get(MODEL_ENV, "default")
        if not endpoint:
            raise UsageError(f"http mode needs an endpoint (flag or {ENDPOINT_ENV})")
        return ProviderConfig("http", endpoint=endpoint, model=model, **kw)

    @staticmethod
    def parse(spec: str) -> "ProviderConfig":
        if spec == "off":
            return ProviderConfig.off()
        if spec.startswith("mock:"):
            return ProviderConfig.mock(spec[len("mock:") :])
        if spec.startswith("http:"):
            return ProviderConfig.http(spec[len("http:") :] or None)
        raise UsageError(f"bad provider spec {spec!r} (expected off | mock:<dir> | http:<url>)")

    @property
    def enabled(self) -> bool:
        return self.mode != "off"


@dataclass
class LLMQuery:
    kind: str
    function_name: str
    payload: dict


@dataclass
class LLMResponse:
    kind: str
    document: dict
    provenance: str  # "live" | "mock"
    attempts: int = 1
    rejected: bool = False


def _validate(kind: str, document: dict, schemas: dict[str, dict], what: str) -> None:
    try:
        jsonschema.validate(document, schemas[kind])
    except jsonschema.ValidationError as exc:
        raise SchemaViolationError(f"{what} for {kind}: {exc.message}") from exc
    except KeyError:
        raise SchemaViolationError(f"unknown query kind {kind!r}") from None


def _fixture_path(cfg: ProviderConfig, q: LLMQuery, attempt: int) -> Path:
    suffix = "" if attempt == 0 else f".retry{attempt}"
    return cfg.fixtures_dir / f"{q.kind}__{q.function_name}{suffix}.json"


def _mock_query(q: LLMQuery, cfg: ProviderConfig, attempt: int) -> LLMResponse:
    path = _fixture_path(cfg, q, attempt)
    if not path.is_file():
        raise FixtureMissingError(str(path))
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaViolationError(f"fixture {path} is not valid JSON: {exc}") from exc
    _validate(q.kind, document, RESPONSE_SCHEMAS, "response")
    return LLMResponse(q.kind, document, "mock", attempts=attempt + 1)


def _prompt_template(kind: str) -> str:
    return resources.files("lmpa.prompts").joinpath(f"{kind}.txt").read_text(encoding="utf-8")


def extract_json_object(text: str) -> dict:
    """First balanced JSON object in a reply (models love to add prose)."""
    start = text.find("{")
    while start != -1:
        depth = 0
        in_string = False
        escaped = False
        for i in range(start, len(text)):
            ch = text[i]
            if in_string:
                if escaped:
                    escaped = False
                elif ch == "\\":
                    escaped = True
                elif ch == '"':
                    in_string = False
                continue
            if ch == '"':
                in_string = True
            elif ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    try:
                        return json.loads(text[start : i + 1])
                    except json.JSONDecodeError:
                        break
        start = text.find("{", start + 1)
    raise SchemaViolationError("no JSON object found in model reply")


def _http_query(q: LLMQuery, cfg: ProviderConfig, attempt: int) -> LLMResponse:
    headers = {"Content-Type": "application/json"}
    api_key = os.environ.get(API_KEY_ENV)
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    body = {
        "model": cfg.model,
        "temperature": 0,
        "messages": [
            {"role": "system", "content": _prompt_template(q.kind)},
            {
                "role": "user",
                "content": json.dumps(q.payload, sort_keys=True)
                + "\nRespond with a single JSON object and nothing else.",
            },
        ],
    }
    try:
        client_kw = {"timeout": cfg.timeout}
        if cfg.transport is not None:
            client_kw["transport"] = cfg.transport
        with httpx.Client(**client_kw) as client:
            reply = client.post(cfg.endpoint, json=body, headers=headers)
            reply.raise_for_status()
            data = reply.json()
    except httpx.HTTPError as exc:
        raise GatewayTransportError(f"{q.kind} request failed: {exc}") from exc
    try:
        content = data["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise SchemaViolationError(f"unexpected completion envelope: {data!r}") from exc
    document = extract_json_object(content)
    _validate(q.kind, document, RESPONSE_SCHEMAS, "response")
    return LLMResponse(q.kind, document, "live", attempts=attempt + 1)


def query(q: LLMQuery, cfg: ProviderConfig, attempt: int = 0) -> LLMResponse:
    """One round trip to the provider; the response is schema-valid or this raises."""
    if not cfg.enabled:
        raise UsageError("query() called with provider mode off")
    _validate(q.kind, q.payload, REQUEST_SCHEMAS, "payload")
    if cfg.mode == "mock":
        return _mock_query(q, cfg, attempt)
    last_error: Exception | None = None
    for retry in range(cfg.max_retries + 1):
        try:
            return _http_query(q, cfg, attempt + retry)
        except SchemaViolationError as exc:
            last_error = exc
    raise last_error  # type: ignore[misc]


Validator = Callable[[LLMResponse], str | None]


def self_validate(q: LLMQuery, r: LLMResponse, check: Validator, cfg: ProviderConfig) -> LLMResponse:
    """Iterative refinement: re-query with the validator's complaint until it
    passes or retries are exhausted (then the last response is returned with
    rejected=True so the caller falls back)."""
    response = r
    for _ in range(cfg.max_retries):
        complaint = check(response)
        if complaint is None:
            return response
        retry_payload = dict(q.payload)
        retry_payload["validator_feedback"] = complaint
        retry_query = LLMQuery(q.kind, q.function_name, retry_payload)
        try:
            response = query(retry_query, cfg, attempt=response.attempts)
        except (FixtureMissingError, GatewayTransportError, SchemaViolationError):
            return replace(response, rejected=True)
    if check(response) is None:
        return response
    return replace(response, rejected=True)
