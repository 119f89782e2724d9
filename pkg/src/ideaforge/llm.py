"""Text-generation gateway with structured-JSON extraction.

Every agent talks to the model through this module, and no failure here is
allowed to escape as an exception: transport errors, timeouts and unparseable
output are all encoded in the returned outcome so the pipeline can fall back
to deterministic defaults and keep going.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, replace
from typing import Any, Callable, Sequence

import requests

logger = logging.getLogger(__name__)

DEFAULT_MODEL = "tinyllama"
DEFAULT_ENDPOINT = "http://localhost:11434"
DEFAULT_TEMPERATURE = 0.2
DEFAULT_MAX_TOKENS = 512
DEFAULT_TIMEOUT = 60.0

MODEL_ENV_VAR = "OLLAMA_MODEL"
ENDPOINT_ENV_VAR = "OLLAMA_HOST"


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    model_name: str = DEFAULT_MODEL
    max_tokens: int = DEFAULT_MAX_TOKENS
    temperature: float = DEFAULT_TEMPERATURE
    timeout: float = DEFAULT_TIMEOUT

    def __post_init__(self):
        if not self.prompt:
            raise ValueError("prompt must be non-empty")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")


@dataclass(frozen=True)
class Text:
    """The backend produced text."""

    content: str


@dataclass(frozen=True)
class Malformed:
    """The backend produced text that failed structured parsing.

    The raw output is always retained for logging and debugging.
    """

    raw: str
    reason: str


@dataclass(frozen=True)
class Unavailable:
    """The backend could not be reached (offline mode, transport failure, timeout)."""

    reason: str


GenerationOutcome = Text | Malformed | Unavailable

# A transport maps a request to an outcome; injectable for tests.
Transport = Callable[[GenerationRequest], GenerationOutcome]


def extract_json_object(text: str) -> dict[str, Any]:
    """Parse the first balanced {...} block out of arbitrary model output.

    Balancing tracks string literals and escapes, so braces inside strings
    do not confuse it. Raises ValueError when no object is found or the
    first block is not valid JSON.
    """
    start = text.find("{")
    if start < 0:
        raise ValueError("no JSON object found")
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
                block = text[start : i + 1]
                try:
                    parsed = json.loads(block)
                except json.JSONDecodeError as exc:
                    raise ValueError(f"invalid JSON: {exc}") from exc
                if not isinstance(parsed, dict):
                    raise ValueError("JSON block is not an object")
                return parsed
    raise ValueError("unbalanced JSON object")


def _post_generate(endpoint: str, request: GenerationRequest) -> GenerationOutcome:
    """POST to an Ollama-compatible /api/generate endpoint."""
    url = endpoint.rstrip("/") + "/api/generate"
    body = {
        "model": request.model_name,
        "prompt": request.prompt,
        "stream": False,
        "options": {
            "temperature": request.temperature,
            "num_predict": request.max_tokens,
        },
    }
    try:
        response = requests.post(url, json=body, timeout=request.timeout)
        response.raise_for_status()
        return Text(response.json()["response"])
    except Exception as exc:
        return Unavailable(f"transport failure: {exc}")


class LlmGateway:
    """Pluggable generation backend with offline mode and JSON extraction."""

    def __init__(
        self,
        model_name: str | None = None,
        endpoint: str | None = None,
        offline: bool = False,
        temperature: float = DEFAULT_TEMPERATURE,
        max_tokens: int = DEFAULT_MAX_TOKENS,
        timeout: float = DEFAULT_TIMEOUT,
        transport: Transport | None = None,
    ):
        self.model_name = model_name or os.environ.get(MODEL_ENV_VAR, DEFAULT_MODEL)
        self.endpoint = endpoint or os.environ.get(ENDPOINT_ENV_VAR, DEFAULT_ENDPOINT)
        self.offline = offline
        self.temperature = temperature
        self.max_tokens = max_tokens
        self.timeout = timeout
        self._transport = transport or (lambda req: _post_generate(self.endpoint, req))

    def make_request(self, prompt: str) -> GenerationRequest:
        return GenerationRequest(
            prompt=prompt,
            model_name=self.model_name,
            max_tokens=self.max_tokens,
            temperature=self.temperature,
            timeout=self.timeout,
        )

    def generate(self, request: GenerationRequest) -> GenerationOutcome:
        """Run one generation. Never raises; failures become Unavailable.

        In offline mode this returns Unavailable("offline") without touching
        the network at all.
        """
        if self.offline:
            return Unavailable("offline")
        try:
            return self._transport(request)
        except Exception as exc:  # a transport should not raise, but be safe
            return Unavailable(f"transport raised: {exc}")

    def generate_json(
        self, request: GenerationRequest, required_keys: Sequence[str]
    ) -> dict[str, Any] | Malformed | Unavailable:
        """Generate and parse a JSON object containing all required keys.

        Retries once on malformed output with an explicit JSON-only nudge,
        then gives up and reports Malformed so the caller can fall back.
        """
        if not required_keys:
            raise ValueError("required_keys must be non-empty")

        def attempt(req: GenerationRequest) -> dict[str, Any] | Malformed | Unavailable:
            outcome = self.generate(req)
            if isinstance(outcome, (Unavailable, Malformed)):
                return outcome
            return parse_json_outcome(outcome.content, required_keys)

        result = attempt(request)
        if isinstance(result, Unavailable) or isinstance(result, dict):
            return result
        logger.debug("malformed JSON from model (%s); retrying once", result.reason)
        retry = replace(request, prompt=request.prompt + "\n\nRespond with JSON only.")
        return attempt(retry)


def parse_json_outcome(
    text: str, required_keys: Sequence[str]
) -> dict[str, Any] | Malformed:
    """Pure extraction step: same text and keys always give the same result."""
    try:
        parsed = extract_json_object(text)
    except ValueError as exc:
        return Malformed(text, str(exc))
    for key in required_keys:
        if key not in parsed:
            return Malformed(text, f"missing key {key}")
    return parsed
