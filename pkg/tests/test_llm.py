from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest
from hypothesis import given, strategies as st

from ideaforge.llm import (
    GenerationRequest,
    LlmGateway,
    Malformed,
    Text,
    Unavailable,
    extract_json_object,
    parse_json_outcome,
)

from conftest import scripted_llm


class GenerateHandler(BaseHTTPRequestHandler):
    response_text = "stub content"
    delay = 0.0

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        self.rfile.read(length)
        if self.delay:
            time.sleep(self.delay)
        body = json.dumps({"response": self.response_text}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    server = HTTPServer(("127.0.0.1", 0), GenerateHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()
    GenerateHandler.delay = 0.0


def test_offline_mode_returns_unavailable(no_network):
    gateway = LlmGateway(offline=True)
    outcome = gateway.generate(gateway.make_request("hello"))
    assert outcome == Unavailable("offline")


def test_reachable_backend_echo_stub(stub_server):
    gateway = LlmGateway(endpoint=stub_server)
    outcome = gateway.generate(gateway.make_request("hello"))
    assert outcome == Text("stub content")


def test_unreachable_endpoint_is_unavailable():
    gateway = LlmGateway(endpoint="http://127.0.0.1:1", timeout=2.0)
    outcome = gateway.generate(gateway.make_request("hello"))
    assert isinstance(outcome, Unavailable)


def test_generate_does_not_block_past_timeout(stub_server):
    GenerateHandler.delay = 1.2
    gateway = LlmGateway(endpoint=stub_server, timeout=0.3)
    start = time.monotonic()
    outcome = gateway.generate(gateway.make_request("hello"))
    elapsed = time.monotonic() - start
    assert isinstance(outcome, Unavailable)
    assert elapsed < 2.0


def test_request_validation():
    with pytest.raises(ValueError):
        GenerationRequest(prompt="")
    with pytest.raises(ValueError):
        GenerationRequest(prompt="x", timeout=0)


def test_model_env_var_default(monkeypatch):
    monkeypatch.setenv("OLLAMA_MODEL", "phi")
    assert LlmGateway(offline=True).model_name == "phi"
    monkeypatch.delenv("OLLAMA_MODEL")
    assert LlmGateway(offline=True).model_name == "tinyllama"


# -- JSON extraction -------------------------------------------------------------


def test_extract_from_noise():
    text = 'noise {"improving":"a","worsening":"b"} noise'
    result = parse_json_outcome(text, ["improving", "worsening"])
    assert result == {"improving": "a", "worsening": "b"}


def test_missing_key_is_malformed():
    result = parse_json_outcome('{"improving":"a"}', ["improving", "worsening"])
    assert isinstance(result, Malformed)
    assert "worsening" in result.reason
    assert result.raw == '{"improving":"a"}'


def test_no_json_at_all():
    result = parse_json_outcome("not json at all", ["k"])
    assert isinstance(result, Malformed)
    assert "no JSON object" in result.reason


def test_extract_nested_braces():
    text = 'x {"a": {"b": {"c": 1}}, "d": [1, {"e": 2}]} y'
    assert extract_json_object(text) == {"a": {"b": {"c": 1}}, "d": [1, {"e": 2}]}


def test_extract_braces_inside_strings():
    text = 'pre {"a": "literal } brace {", "b": "\\" quote"} post'
    assert extract_json_object(text) == {"a": "literal } brace {", "b": '" quote'}


def test_extract_first_block_wins():
    assert extract_json_object('{"first": 1} {"second": 2}') == {"first": 1}


def test_extract_invalid_first_block():
    with pytest.raises(ValueError):
        extract_json_object("{not json} {\"ok\": 1}")


json_values = st.recursive(
    st.none()
    | st.booleans()
    | st.integers(min_value=-(10**6), max_value=10**6)
    | st.floats(allow_nan=False, allow_infinity=False, width=32)
    | st.text(max_size=20),
    lambda children: st.lists(children, max_size=4)
    | st.dictionaries(st.text(max_size=8), children, max_size=4),
    max_leaves=12,
)
json_objects = st.dictionaries(st.text(min_size=1, max_size=8), json_values, min_size=1, max_size=5)
noise_prefix = st.text(
    alphabet=st.characters(blacklist_characters="{"), max_size=30
)


@given(obj=json_objects, prefix=noise_prefix, suffix=st.text(max_size=30))
def test_extract_recovers_any_embedded_object(obj, prefix, suffix):
    text = prefix + json.dumps(obj) + suffix
    assert extract_json_object(text) == obj


@given(obj=json_objects)
def test_parse_is_pure(obj):
    text = "lead " + json.dumps(obj)
    keys = list(obj)[:1]
    assert parse_json_outcome(text, keys) == parse_json_outcome(text, keys)


# -- generate_json orchestration ----------------------------------------------------


def test_generate_json_happy_path():
    gateway = scripted_llm(Text('{"a": 1, "b": 2}'))
    result = gateway.generate_json(gateway.make_request("p"), ["a", "b"])
    assert result == {"a": 1, "b": 2}


def test_generate_json_retries_once_with_nudge():
    prompts = []

    def transport(request):
        prompts.append(request.prompt)
        if len(prompts) == 1:
            return Text("garbage")
        return Text('{"a": 1}')

    gateway = LlmGateway(transport=transport)
    result = gateway.generate_json(gateway.make_request("p"), ["a"])
    assert result == {"a": 1}
    assert len(prompts) == 2
    assert prompts[1].endswith("Respond with JSON only.")


def test_generate_json_gives_up_after_retry():
    gateway = scripted_llm(Text("garbage"), Text("still garbage"))
    result = gateway.generate_json(gateway.make_request("p"), ["a"])
    assert isinstance(result, Malformed)
    assert result.raw == "still garbage"


def test_generate_json_unavailable_short_circuits():
    calls = []

    def transport(request):
        calls.append(request)
        return Unavailable("down")

    gateway = LlmGateway(transport=transport)
    result = gateway.generate_json(gateway.make_request("p"), ["a"])
    assert result == Unavailable("down")
    assert len(calls) == 1


def test_generate_json_requires_keys():
    gateway = scripted_llm(Text("{}"))
    with pytest.raises(ValueError):
        gateway.generate_json(gateway.make_request("p"), [])
