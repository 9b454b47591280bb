"""Chat-model teachers: sessions, endpoints, response parsing, runners.

A simulated teacher is one conversation: the instruction preamble once,
then per trial an optional scaffold exchange followed by the teaching
exchange, with the full history resent every call. Histories never cross
teachers. Transport failures retry with backoff; malformed replies never
do: the trial is recorded and treated as missing.
"""

from __future__ import annotations

import json
import os
import re
import threading
import time
from dataclasses import dataclass, field

import httpx

from . import prompts
from .fitting import SubjectDataset, make_record

EDGE_RE = re.compile(r"\((\d+)\s*,\s*(\d+)\)")
TRIPLE_RE = re.compile(
    r"\[\s*\((\d+)\s*,\s*(\d+)\)\s*,\s*\((\d+)\s*,\s*(\d+)\)\s*,\s*\((\d+)\s*,\s*(\d+)\)\s*\]")

SCAFFOLD_KINDS = ("none", "inference", "reward")


@dataclass(frozen=True)
class ParsedChoice:
    """Outcome of scanning one reply; missing fields stay None."""

    raw: str
    edge: tuple[int, int] | None = None
    triple: tuple[tuple[int, int], ...] | None = None


def parse_choice(text: str) -> ParsedChoice:
    """Extract the taught edge: the LAST (a,b) pair in the reply, so an
    explanation followed by a final answer parses to the answer."""
    matches = EDGE_RE.findall(text or "")
    edge = (int(matches[-1][0]), int(matches[-1][1])) if matches else None
    return ParsedChoice(raw=text, edge=edge)


def parse_scaffold(text: str) -> ParsedChoice:
    """Extract the last bracketed triple [(a,b),(c,d),(e,f)]."""
    matches = TRIPLE_RE.findall(text or "")
    if not matches:
        return ParsedChoice(raw=text)
    m = matches[-1]
    triple = ((int(m[0]), int(m[1])), (int(m[2]), int(m[3])), (int(m[4]), int(m[5])))
    return ParsedChoice(raw=text, triple=triple)


@dataclass
class DecodingConfig:
    temperature: float | None = 0.0
    max_tokens: int | None = 4096
    reasoning_effort: str | None = None


@dataclass
class ChatSession:
    """Append-only message history of one simulated teacher."""

    messages: list[dict] = field(default_factory=list)

    def add(self, role: str, text: str):
        self.messages.append({"role": role, "content": text})


class TransportError(RuntimeError):
    """Network-level failure talking to an endpoint (retryable)."""


class MockEndpoint:
    """Scripted endpoint for tests and dry runs: replays canned replies in
    order (cycling), or calls a function of the message history."""

    name = "mock"

    def __init__(self, replies=None, fn=None):
        if (replies is None) == (fn is None):
            raise ValueError("give exactly one of replies or fn")
        self.replies = list(replies) if replies else None
        self.fn = fn
        self.calls = 0

    def complete(self, messages, config: DecodingConfig) -> str:
        self.calls += 1
        if self.fn:
            return self.fn(messages)
        return self.replies[(self.calls - 1) % len(self.replies)]


class FlakyEndpoint:
    """Wraps an endpoint, failing the first ``failures`` calls; exercises
    the retry path."""

    name = "flaky"

    def __init__(self, inner, failures: int):
        self.inner = inner
        self.remaining = failures

    def complete(self, messages, config):
        if self.remaining > 0:
            self.remaining -= 1
            raise TransportError("injected failure")
        return self.inner.complete(messages, config)


class HttpChatEndpoint:
    """Generic chat-completions REST endpoint (OpenAI-style wire format).

    Configured by base URL, model name, and the env var holding the key.
    """

    def __init__(self, name, base_url, model, api_key_env=None,
                 decoding: DecodingConfig | None = None, timeout=60.0):
        self.name = name
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key_env = api_key_env
        self.decoding = decoding or DecodingConfig()
        self.timeout = timeout

    def complete(self, messages, config: DecodingConfig) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key_env:
            key = os.environ.get(self.api_key_env)
            if not key:
                raise TransportError(f"env var {self.api_key_env} is not set")
            headers["Authorization"] = f"Bearer {key}"
        body = {"model": self.model, "messages": messages}
        if config.temperature is not None:
            body["temperature"] = config.temperature
        if config.max_tokens is not None:
            body["max_tokens"] = config.max_tokens
        if config.reasoning_effort is not None:
            body["reasoning_effort"] = config.reasoning_effort
        try:
            resp = httpx.post(f"{self.base_url}/chat/completions", json=body,
                              headers=headers, timeout=self.timeout)
            resp.raise_for_status()
            data = resp.json()
            return data["choices"][0]["message"]["content"]
        except (httpx.HTTPError, KeyError, ValueError) as exc:
            raise TransportError(str(exc)) from exc


def load_endpoints(path) -> dict:
    """Endpoint registry from a JSON config file:
    {"endpoints": {name: {base_url, model, api_key_env, temperature,
    max_tokens, reasoning_effort}}}."""
    with open(path) as f:
        cfg = json.load(f)
    out = {}
    for name, spec in cfg.get("endpoints", {}).items():
        decoding = DecodingConfig(
            temperature=spec.get("temperature", 0.0),
            max_tokens=spec.get("max_tokens", 4096),
            reasoning_effort=spec.get("reasoning_effort"),
        )
        out[name] = HttpChatEndpoint(
            name, spec["base_url"], spec["model"],
            api_key_env=spec.get("api_key_env"), decoding=decoding)
    return out


class RateLimiter:
    """Minimum interval between requests, shared across teacher threads."""

    def __init__(self, min_interval: float = 0.0):
        self.min_interval = min_interval
        self._lock = threading.Lock()
        self._last = 0.0

    def wait(self):
        if self.min_interval <= 0:
            return
        with self._lock:
            now = time.monotonic()
            delay = self._last + self.min_interval - now
            if delay > 0:
                time.sleep(delay)
            self._last = time.monotonic()


def _ask(endpoint, session: ChatSession, prompt: str, config, limiter,
         retries=3, backoff=1.0, sleep=time.sleep) -> str | None:
    """One exchange: append the prompt, get a reply, append it. Transport
    errors retry with exponential backoff; after ``retries`` attempts the
    exchange is dropped (prompt removed) and None returned."""
    session.add("user", prompt)
    for attempt in range(retries):
        try:
            if limiter:
                limiter.wait()
            reply = endpoint.complete(list(session.messages), config)
            session.add("assistant", reply)
            return reply
        except TransportError:
            if attempt == retries - 1:
                session.messages.pop()  # keep history consistent
                return None
            sleep(backoff * 2 ** attempt)
    return None


def run_teacher(endpoint, stimulus_sequence, condition=None, teacher_id="teacher-0",
                decoding: DecodingConfig | None = None, limiter: RateLimiter | None = None,
                log_path=None, retries=3, backoff=1.0, sleep=time.sleep) -> SubjectDataset:
    """Drive one simulated teacher through a trial sequence.

    Scaffold exchanges happen only on training trials of scaffold
    conditions and stay in the history before that trial's teaching prompt.
    Teachers never see outcomes or scores. Raw replies are retained.
    """
    condition = dict(condition or {})
    scaffolding = condition.get("scaffolding", "none")
    if scaffolding not in SCAFFOLD_KINDS:
        raise ValueError(f"unknown scaffolding {scaffolding!r}")
    config = decoding or DecodingConfig()
    session = ChatSession()
    log = open(log_path, "a") if log_path else None

    def log_exchange(trial, role, text):
        if log:
            log.write(json.dumps({"teacher_id": teacher_id, "trial": trial,
                                  "role": role, "text": text,
                                  "timestamp": time.time()}) + "\n")

    try:
        instruction = prompts.build_instruction_prompt(scaffolding)
        session.add("system", instruction)
        log_exchange(None, "system", instruction)

        records = []
        for i, stim in enumerate(stimulus_sequence):
            scaffold_triple = None
            scaffold_raw = None
            do_scaffold = scaffolding != "none" and stim.role == "train"
            if do_scaffold:
                kind = f"{scaffolding}_scaffold"
                prompt = prompts.build_trial_prompt(stim, kind)
                log_exchange(i, "user", prompt)
                reply = _ask(endpoint, session, prompt, config, limiter,
                             retries, backoff, sleep)
                log_exchange(i, "assistant", reply)
                if reply is not None:
                    parsed = parse_scaffold(reply)
                    scaffold_triple = parsed.triple
                    scaffold_raw = reply

            prompt = prompts.build_trial_prompt(stim, "teach")
            log_exchange(i, "user", prompt)
            reply = _ask(endpoint, session, prompt, config, limiter,
                         retries, backoff, sleep)
            log_exchange(i, "assistant", reply)
            edge = parse_choice(reply).edge if reply is not None else None

            cond = dict(condition)
            cond["phase"] = stim.role
            if scaffold_raw is not None:
                cond["scaffold_raw"] = scaffold_raw
            records.append(make_record(i, stim, edge,
                                       scaffold_selection=scaffold_triple,
                                       condition=cond, raw_text=reply))
        return SubjectDataset(teacher_id, "llm", records, dict(condition))
    finally:
        if log:
            log.close()


def run_teachers(endpoint_factory, sequences, condition=None, seed_ids=None,
                 max_workers=4, limiter: RateLimiter | None = None, **kwargs):
    """Run several teachers concurrently, one independent session each.

    ``endpoint_factory()`` must return a fresh or thread-safe endpoint;
    ``sequences`` is one stimulus sequence per teacher.
    """
    from concurrent.futures import ThreadPoolExecutor

    limiter = limiter or RateLimiter()
    ids = seed_ids or [f"teacher-{i}" for i in range(len(sequences))]

    def one(arg):
        tid, seq = arg
        return run_teacher(endpoint_factory(), seq, condition, teacher_id=tid,
                           limiter=limiter, **kwargs)

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(one, zip(ids, sequences)))
