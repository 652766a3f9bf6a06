"""Prompt construction and answer generation with latency accounting."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .errors import ProviderError
from .retrieval import RetrievedContext

# Fixed zero-shot grounding template. {similar_chunks} receives the retrieved
# chunk texts joined by blank lines in rank order; {query} the user question.
PROMPT_TEMPLATE = """You are a professional assistant for answering questions.
Your task is to summarize the topic using
information from a given CONTEXT
You will receive CONTEXT information
and a user QUERY. Keep your answer grounded in
the facts of the CONTEXT.
You have to be as concise as possible,
while still answering the user's query.
If the CONTEXT doesn’t contain the facts to
answer the QUERY, return No relevant information provided.
Answer the users QUERY using the CONTEXT.
CONTEXT information will be provided in the next sentence.
{similar_chunks}
Here is the user query: {query}"""

_CONTEXT_MARKER = "CONTEXT information will be provided in the next sentence.\n"
_QUERY_MARKER = "\nHere is the user query: "


@dataclass(frozen=True)
class DecodeParams:
    temperature: float = 0.0
    top_k: int = 1


@dataclass
class GenerationRecord:
    answer_text: str
    generation_latency_s: float
    tokens_generated: int
    tokens_per_second: float
    model_id: str
    warnings: list[str] = field(default_factory=list)


def build_prompt(query: str, retrieved_context: RetrievedContext | list[str]) -> str:
    """Render the grounding template; empty context leaves an empty block."""
    if not query:
        raise ValueError("query must be non-empty")
    texts = (
        retrieved_context.texts()
        if isinstance(retrieved_context, RetrievedContext)
        else list(retrieved_context)
    )
    return PROMPT_TEMPLATE.format(similar_chunks="\n\n".join(texts), query=query)


def _context_block(prompt: str) -> str:
    start = prompt.index(_CONTEXT_MARKER) + len(_CONTEXT_MARKER)
    end = prompt.index(_QUERY_MARKER)
    return prompt[start:end]


class MockEchoProvider:
    """Deterministic mock: answers with the first sentence of the first chunk."""

    model_id = "mock-echo"

    def __init__(self, delay_s: float = 0.0):
        self.delay_s = delay_s

    def complete(self, prompt: str, params: DecodeParams) -> dict:
        if self.delay_s:
            time.sleep(self.delay_s)
        block = _context_block(prompt).strip()
        if not block:
            return {"text": "No relevant information provided"}
        first_chunk = block.split("\n\n")[0]
        for terminator in (". ", "? ", "! "):
            if terminator in first_chunk:
                first_chunk = first_chunk.split(terminator)[0] + terminator.strip()
                break
        return {"text": first_chunk}


class ScriptedProvider:
    """Fixture-driven mock: maps the extracted query to a scripted reply."""

    model_id = "mock-scripted"

    def __init__(self, replies: dict[str, str], default: str = "No relevant information provided",
                 delay_s: float = 0.0):
        self.replies = replies
        self.default = default
        self.delay_s = delay_s

    def complete(self, prompt: str, params: DecodeParams) -> dict:
        if self.delay_s:
            time.sleep(self.delay_s)
        query = prompt[prompt.index(_QUERY_MARKER) + len(_QUERY_MARKER):]
        return {"text": self.replies.get(query, self.default)}


class HTTPLLMProvider:
    """Adapter for a model-server completion route.

    Request: ``{"model": ..., "prompt": ..., "params": {...}}``
    Response: ``{"text": ..., "tokens": <optional int>}``
    """

    def __init__(self, model_id: str, endpoint: str, timeout_s: float = 120.0, retries: int = 1):
        self.model_id = model_id
        self.endpoint = endpoint
        self.timeout_s = timeout_s
        self.retries = retries

    def complete(self, prompt: str, params: DecodeParams) -> dict:
        import requests

        last_error = None
        for _ in range(self.retries + 1):
            try:
                response = requests.post(
                    self.endpoint,
                    json={
                        "model": self.model_id,
                        "prompt": prompt,
                        "params": {"temperature": params.temperature, "top_k": params.top_k},
                    },
                    timeout=self.timeout_s,
                )
                response.raise_for_status()
                body = response.json()
                return {"text": body["text"], "tokens": body.get("tokens")}
            except Exception as exc:  # noqa: BLE001 - transport boundary
                last_error = exc
        raise ProviderError(f"LLM provider unreachable: {last_error}", retries=self.retries)


def generate(provider, prompt: str, params: DecodeParams | None = None) -> GenerationRecord:
    """Run one completion, measuring wall-clock latency around the request.

    Token count prefers provider metadata; falls back to whitespace tokens of
    the answer.
    """
    params = params or DecodeParams()
    start = time.perf_counter()
    result = provider.complete(prompt, params)
    latency = time.perf_counter() - start
    answer = result["text"]
    tokens = result.get("tokens")
    if tokens is None:
        tokens = len(answer.split())
    tps = tokens / latency if latency > 0 else 0.0
    return GenerationRecord(
        answer_text=answer,
        generation_latency_s=latency,
        tokens_generated=tokens,
        tokens_per_second=tps,
        model_id=getattr(provider, "model_id", "unknown"),
    )
