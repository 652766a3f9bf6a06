"""Generates tests/data/prompt_golden.txt: a fixed render of the grounding template.

The template text is typed out here independently of the package so the
committed golden detects any accidental edit to the shipped template.

Run from the repo root: python3 scripts/make_prompt_golden.py
"""

from pathlib import Path

TEMPLATE = (
    "You are a professional assistant for answering questions.\n"
    "Your task is to summarize the topic using\n"
    "information from a given CONTEXT\n"
    "You will receive CONTEXT information\n"
    "and a user QUERY. Keep your answer grounded in\n"
    "the facts of the CONTEXT.\n"
    "You have to be as concise as possible,\n"
    "while still answering the user's query.\n"
    "If the CONTEXT doesn’t contain the facts to\n"
    "answer the QUERY, return No relevant information provided.\n"
    "Answer the users QUERY using the CONTEXT.\n"
    "CONTEXT information will be provided in the next sentence.\n"
    "{similar_chunks}\n"
    "Here is the user query: {query}"
)

CHUNKS = [
    "Granite is a coarse-grained igneous rock formed from slowly cooling magma.",
    "Basalt, in contrast, cools quickly and is fine-grained.",
]
QUERY = "What is granite?"


def main():
    rendered = TEMPLATE.format(similar_chunks="\n\n".join(CHUNKS), query=QUERY)
    path = Path(__file__).resolve().parents[1] / "tests" / "data" / "prompt_golden.txt"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(rendered, encoding="utf-8")
    print(f"wrote {path} ({len(rendered)} chars)")


if __name__ == "__main__":
    main()
