"""Recursive character splitter with overlapping chunks.

Algorithm, pinned for bit-exact reproducibility:

1. Find the first separator in the list that occurs in the text (the empty
   string, required last, always matches and splits into single characters).
2. Split on it, keeping the separator attached to the preceding piece.
3. Any piece longer than chunk_size (net of its attached trailing separator)
   is recursively split with the remaining separator list.
4. Consecutive pieces merge greedily while the merged length stays within
   chunk_size.
5. Each emitted chunk after the first is prefixed with the final
   chunk_overlap characters of its predecessor, clamped at piece boundaries.

Emitted chunk text drops the trailing attached separator and any trailing
whitespace; whitespace-only chunks are dropped. Consequently every
non-whitespace character of the source is covered by some chunk span.
"""

from __future__ import annotations

from dataclasses import dataclass, field

DEFAULT_SEPARATORS = ("\n\n", "\n", " ", "")


@dataclass(frozen=True)
class ChunkingParams:
    chunk_size: int
    chunk_overlap: int
    separators: tuple[str, ...] = DEFAULT_SEPARATORS

    def __post_init__(self):
        if self.chunk_size <= 0:
            raise ValueError("chunk_size must be positive")
        if self.chunk_overlap < 0:
            raise ValueError("chunk_overlap must be non-negative")
        if self.chunk_overlap >= self.chunk_size:
            raise ValueError("chunk_overlap must be < chunk_size")
        if not self.separators or self.separators[-1] != "":
            raise ValueError("separator list must end with the empty string")


@dataclass(frozen=True)
class Chunk:
    text: str
    source_id: str
    ordinal: int
    char_start: int
    char_end: int

    @property
    def chunk_id(self) -> str:
        return f"{self.source_id}#{self.ordinal}"


@dataclass(frozen=True)
class _Piece:
    text: str
    start: int
    sep_len: int  # length of the attached trailing separator (0 if none)

    @property
    def content_len(self) -> int:
        return len(self.text) - self.sep_len


def _split_pieces(
    text: str, start: int, separators: tuple[str, ...], trailing_sep_len: int, chunk_size: int
) -> list[_Piece]:
    """Split text into pieces each no longer than chunk_size net of separator."""
    sep_index = 0
    while sep_index < len(separators) - 1 and separators[sep_index] not in text:
        sep_index += 1
    sep = separators[sep_index]
    remaining = separators[sep_index + 1 :]

    if sep == "":
        pieces = []
        for i, ch in enumerate(text):
            is_last = i == len(text) - 1
            pieces.append(_Piece(ch, start + i, 1 if is_last and trailing_sep_len else 0))
        return pieces

    parts = text.split(sep)
    raw_pieces: list[tuple[str, int, int]] = []  # (piece text, start, sep_len)
    offset = start
    for i, part in enumerate(parts):
        is_last = i == len(parts) - 1
        piece_text = part if is_last else part + sep
        sep_len = trailing_sep_len if is_last else len(sep)
        if piece_text:
            raw_pieces.append((piece_text, offset, sep_len))
        offset += len(piece_text)

    pieces: list[_Piece] = []
    for piece_text, piece_start, sep_len in raw_pieces:
        if len(piece_text) - sep_len > chunk_size:
            pieces.extend(_split_pieces(piece_text, piece_start, remaining, sep_len, chunk_size))
        else:
            pieces.append(_Piece(piece_text, piece_start, sep_len))
    return pieces


def _merged_len(window: list[_Piece], extra: _Piece | None = None) -> int:
    pieces = window + [extra] if extra is not None else window
    if not pieces:
        return 0
    return sum(len(p.text) for p in pieces) - pieces[-1].sep_len


def split_document(text: str, params: ChunkingParams, source_id: str = "") -> list[Chunk]:
    """Split a document into overlapping chunks per the pinned algorithm."""
    if not text:
        raise ValueError("text must be non-empty")

    pieces = _split_pieces(text, 0, tuple(params.separators), 0, params.chunk_size)

    spans: list[tuple[str, int]] = []  # (chunk text, char_start)

    def emit(window: list[_Piece]) -> None:
        raw = "".join(p.text for p in window)
        if window[-1].sep_len:
            raw = raw[: len(raw) - window[-1].sep_len]
        stripped = raw.rstrip()
        if not stripped:
            return
        start = window[0].start
        end = start + len(stripped)
        if spans and end <= spans[-1][1] + len(spans[-1][0]):
            return  # pure-overlap tail, adds no new characters
        spans.append((stripped, start))

    window: list[_Piece] = []
    for piece in pieces:
        if window and _merged_len(window, piece) > params.chunk_size:
            emit(window)
            while window and sum(len(p.text) for p in window) > params.chunk_overlap:
                window.pop(0)
            while window and _merged_len(window, piece) > params.chunk_size:
                window.pop(0)
        window.append(piece)
    if window:
        emit(window)

    return [
        Chunk(text=t, source_id=source_id, ordinal=i, char_start=s, char_end=s + len(t))
        for i, (t, s) in enumerate(spans)
    ]
