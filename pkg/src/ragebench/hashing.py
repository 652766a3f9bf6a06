"""Portable 64-bit FNV-1a hash, pinned constants.

Used for combination ids and the reference embedder's token buckets so that
golden files reproduce across languages and platforms.
"""

FNV_OFFSET_BASIS = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK = 0xFFFFFFFFFFFFFFFF


def fnv1a_64(data: bytes) -> int:
    h = FNV_OFFSET_BASIS
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & _MASK
    return h


def fnv1a_64_text(text: str) -> int:
    return fnv1a_64(text.encode("utf-8"))
