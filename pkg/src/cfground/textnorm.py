"""Canonical text normalization: NFC, lowercase, single-space collapse.

Every place where caption text is compared, cache-keyed, or embedded goes
through :func:`normalize`, so "A  Dog" and "a dog" are the same key everywhere.
"""

import unicodedata

# Bumped whenever normalize() changes semantics; recorded in dataset manifests.
NORMALIZATION_VERSION = "nfc-lower-ws-1"


def normalize(text: str) -> str:
    """NFC-normalize, lowercase, and collapse runs of whitespace to one space."""
    return " ".join(unicodedata.normalize("NFC", text).lower().split())


def hash64(*parts: object) -> int:
    """Stable 64-bit hash of the given parts, for seeding and cache keys.

    Independent of PYTHONHASHSEED and platform; parts are joined with an
    unambiguous separator so ("ab", "c") and ("a", "bc") differ.
    """
    import hashlib

    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(str(part).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")
