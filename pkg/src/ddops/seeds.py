"""Deterministic seed derivation.

A single global seed determines every derived stream: per-subdomain,
per-sample, per-phase seeds are hashed from the root seed plus string
labels, so results do not depend on scheduling or call order.
"""

import hashlib


def derive_seed(root: int, *labels) -> int:
    """Derive a 63-bit seed from a root seed and a label path."""
    h = hashlib.sha256()
    h.update(str(int(root)).encode())
    for label in labels:
        h.update(b"/")
        h.update(str(label).encode())
    return int.from_bytes(h.digest()[:8], "little") & 0x7FFFFFFFFFFFFFFF
