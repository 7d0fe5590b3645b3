"""Injective string encodings for identifiers of constructed objects.

Constructions (products, commas, inserters, renamings) need fresh identifiers
built from the identifiers of their parts. Equality stays plain string
equality, so the encodings must be injective.
"""

from __future__ import annotations

from collections.abc import Mapping

_SPECIAL = "\\,<>"


def _escape(part: str) -> str:
    out = []
    for ch in part:
        if ch in _SPECIAL:
            out.append("\\")
        out.append(ch)
    return "".join(out)


def enc(*parts: str) -> str:
    """Encode a tuple of identifiers as ``<p1,p2,...>`` with escaping."""
    return "<" + ",".join(_escape(p) for p in parts) + ">"


def enc_map(mapping: Mapping[str, str]) -> str:
    """Encode a finite function, independent of dict insertion order."""
    return enc(*(enc(k, v) for k, v in sorted(mapping.items())))


def tag(index: int, element: str) -> str:
    """Tag an element with a coproduct index; the first ':' separates."""
    return f"{index}:{element}"


def untag(element: str) -> tuple[int, str]:
    head, _, rest = element.partition(":")
    return int(head), rest


def fresh(base: str, taken: set[str]) -> str:
    name = base
    while name in taken:
        name += "'"
    return name
