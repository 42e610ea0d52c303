"""JSON poset documents and Graphviz DOT export.

Document schema::

    {"name": str, "elements": [str, ...], "covers": [[lower, upper], ...],
     "metadata": {...}}            # metadata optional

``covers`` may contain redundant comparabilities; emitted documents always
carry the Hasse diagram in element order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

from .core import Poset, PosetError, build_poset, rank_structure

__all__ = [
    "PosetFormatError",
    "PosetDocument",
    "parse_poset",
    "emit_poset",
    "poset_document",
    "document_from_poset",
    "load_poset",
    "iter_documents",
    "emit_dot",
]


class PosetFormatError(ValueError):
    pass


@dataclass
class PosetDocument:
    name: str
    elements: list[str]
    covers: list[tuple[str, str]]
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_poset(self) -> Poset:
        try:
            return build_poset(self.elements, self.covers)
        except PosetError as exc:
            raise PosetFormatError(f"document {self.name!r}: {exc}") from exc

    def canonical(self) -> "PosetDocument":
        """Same order, covers replaced by the Hasse diagram in element order."""
        return document_from_poset(self.to_poset(), self.name, self.metadata)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "name": self.name,
            "elements": list(self.elements),
            "covers": [list(c) for c in self.covers],
        }
        if self.metadata:
            out["metadata"] = self.metadata
        return out


def document_from_poset(p: Poset, name: str = "poset", metadata: dict | None = None) -> PosetDocument:
    covers = [(p.labels[a], p.labels[b]) for a, b in p.covers]
    return PosetDocument(name, list(p.labels), covers, dict(metadata or {}))


def poset_document(p: Poset, name: str = "poset", metadata: dict | None = None) -> dict:
    return document_from_poset(p, name, metadata).to_dict()


def _from_obj(obj: Any, where: str = "document") -> PosetDocument:
    if not isinstance(obj, dict):
        raise PosetFormatError(f"{where}: expected a JSON object")
    for key in ("elements", "covers"):
        if key not in obj:
            raise PosetFormatError(f"{where}: missing field {key!r}")
    name = obj.get("name", "poset")
    if not isinstance(name, str):
        raise PosetFormatError(f"{where}: field 'name' must be a string")
    elements = obj["elements"]
    if not isinstance(elements, list) or not all(isinstance(e, str) for e in elements):
        raise PosetFormatError(f"{where}: field 'elements' must be a list of strings")
    seen = set()
    for k, e in enumerate(elements):
        if e in seen:
            raise PosetFormatError(f"{where}: elements[{k}] duplicates {e!r}")
        seen.add(e)
    covers = obj["covers"]
    if not isinstance(covers, list):
        raise PosetFormatError(f"{where}: field 'covers' must be a list")
    pairs = []
    for k, c in enumerate(covers):
        if not (isinstance(c, list) and len(c) == 2 and all(isinstance(x, str) for x in c)):
            raise PosetFormatError(f"{where}: covers[{k}] must be a pair of element names")
        for x in c:
            if x not in seen:
                raise PosetFormatError(f"{where}: covers[{k}] references unknown element {x!r}")
        pairs.append((c[0], c[1]))
    meta = obj.get("metadata", {})
    if not isinstance(meta, dict):
        raise PosetFormatError(f"{where}: field 'metadata' must be an object")
    return PosetDocument(name, list(elements), pairs, meta)


def parse_poset(text: str) -> PosetDocument:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PosetFormatError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return _from_obj(obj)


def emit_poset(doc: PosetDocument | Poset, name: str = "poset") -> str:
    if isinstance(doc, Poset):
        doc = document_from_poset(doc, name)
    return json.dumps(doc.to_dict(), indent=None, separators=(", ", ": "))


def iter_documents(text: str) -> Iterable[PosetDocument]:
    """Documents from a single JSON object, a JSON array, or JSON Lines."""
    stripped = text.strip()
    if not stripped:
        return
    try:
        obj = json.loads(stripped)
    except json.JSONDecodeError:
        for lineno, line in enumerate(text.splitlines(), 1):
            if line.strip():
                try:
                    yield _from_obj(json.loads(line), f"line {lineno}")
                except json.JSONDecodeError as exc:
                    raise PosetFormatError(f"malformed JSON at line {lineno}: {exc.msg}") from None
        return
    if isinstance(obj, list):
        for k, item in enumerate(obj):
            yield _from_obj(item, f"item {k}")
    else:
        yield _from_obj(obj)


def load_poset(path: str) -> Poset:
    with open(path) as fh:
        return parse_poset(fh.read()).to_poset()


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(p: Poset, name: str = "P") -> str:
    """Hasse diagram as a DOT digraph, edges pointing from lower to upper cover."""
    lines = [f"digraph {_quote(name)} {{", "  rankdir=BT;", "  node [shape=circle];"]
    for lab in p.labels:
        lines.append(f"  {_quote(lab)};")
    if len(p):
        rs = rank_structure(p)
        if rs.is_ranked:
            for lv in rs.levels:
                members = " ".join(_quote(p.labels[e]) + ";" for e in lv)
                lines.append(f"  {{ rank=same; {members} }}")
    for a, b in p.covers:
        lines.append(f"  {_quote(p.labels[a])} -> {_quote(p.labels[b])};")
    lines.append("}")
    return "\n".join(lines) + "\n"
