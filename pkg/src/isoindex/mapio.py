"""Reading and writing skew-symmetric maps as canonical JSON.

Schema::

    {"dim_l": n, "dim_v": m, "gram": [[[entry, ...], ...], ...], "ring": "Q" | "Z" | "GF(p)" | "GF(p,k)"}

Rational entries are ``"a/b"`` strings (``"3"`` for integers); all other
rings use plain integers.  :func:`dumps` writes keys sorted on one line, so
``dumps(loads(text)) == text`` for canonical input.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .exactalg import RingError, RingSpec
from .skewmap import SkewBilinearMap

__all__ = ["SchemaError", "loads", "dumps", "load", "dump", "to_document", "from_document"]

_KEYS = {"ring", "dim_l", "dim_v", "gram"}


class SchemaError(ValueError):
    def __init__(self, field: str, msg: str):
        super().__init__(f"{field}: {msg}")
        self.field = field


def _entry(ring: RingSpec, x, where: str):
    if ring.kind == "Q":
        if isinstance(x, bool) or not isinstance(x, (str, int)):
            raise SchemaError(where, f"expected an 'a/b' string, got {x!r}")
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError):
            raise SchemaError(where, f"not a rational number: {x!r}") from None
    if isinstance(x, bool) or not isinstance(x, int):
        raise SchemaError(where, f"expected an integer, got {x!r}")
    try:
        return ring.coerce(x)
    except RingError as exc:
        raise SchemaError(where, str(exc)) from None


def _count(doc: dict, key: str) -> int:
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise SchemaError(key, f"expected a non-negative integer, got {v!r}")
    return v


def from_document(doc) -> SkewBilinearMap:
    if not isinstance(doc, dict):
        raise SchemaError("<root>", "expected a JSON object")
    missing = _KEYS - doc.keys()
    if missing:
        raise SchemaError(sorted(missing)[0], "missing field")
    extra = doc.keys() - _KEYS
    if extra:
        raise SchemaError(sorted(extra)[0], "unknown field")
    if not isinstance(doc["ring"], str):
        raise SchemaError("ring", "expected a string")
    try:
        ring = RingSpec.parse(doc["ring"])
    except (RingError, ValueError) as exc:
        raise SchemaError("ring", str(exc)) from None
    n, m = _count(doc, "dim_l"), _count(doc, "dim_v")
    gram = doc["gram"]
    if not isinstance(gram, list) or len(gram) != m:
        raise SchemaError("gram", f"expected a list of {m} matrices")
    out = []
    for t, G in enumerate(gram):
        if not isinstance(G, list) or len(G) != n:
            raise SchemaError(f"gram[{t}]", f"expected {n} rows")
        rows = []
        for i, r in enumerate(G):
            if not isinstance(r, list) or len(r) != n:
                raise SchemaError(f"gram[{t}][{i}]", f"expected {n} entries")
            rows.append(tuple(_entry(ring, x, f"gram[{t}][{i}][{j}]") for j, x in enumerate(r)))
        out.append(tuple(rows))
    return SkewBilinearMap(ring, n, m, tuple(out))


def to_document(phi: SkewBilinearMap) -> dict:
    fmt = str if phi.ring.kind == "Q" else int
    return {
        "ring": str(phi.ring),
        "dim_l": phi.dim_l,
        "dim_v": phi.dim_v,
        "gram": [[[fmt(x) for x in r] for r in G] for G in phi.gram],
    }


def loads(text: str) -> SkewBilinearMap:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("<root>", f"invalid JSON: {exc}") from None
    return from_document(doc)


def dumps(phi: SkewBilinearMap) -> str:
    return json.dumps(to_document(phi), sort_keys=True) + "\n"


def load(path) -> SkewBilinearMap:
    return loads(Path(path).read_text())


def dump(phi: SkewBilinearMap, path) -> None:
    Path(path).write_text(dumps(phi))
