"""Canonical, byte-stable serialization for reports and data files.

JSON: sorted keys, two-space indent, rationals as "p/q" strings, enclosures
as {"lo","hi"} (or {"exact"}), no floats anywhere.  CSV: fixed column sets
per producer, '\n' line endings.  Identical inputs and tool version must
yield byte-identical bytes, so nothing time- or locale-dependent belongs
here.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
from fractions import Fraction

from .certify import Enclosure, format_rational, parse_rational
from .structures import UNIVERSE, InvalidInput


def to_jsonable(x):
    """Recursively convert report values to JSON-ready structures."""
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, float):
        raise TypeError("floats are banned from reports; use Fraction/Enclosure")
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, Enclosure):
        return x.to_json()
    if x is UNIVERSE:
        return "all"
    to_json = getattr(x, "to_json", None)
    if callable(to_json):
        return to_jsonable(to_json())
    if dataclasses.is_dataclass(x):
        return {f.name: to_jsonable(getattr(x, f.name))
                for f in dataclasses.fields(x)}
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        items = [to_jsonable(v) for v in x]
        return sorted(items, key=lambda v: json.dumps(v, sort_keys=True))
    raise TypeError(f"cannot serialize {type(x).__name__}: {x!r}")


def canonical_json(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2,
                      ensure_ascii=True) + "\n"


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def _read_csv_rows(path: str):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if rows and not rows[0][0].strip().lstrip("-").isdigit():
        rows = rows[1:]  # header line
    return rows


def load_sequence_csv(path: str):
    """Sequence CSV (columns: index, numerator, denominator) -> PrefixSequence."""
    from .sequences import PrefixSequence
    return PrefixSequence.from_csv_rows(_read_csv_rows(path))


def load_vector_csv(path: str):
    """Same columns as the sequence CSV, but entries are arbitrary rationals;
    returns the list [v_1..v_N] (indices must be 1..N without gaps)."""
    rows = _read_csv_rows(path)
    vals = {}
    for row in rows:
        try:
            n, num, den = int(row[0]), int(row[1]), int(row[2])
        except (ValueError, IndexError) as exc:
            raise InvalidInput(f"bad vector CSV row {row!r}") from exc
        if den == 0:
            raise InvalidInput(f"zero denominator at index {n}")
        vals[n] = Fraction(num, den)
    if sorted(vals) != list(range(1, len(vals) + 1)):
        raise InvalidInput("vector CSV indices must be 1..N without gaps")
    return [vals[n] for n in range(1, len(vals) + 1)]


def sequence_csv_text(seq) -> str:
    return write_csv(["index", "numerator", "denominator"], seq.to_csv_rows())


def load_json_file(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: JSON parse error at line {exc.lineno}, "
                           f"column {exc.colno}: {exc.msg}") from exc


def load_spec(path: str, kind: str = "auto", structure=None):
    """Load a structure / weight / element / sequence file.

    kind: "structure" | "weight" | "element" | "sequence" | "vector" | "auto".
    Elements need the owning structure.  With kind="auto" the file content
    decides: CSV -> sequence, {"terms": ...} -> element, a weight family ->
    weight, otherwise structure.
    """
    from .structures import structure_from_spec
    from .weights import WEIGHT_FAMILIES, weight_from_spec
    if kind == "sequence" or (kind == "auto" and path.endswith(".csv")):
        return load_sequence_csv(path)
    if kind == "vector":
        return load_vector_csv(path)
    obj = load_json_file(path)
    if kind == "auto":
        if isinstance(obj, dict) and "terms" in obj:
            kind = "element"
        elif isinstance(obj, dict) and obj.get("family") in WEIGHT_FAMILIES:
            kind = "weight"
        else:
            kind = "structure"
    if kind == "structure":
        return structure_from_spec(obj)
    if kind == "weight":
        return weight_from_spec(obj)
    if kind == "element":
        if structure is None:
            raise InvalidInput("an element file needs its structure")
        from .algebra import Element
        return Element.from_json(structure, obj)
    raise InvalidInput(f"unknown spec kind {kind!r}")


def parse_rational_text(text: str) -> Fraction:
    return parse_rational(text)
