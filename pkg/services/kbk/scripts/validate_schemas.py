"""Check that every run-output schema is valid Draft 2020-12 and that its $refs resolve."""

import json
import sys
from pathlib import Path

from jsonschema import Draft202012Validator, RefResolver

ROOT = Path(__file__).resolve().parents[3]
SCHEMAS = ROOT / "schemas"


def _refs(node) -> list[str]:
    if isinstance(node, dict):
        found = [node["$ref"]] if isinstance(node.get("$ref"), str) else []
        return found + [ref for value in node.values() for ref in _refs(value)]
    if isinstance(node, list):
        return [ref for value in node for ref in _refs(value)]
    return []


def main() -> int:
    paths = sorted(SCHEMAS.glob("kbk_*.schema.json"))
    schemas = {p.name: json.loads(p.read_text(encoding="utf-8")) for p in paths}
    store = {data["$id"]: data for data in schemas.values() if "$id" in data}
    for name, data in schemas.items():
        Draft202012Validator.check_schema(data)
        if not data.get("$id", "").endswith(name):
            raise ValueError(f"{name}: $id {data.get('$id')!r} does not match the file name")
        resolver = RefResolver.from_schema(data, store=store)
        for ref in _refs(data):
            resolver.resolve(ref)
    print(f"OK: validated {len(paths)} schemas")
    return len(paths)


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
