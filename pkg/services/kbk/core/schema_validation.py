"""JSON Schema checks for the records a run writes (run, fit and batch summaries)."""

import json
from functools import lru_cache
from pathlib import Path

from jsonschema import Draft202012Validator, RefResolver

ROOT = Path(__file__).resolve().parents[3]
SCHEMAS = ROOT / "schemas"
SCHEMA_GLOB = "kbk_*.schema.json"


@lru_cache(maxsize=1)
def schema_store() -> dict[str, dict]:
    """Every run-output schema, keyed by both its $id and its file URI."""
    store: dict[str, dict] = {}
    for path in sorted(SCHEMAS.glob(SCHEMA_GLOB)):
        data = json.loads(path.read_text(encoding="utf-8"))
        if "$id" in data:
            store[data["$id"]] = data
        store[path.as_uri()] = data
    return store


@lru_cache(maxsize=None)
def validator_for(schema_filename: str) -> Draft202012Validator:
    schema = schema_store().get((SCHEMAS / schema_filename).as_uri())
    if schema is None:
        raise ValueError(f"Schema not found: {schema_filename}")
    resolver = RefResolver.from_schema(schema, store=schema_store())
    return Draft202012Validator(schema, resolver=resolver)


def validate_schema(instance: dict, schema_filename: str) -> None:
    """Validate a record about to be written; raises ValueError if it does not conform."""
    errors = sorted(validator_for(schema_filename).iter_errors(instance),
                    key=lambda e: list(e.path))
    if errors:
        first = errors[0]
        location = "/".join(str(p) for p in first.path) or "<root>"
        raise ValueError(f"{schema_filename}: {location}: {first.message}")
