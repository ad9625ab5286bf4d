"""Scenario configuration: defaults per experiment, config files, fingerprints."""

import hashlib
import json
import logging
import re
from pathlib import Path
from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from services.kbk.core.config import settings
from services.kbk.core.spectral_grid import MIN_NODES

logger = logging.getLogger(__name__)

ScenarioName = Literal[
    "soliton-test",
    "perturbed-soliton",
    "stationary-perturbed",
    "gaussian-v",
    "gaussian-eta",
    "dsw",
    "custom",
]
InitialKind = Literal["soliton", "perturbed-soliton", "stationary", "gaussian-v", "gaussian-eta"]

SOLITON_SCENARIOS = {"soliton-test", "perturbed-soliton", "stationary-perturbed"}
LOCALIZED_SCENARIOS = {"gaussian-v", "gaussian-eta"}

# Left half of the torus: the localized data shed a left-moving soliton.
LEFT_HALF = "left"

SCENARIO_DEFAULTS: dict[str, dict[str, Any]] = {
    "soliton-test": {"L": 15.0, "N": 2**11, "Nt": 4000, "T": 1.0, "C": 0.8},
    "perturbed-soliton": {"L": 30.0, "N": 2**12, "Nt": 4000, "T": 5.0, "C": 0.8,
                          "lam": 1.01, "mu": 1.0},
    "stationary-perturbed": {"L": 30.0, "N": 2**12, "Nt": 4000, "T": 5.0, "C": 0.0,
                             "lam": 1.0, "mu": 1.01},
    "gaussian-v": {"L": 30.0, "N": 2**12, "Nt": 4000, "T": 5.0, "A": 3.0,
                   "fit_search": LEFT_HALF, "fit_window": 3.0},
    "gaussian-eta": {"L": 30.0, "N": 2**12, "Nt": 4000, "T": 8.0, "A": -3.0,
                     "fit_search": LEFT_HALF},
    "dsw": {"L": 3.0, "N": 2**14, "Nt": 10_000, "T": 3.0, "eps": 0.1, "A": 1.0,
            "dsw_bump": "eta"},
    "custom": {"L": 30.0, "N": 2**12, "Nt": 4000, "T": 5.0},
}

# Flag names accepted in config files alongside field names.
KEY_ALIASES = {"snapshots": "snapshot_count", "out": "output_dir", "lambda": "lam"}

_POWER_OF_TWO = re.compile(r"^\s*2\s*\^\s*(\d+)\s*$")


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    scenario: ScenarioName
    L: float = Field(gt=0.0)
    N: int
    T: float = Field(gt=0.0)
    Nt: int = Field(ge=1)
    C: float = 0.8
    x0: float = 0.0
    lam: float = Field(default=1.0, alias="lambda")
    mu: float = 1.0
    A: float = 3.0
    eps: float = Field(default=1.0, gt=0.0)
    snapshot_count: int = Field(default=11, ge=1)
    waterfall_count: int = Field(default=51, ge=2)
    dealias: bool = False
    output_dir: str = settings.output_dir
    initial: Optional[InitialKind] = None
    dsw_bump: Literal["eta", "v"] = "eta"
    diagnostics_every: Optional[int] = Field(default=None, ge=1)
    fit_window: float = Field(default=5.0, gt=0.0)
    fit_search: Optional[tuple[float, float] | Literal["left"]] = None

    @field_validator("N")
    @classmethod
    def _power_of_two(cls, value: int) -> int:
        if value < MIN_NODES or value & (value - 1):
            raise ValueError(f"N must be a power of two >= {MIN_NODES}, got {value}")
        return value

    @model_validator(mode="after")
    def _consistent(self) -> "ScenarioConfig":
        if self.scenario == "custom" and self.initial is None:
            raise ValueError("custom scenario requires 'initial'")
        if self.scenario != "custom" and self.initial is not None:
            raise ValueError(f"'initial' is only valid for custom scenarios, not {self.scenario}")
        if self.uses_soliton and not abs(self.C) < 1.0:
            raise ValueError(f"Soliton velocity must satisfy |C| < 1, got {self.C}")
        if isinstance(self.fit_search, tuple) and not self.fit_search[0] < self.fit_search[1]:
            raise ValueError(f"fit_search must be an increasing interval, got {self.fit_search}")
        return self

    @classmethod
    def for_scenario(cls, name: str, **overrides: Any) -> "ScenarioConfig":
        """Scenario defaults with ``overrides`` applied on top."""
        if name not in SCENARIO_DEFAULTS:
            raise ValueError(f"Unknown scenario: {name!r}")
        values = {**SCENARIO_DEFAULTS[name], **_normalize_keys(overrides)}
        values["scenario"] = name
        return cls(**values)

    @property
    def initial_kind(self) -> str:
        """The initial-data family, resolving custom scenarios."""
        if self.scenario == "custom":
            return str(self.initial)
        return {
            "soliton-test": "soliton",
            "perturbed-soliton": "perturbed-soliton",
            "stationary-perturbed": "stationary",
            "gaussian-v": "gaussian-v",
            "gaussian-eta": "gaussian-eta",
            "dsw": "gaussian-eta" if self.dsw_bump == "eta" else "gaussian-v",
        }[self.scenario]

    @property
    def uses_soliton(self) -> bool:
        return self.initial_kind in ("soliton", "perturbed-soliton")

    @property
    def fits_soliton(self) -> bool:
        return self.initial_kind in ("soliton", "perturbed-soliton", "stationary") or (
            self.scenario in LOCALIZED_SCENARIOS or self.fit_search is not None
        )

    @property
    def diagnostics_stride(self) -> int:
        return self.diagnostics_every or max(1, self.Nt // 200)

    @property
    def search_interval(self) -> tuple[float, float] | None:
        if self.fit_search == LEFT_HALF:
            return (-np.pi * self.L, 0.0)
        return self.fit_search  # type: ignore[return-value]

    def canonical(self) -> dict[str, Any]:
        """JSON-ready values excluding the output location."""
        return self.model_dump(mode="json", exclude={"output_dir"})

    def fingerprint(self) -> str:
        payload = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]

    def run_dirname(self) -> str:
        return f"{self.scenario}-{self.fingerprint()}"


def _normalize_keys(values: dict[str, Any]) -> dict[str, Any]:
    return {KEY_ALIASES.get(key, key): value for key, value in values.items()}


def _coerce(key: str, raw: str) -> Any:
    match = _POWER_OF_TWO.match(raw)
    if match:
        return 2 ** int(match.group(1))
    if key == "fit_search" and "," in raw:
        lo, hi = (part.strip() for part in raw.split(",", 1))
        return (float(lo), float(hi))
    return raw.strip()


def parse_config_text(text: str) -> list[dict[str, Any]]:
    """key=value blocks separated by blank lines; '#' starts a comment."""
    blocks: list[dict[str, Any]] = []
    current: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            if not line.strip() and current:
                blocks.append(current)
                current = {}
            continue
        if "=" not in content:
            raise ValueError(f"Line {lineno}: expected key=value, got {content!r}")
        key, raw = (part.strip() for part in content.split("=", 1))
        key = KEY_ALIASES.get(key.lstrip("-"), key.lstrip("-"))
        if key in current:
            raise ValueError(f"Line {lineno}: duplicate key {key!r}")
        current[key] = _coerce(key, raw)
    if current:
        blocks.append(current)
    return blocks


def load_config_file(path: str | Path) -> list[dict[str, Any]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"Cannot read config file {path}: {exc}") from exc
    blocks = parse_config_text(text)
    if not blocks:
        raise ValueError(f"Config file {path} holds no scenarios")
    logger.debug("Loaded %d config block(s) from %s", len(blocks), path)
    return blocks


def build_config(file_values: dict[str, Any] | None = None,
                 flag_values: dict[str, Any] | None = None) -> ScenarioConfig:
    """Merge file values with command-line flags (flags win) over scenario defaults."""
    merged = {**_normalize_keys(file_values or {}),
              **{k: v for k, v in _normalize_keys(flag_values or {}).items() if v is not None}}
    name = merged.pop("scenario", None)
    if name is None:
        raise ValueError("No scenario given")
    return ScenarioConfig.for_scenario(str(name), **merged)
