"""Scenario endpoints: defaults lookup, synchronous runs and batches."""

from typing import Any, Dict, List

from fastapi import APIRouter, HTTPException, status
from pydantic import BaseModel, Field

from services.kbk.core.scenario_config import ScenarioConfig
from services.kbk.core.scenario_runner import run_batch, run_scenario

router = APIRouter()


class RunScenarioRequest(BaseModel):
    """A scenario name plus field overrides (flag or field names)."""
    scenario: str
    overrides: Dict[str, Any] = Field(default_factory=dict)


class RunBatchRequest(BaseModel):
    runs: List[RunScenarioRequest]
    workers: int | None = Field(default=None, ge=1)


def _config(request: RunScenarioRequest) -> ScenarioConfig:
    return ScenarioConfig.for_scenario(request.scenario, **request.overrides)


@router.get("/defaults/{scenario}")
def scenario_defaults(scenario: str):
    try:
        return ScenarioConfig.for_scenario(scenario).model_dump(mode="json", by_alias=True)
    except ValueError as e:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(e)) from e


@router.post("/run")
def run_scenario_endpoint(request: RunScenarioRequest):
    """
    Run one scenario to completion and return its run summary.

    Blow-up and under-resolution are reported in the summary's status,
    not as HTTP errors.
    """
    try:
        return run_scenario(_config(request)).summary
    except ValueError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e)) from e
    except Exception as e:
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"Scenario run failed: {str(e)}",
        ) from e


@router.post("/batch")
def run_batch_endpoint(request: RunBatchRequest):
    try:
        rows = run_batch([_config(run) for run in request.runs], workers=request.workers)
        return {"rows": [row.as_dict() for row in rows]}
    except ValueError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e)) from e
    except Exception as e:
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"Batch run failed: {str(e)}",
        ) from e
