"""Scenario execution: initial data, evolution, diagnostics and run outputs.

A run is deterministic: its data files depend only on the configuration
(``run_summary.json`` also records wall time). Batches run configurations
independently, optionally in worker processes.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from services.kbk.core.config import settings
from services.kbk.core.convergence import self_convergence_slope
from services.kbk.core.diagnostics import (
    DiagnosticsRecord,
    SolitonFit,
    SolitonFitError,
    diagnostics_record,
    dft_tail,
    energy,
    fit_soliton,
    is_resolved,
    min_depth,
)
from services.kbk.core.dsw_fronts import FrontCounts, front_oscillation_counts, oscillation_wavelength
from services.kbk.core.etd_integrator import BlowUpError, evolve
from services.kbk.core.exact_solutions import (
    SolitonParams,
    gaussian_data,
    good_soliton,
    perturbed_soliton,
    rescaled_soliton,
    stationary_solution,
)
from services.kbk.core.kbk_dynamics import ModelParams, State
from services.kbk.core.run_outputs import (
    OutputError,
    prepare_run_dir,
    write_csv,
    write_densities,
    write_diagnostics,
    write_json,
    write_snapshot,
    write_soliton_error,
    write_waterfall,
)
from services.kbk.core.scenario_config import ScenarioConfig
from services.kbk.core.spectral_grid import Grid, build_grid

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_OUTPUT = 3
EXIT_BLOWUP = 4
EXIT_UNRESOLVED = 5

UNRESOLVED_TAIL = 1e-6
DEALIAS_FRACTION = 2.0 / 3.0
WATERFALL_COLUMNS = 1024
MIN_CONVERGENCE_RUNS = 3

BATCH_COLUMNS = [
    "index", "scenario", "fingerprint", "status", "exit_code", "final_delta", "max_tail",
    "C_fit", "residual", "wall_time_s", "convergence_slope", "error",
]


@dataclass
class RunResult:
    config: ScenarioConfig
    status: str
    exit_code: int
    run_dir: Path
    final_state: Optional[State]
    records: list[DiagnosticsRecord]
    fit: Optional[SolitonFit] = None
    soliton_error: Optional[tuple[float, float]] = None
    fronts: Optional[FrontCounts] = None
    wavelength: Optional[float] = None
    summary: dict[str, Any] = field(default_factory=dict)


@dataclass
class BatchRow:
    index: int
    scenario: str
    fingerprint: str
    status: str
    exit_code: int
    final_delta: Optional[float] = None
    max_tail: Optional[float] = None
    C_fit: Optional[float] = None
    residual: Optional[float] = None
    wall_time_s: Optional[float] = None
    convergence_slope: Optional[float] = None
    error: Optional[str] = None

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def _soliton_state(cfg: ScenarioConfig, grid: Grid, C: float, t: float) -> State:
    if cfg.eps == 1.0:
        return good_soliton(SolitonParams(C=C, x0=cfg.x0), t, grid)
    return rescaled_soliton(C, cfg.x0, cfg.eps, t, grid)


def build_initial_state(cfg: ScenarioConfig, grid: Grid) -> State:
    kind = cfg.initial_kind
    if kind == "soliton":
        return _soliton_state(cfg, grid, cfg.C, 0.0)
    if kind == "perturbed-soliton":
        if cfg.eps == 1.0:
            return perturbed_soliton(SolitonParams(C=cfg.C, x0=cfg.x0), cfg.lam, cfg.mu, grid)
        base = _soliton_state(cfg, grid, cfg.C, 0.0)
        return State(grid, cfg.mu * base.eta, cfg.lam * base.v)
    if kind == "stationary":
        if cfg.eps == 1.0:
            base = stationary_solution(1.0, grid)
        else:
            base = rescaled_soliton(0.0, 0.0, cfg.eps, 0.0, grid)
        return State(grid, cfg.mu * base.eta, cfg.lam * base.v)
    if kind == "gaussian-v":
        return gaussian_data("v-bump", cfg.A, grid)
    if kind == "gaussian-eta":
        return gaussian_data("eta-bump", cfg.A, grid)
    raise ValueError(f"Unknown initial data: {kind!r}")


def exact_solution(cfg: ScenarioConfig, grid: Grid, t: float) -> State:
    if cfg.initial_kind != "soliton":
        raise ValueError(f"No exact solution for {cfg.initial_kind} data")
    return _soliton_state(cfg, grid, cfg.C, t)


def _equispaced_steps(Nt: int, count: int) -> list[int]:
    if count == 1:
        return [Nt]
    return sorted({int(round(i * Nt / (count - 1))) for i in range(count)})


def _record_dict(record: DiagnosticsRecord) -> dict[str, float]:
    return {
        "t": record.t, "E": record.E, "delta": record.delta, "H0": record.H0, "I3": record.I3,
        "mass_eta": record.mass_eta, "mass_v": record.mass_v, "tail": record.tail,
        "min_depth": record.min_depth,
    }


def run_scenario(cfg: ScenarioConfig, output_dir: str | Path | None = None) -> RunResult:
    """Run one scenario and write its directory; blow-up and poor resolution set the exit code."""
    started = time.perf_counter()
    run_dir = prepare_run_dir(output_dir or cfg.output_dir, cfg.run_dirname())
    grid = build_grid(cfg.L, cfg.N)
    params = ModelParams(eps=cfg.eps, dealias_fraction=DEALIAS_FRACTION if cfg.dealias else 1.0)
    state0 = build_initial_state(cfg, grid)
    echo = cfg.canonical()
    logger.info("Scenario %s (%s): L=%s N=%d T=%s Nt=%d eps=%s",
                cfg.scenario, cfg.fingerprint(), cfg.L, cfg.N, cfg.T, cfg.Nt, cfg.eps)

    snapshot_steps = _equispaced_steps(cfg.Nt, cfg.snapshot_count)
    snapshot_index = {n: i for i, n in enumerate(snapshot_steps)}
    waterfall_steps = set(_equispaced_steps(cfg.Nt, cfg.waterfall_count))
    stride = cfg.diagnostics_stride
    columns = slice(None, None, max(1, cfg.N // WATERFALL_COLUMNS))
    E0 = energy(state0, cfg.eps)

    records: list[DiagnosticsRecord] = []
    waterfall_t: list[float] = []
    eta_rows: list[np.ndarray] = []
    v_rows: list[np.ndarray] = []
    files: set[str] = set()

    def observe(n: int, t: float, state: State) -> Optional[DiagnosticsRecord]:
        record = None
        if n % stride == 0 or n == cfg.Nt:
            record = diagnostics_record(state, t, cfg.eps, E0)
            records.append(record)
        if n in snapshot_index:
            name = f"snapshots/snapshot_{snapshot_index[n]:04d}.txt"
            write_snapshot(run_dir / name, t, state, echo, dft_tail(state), min_depth(state))
            files.add(name)
        if n in waterfall_steps:
            waterfall_t.append(t)
            eta_rows.append(state.eta[columns].copy())
            v_rows.append(state.v[columns].copy())
        return record

    result = RunResult(config=cfg, status="ok", exit_code=EXIT_OK, run_dir=run_dir,
                       final_state=None, records=records)
    blow_up = None
    try:
        result.final_state = evolve(state0, params, cfg.T, cfg.Nt, callback=observe,
                                    callback_every=stride,
                                    callback_steps=snapshot_index.keys() | waterfall_steps)
    except BlowUpError as exc:
        logger.error("Scenario %s aborted: %s", cfg.scenario, exc)
        result.status, result.exit_code = "blow-up", EXIT_BLOWUP
        blow_up = {"step": exc.step, "t": exc.t}

    write_diagnostics(run_dir / "diagnostics.csv", records)
    write_densities(run_dir / "densities.csv", records)
    files.update({"diagnostics.csv", "densities.csv"})
    if waterfall_t:
        x = grid.nodes[columns]
        write_waterfall(run_dir / "waterfall_eta.txt", waterfall_t, x, eta_rows)
        write_waterfall(run_dir / "waterfall_v.txt", waterfall_t, x, v_rows)
        files.update({"waterfall_eta.txt", "waterfall_v.txt"})

    max_tail = max((r.tail for r in records), default=None)
    if result.final_state is not None:
        final = result.final_state
        if max_tail is not None and max_tail >= UNRESOLVED_TAIL:
            logger.warning("Scenario %s is under-resolved: max tail %.2e", cfg.scenario, max_tail)
            result.status, result.exit_code = "under-resolved", EXIT_UNRESOLVED
        elif max_tail is not None and not is_resolved(max_tail):
            logger.warning("DFT tail %.2e exceeds the resolution target", max_tail)

        if cfg.fits_soliton:
            try:
                result.fit = fit_soliton(final, cfg.fit_window, cfg.search_interval, scale=cfg.eps)
            except SolitonFitError as exc:
                logger.warning("No soliton fit for %s: %s", cfg.scenario, exc)
        if result.fit is not None:
            write_json(run_dir / "soliton_fit.json", {"t": cfg.T, **result.fit.as_dict()},
                       "kbk_soliton_fit.schema.json")
            files.add("soliton_fit.json")
        if cfg.scenario == "soliton-test":
            result.soliton_error = write_soliton_error(
                run_dir / "soliton_error.txt", final, exact_solution(cfg, grid, cfg.T))
            files.add("soliton_error.txt")
        if cfg.scenario == "dsw":
            result.fronts = front_oscillation_counts(final)
            try:
                result.wavelength = oscillation_wavelength(final)
            except ValueError as exc:
                logger.warning("No oscillation wavelength: %s", exc)

    files.add("run_summary.json")
    result.summary = {
        "scenario": cfg.scenario,
        "fingerprint": cfg.fingerprint(),
        "run_dir": str(run_dir),
        "status": result.status,
        "exit_code": result.exit_code,
        "config": echo,
        "final": _record_dict(records[-1]) if records and blow_up is None else None,
        "max_delta": max((r.delta for r in records), default=None),
        "max_tail": max_tail,
        "soliton_fit": {"t": cfg.T, **result.fit.as_dict()} if result.fit else None,
        "soliton_error": (
            {"max_error_eta": result.soliton_error[0], "max_error_v": result.soliton_error[1]}
            if result.soliton_error else None
        ),
        "fronts": (
            {"left": result.fronts.left, "right": result.fronts.right,
             "wavelength": result.wavelength}
            if result.fronts else None
        ),
        "blow_up": blow_up,
        "wall_time_s": time.perf_counter() - started,
        "files": sorted(files),
    }
    write_json(run_dir / "run_summary.json", result.summary, "kbk_run_summary.schema.json")
    logger.info("Scenario %s finished: status=%s max_tail=%s wall=%.1fs", cfg.scenario,
                result.status, max_tail, result.summary["wall_time_s"])
    return result


def _run_row(job: tuple[int, ScenarioConfig, Optional[str]]) -> tuple[BatchRow, Optional[State]]:
    index, cfg, output_dir = job
    row = BatchRow(index=index, scenario=cfg.scenario, fingerprint=cfg.fingerprint(),
                   status="error", exit_code=1)
    try:
        result = run_scenario(cfg, output_dir)
    except ValueError as exc:
        row.exit_code, row.error = EXIT_CONFIG, str(exc)
    except OutputError as exc:
        row.exit_code, row.error = EXIT_OUTPUT, str(exc)
    except Exception as exc:  # noqa: BLE001
        row.error = f"{type(exc).__name__}: {exc}"
    else:
        summary = result.summary
        row.status, row.exit_code = result.status, result.exit_code
        row.final_delta = result.records[-1].delta if result.records else None
        row.max_tail = summary["max_tail"]
        row.wall_time_s = summary["wall_time_s"]
        if result.fit is not None:
            row.C_fit, row.residual = result.fit.C_fit, result.fit.residual
        return row, result.final_state
    logger.error("Batch run %d (%s) failed: %s", index, cfg.scenario, row.error)
    return row, None


def _attach_convergence(configs: Sequence[ScenarioConfig], rows: list[BatchRow],
                        finals: list[Optional[State]]) -> None:
    """Give runs that differ only in Nt their observed temporal order."""
    groups: dict[str, list[int]] = {}
    for i, cfg in enumerate(configs):
        if finals[i] is None:
            continue
        key = cfg.model_copy(update={"Nt": 1}).fingerprint()
        groups.setdefault(key, []).append(i)
    for members in groups.values():
        by_Nt = {configs[i].Nt: finals[i] for i in members}
        if len(by_Nt) < MIN_CONVERGENCE_RUNS:
            continue
        try:
            slope = self_convergence_slope(by_Nt)  # type: ignore[arg-type]
        except ValueError as exc:
            logger.warning("Convergence slope unavailable: %s", exc)
            continue
        for i in members:
            rows[i].convergence_slope = slope


def run_batch(configs: Sequence[ScenarioConfig], workers: int | None = None,
              output_dir: str | Path | None = None) -> list[BatchRow]:
    """Run every configuration; rows come back in input order and failures become rows."""
    if not configs:
        raise ValueError("Batch is empty")
    workers = workers or settings.batch_workers
    base = Path(output_dir or configs[0].output_dir)
    jobs = [(i, cfg, str(output_dir) if output_dir else None) for i, cfg in enumerate(configs)]
    logger.info("Batch of %d run(s) with %d worker(s)", len(jobs), workers)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_row, jobs))
    else:
        outcomes = [_run_row(job) for job in jobs]

    rows = [row for row, _ in outcomes]
    _attach_convergence(configs, rows, [final for _, final in outcomes])

    try:
        base.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"Cannot create batch directory {base}: {exc}") from exc
    records = [row.as_dict() for row in rows]
    write_csv(base / "batch_summary.csv", BATCH_COLUMNS, records)
    write_json(base / "batch_summary.json", {"rows": records}, "kbk_batch_summary.schema.json")
    return rows
