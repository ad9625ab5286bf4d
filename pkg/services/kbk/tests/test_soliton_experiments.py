"""Soliton propagation, perturbed-soliton fits and temporal order at full resolution."""

import pytest

from services.kbk.core.scenario_config import ScenarioConfig
from services.kbk.core.scenario_runner import run_batch, run_scenario

pytestmark = pytest.mark.slow


def test_soliton_propagation(tmp_path):
    result = run_scenario(ScenarioConfig.for_scenario("soliton-test", output_dir=str(tmp_path)))
    assert result.status == "ok"
    assert max(result.soliton_error) <= 1e-10
    assert max(r.delta for r in result.records) <= 1e-11


def test_perturbed_soliton_fits(tmp_path):
    cases = [((1.01, 1.0), 0.819), ((0.99, 1.0), 0.7811), ((1.0, 1.01), 0.8155), ((1.0, 0.99), 0.7846)]
    configs = [ScenarioConfig.for_scenario("perturbed-soliton", lam=lam, mu=mu)
               for (lam, mu), _ in cases]
    rows = run_batch(configs, output_dir=tmp_path)
    for row, (_, expected) in zip(rows, cases):
        assert row.status == "ok"
        assert row.C_fit == pytest.approx(expected, abs=5e-3)


def test_temporal_order(tmp_path):
    configs = [ScenarioConfig.for_scenario("soliton-test", Nt=Nt) for Nt in (500, 1000, 2000, 8000)]
    rows = run_batch(configs, output_dir=tmp_path)
    assert rows[0].convergence_slope == pytest.approx(4.0, abs=0.3)
