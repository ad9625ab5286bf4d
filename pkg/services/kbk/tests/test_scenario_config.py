"""Tests for scenario defaults, validation, config files and fingerprints."""

import numpy as np
import pytest

from services.kbk.core.scenario_config import (
    SCENARIO_DEFAULTS,
    ScenarioConfig,
    build_config,
    load_config_file,
    parse_config_text,
)


class TestDefaults:
    def test_soliton_test(self):
        cfg = ScenarioConfig.for_scenario("soliton-test")
        assert (cfg.L, cfg.N, cfg.Nt, cfg.T, cfg.C) == (15.0, 2048, 4000, 1.0, 0.8)
        assert cfg.eps == 1.0 and not cfg.dealias

    def test_localized_scenarios(self):
        v = ScenarioConfig.for_scenario("gaussian-v")
        eta = ScenarioConfig.for_scenario("gaussian-eta")
        assert (v.L, v.N, v.T, v.A) == (30.0, 4096, 5.0, 3.0)
        assert (eta.T, eta.A) == (8.0, -3.0)
        assert v.search_interval == pytest.approx((-30.0 * np.pi, 0.0))

    def test_fit_window(self):
        assert ScenarioConfig.for_scenario("gaussian-v").fit_window == 3.0
        assert ScenarioConfig.for_scenario("gaussian-eta").fit_window == 5.0
        assert ScenarioConfig.for_scenario("perturbed-soliton").fit_window == 5.0
        assert ScenarioConfig.for_scenario("gaussian-v", fit_window=4.0).fit_window == 4.0

    def test_dsw(self):
        cfg = ScenarioConfig.for_scenario("dsw")
        assert (cfg.L, cfg.N, cfg.Nt, cfg.T, cfg.eps) == (3.0, 2**14, 10_000, 3.0, 0.1)
        assert cfg.initial_kind == "gaussian-eta"
        assert ScenarioConfig.for_scenario("dsw", dsw_bump="v").initial_kind == "gaussian-v"

    def test_perturbation_defaults(self):
        cfg = ScenarioConfig.for_scenario("stationary-perturbed")
        assert (cfg.C, cfg.lam, cfg.mu) == (0.0, 1.0, 1.01)
        assert cfg.initial_kind == "stationary"

    def test_every_scenario_has_defaults(self):
        for name in SCENARIO_DEFAULTS:
            overrides = {"initial": "soliton"} if name == "custom" else {}
            assert ScenarioConfig.for_scenario(name, **overrides).scenario == name

    def test_lambda_alias(self):
        cfg = ScenarioConfig.for_scenario("perturbed-soliton", **{"lambda": 0.99})
        assert cfg.lam == 0.99
        assert cfg.model_dump(by_alias=True)["lambda"] == 0.99

    def test_diagnostics_stride(self):
        assert ScenarioConfig.for_scenario("soliton-test").diagnostics_stride == 20
        assert ScenarioConfig.for_scenario("soliton-test", Nt=50).diagnostics_stride == 1
        assert ScenarioConfig.for_scenario("soliton-test", diagnostics_every=7).diagnostics_stride == 7


class TestValidation:
    def test_unknown_scenario(self):
        with pytest.raises(ValueError, match="Unknown scenario"):
            ScenarioConfig.for_scenario("tsunami")

    @pytest.mark.parametrize("N", [4, 1000, 3])
    def test_N_must_be_power_of_two(self, N):
        with pytest.raises(ValueError, match="power of two"):
            ScenarioConfig.for_scenario("soliton-test", N=N)

    def test_soliton_velocity(self):
        with pytest.raises(ValueError, match=r"\|C\| < 1"):
            ScenarioConfig.for_scenario("soliton-test", C=1.2)

    def test_velocity_unchecked_for_gaussians(self):
        assert ScenarioConfig.for_scenario("gaussian-v", C=1.2).C == 1.2

    def test_custom_requires_initial(self):
        with pytest.raises(ValueError, match="requires 'initial'"):
            ScenarioConfig.for_scenario("custom")

    def test_initial_only_for_custom(self):
        with pytest.raises(ValueError, match="only valid for custom"):
            ScenarioConfig.for_scenario("soliton-test", initial="gaussian-v")

    def test_unknown_field(self):
        with pytest.raises(ValueError):
            ScenarioConfig.for_scenario("soliton-test", colour="blue")

    @pytest.mark.parametrize("field,value", [("T", 0.0), ("Nt", 0), ("L", -1.0), ("eps", 0.0),
                                             ("snapshot_count", 0)])
    def test_positive_fields(self, field, value):
        with pytest.raises(ValueError):
            ScenarioConfig.for_scenario("soliton-test", **{field: value})

    def test_fit_search_must_increase(self):
        with pytest.raises(ValueError, match="increasing"):
            ScenarioConfig.for_scenario("gaussian-v", fit_search=(1.0, -1.0))


class TestFingerprint:
    def test_stable_and_ignores_output_dir(self):
        a = ScenarioConfig.for_scenario("soliton-test", output_dir="/tmp/a")
        b = ScenarioConfig.for_scenario("soliton-test", output_dir="/tmp/b")
        assert a.fingerprint() == b.fingerprint()
        assert len(a.fingerprint()) == 12
        assert a.run_dirname() == f"soliton-test-{a.fingerprint()}"

    def test_changes_with_parameters(self):
        a = ScenarioConfig.for_scenario("soliton-test")
        assert a.fingerprint() != ScenarioConfig.for_scenario("soliton-test", Nt=2000).fingerprint()


class TestConfigFiles:
    def test_blocks_comments_and_powers(self):
        text = """
# sweep over the perturbation
scenario = perturbed-soliton
lambda = 1.01   # scale v
N = 2^12

scenario=perturbed-soliton
mu=0.99
dealias = yes
"""
        blocks = parse_config_text(text)
        assert blocks == [
            {"scenario": "perturbed-soliton", "lam": "1.01", "N": 4096},
            {"scenario": "perturbed-soliton", "mu": "0.99", "dealias": "yes"},
        ]
        cfg = build_config(blocks[1])
        assert cfg.mu == 0.99 and cfg.dealias

    def test_flag_names_accepted(self):
        blocks = parse_config_text("scenario=dsw\nsnapshots=3\nout=/tmp/x\n")
        assert blocks == [{"scenario": "dsw", "snapshot_count": "3", "output_dir": "/tmp/x"}]

    def test_fit_search_pair(self):
        blocks = parse_config_text("scenario=gaussian-v\nfit_search=-50, 0\n")
        assert blocks[0]["fit_search"] == (-50.0, 0.0)

    def test_missing_equals(self):
        with pytest.raises(ValueError, match="expected key=value"):
            parse_config_text("scenario dsw\n")

    def test_duplicate_key(self):
        with pytest.raises(ValueError, match="duplicate key"):
            parse_config_text("N=8\nN=16\n")

    def test_flags_override_file(self):
        cfg = build_config({"scenario": "soliton-test", "N": 1024, "T": "0.5"},
                           {"N": 2048, "T": None})
        assert cfg.N == 2048
        assert cfg.T == 0.5

    def test_scenario_required(self):
        with pytest.raises(ValueError, match="No scenario"):
            build_config({"N": 1024})

    def test_load_file(self, tmp_path):
        path = tmp_path / "sweep.cfg"
        path.write_text("scenario=soliton-test\n\nscenario=dsw\n", encoding="utf-8")
        assert [b["scenario"] for b in load_config_file(path)] == ["soliton-test", "dsw"]

    def test_load_missing_or_empty_file(self, tmp_path):
        with pytest.raises(ValueError, match="Cannot read"):
            load_config_file(tmp_path / "absent.cfg")
        empty = tmp_path / "empty.cfg"
        empty.write_text("# nothing here\n", encoding="utf-8")
        with pytest.raises(ValueError, match="holds no scenarios"):
            load_config_file(empty)
