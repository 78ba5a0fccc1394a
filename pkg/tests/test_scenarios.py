"""Scenario construction, generation and file round-trip tests."""

import json
import math
from pathlib import Path

import pytest
from scipy import stats

from georepair.astro import GEO
from georepair.scenarios import (
    ParseError,
    ValidationError,
    case_study,
    load,
    random_scenario,
    save,
    spec_to_dict,
    scenario_spec,
)

GOLDEN = Path(__file__).parent / "data" / "case_study_golden.json"


class TestCaseStudy:
    def setup_method(self):
        self.scenario = case_study()

    def test_counts_and_mission_parameters(self):
        assert len(self.scenario.targets) == 14
        assert len(self.scenario.servicers) == 2
        assert self.scenario.deadline == 30 * 86400.0
        assert self.scenario.epoch.isoformat() == "2021-03-12T04:00:00+00:00"
        for s in self.scenario.servicers:
            assert s.dv_budget == 1000.0
        for t in self.scenario.targets:
            assert t.repair_duration == 20 * 3600.0

    def test_known_rows(self):
        g2 = next(t for t in self.scenario.targets if t.name == "Beidou_G2")
        assert math.degrees(g2.orbit.inclination) == pytest.approx(7.77)
        assert math.degrees(g2.orbit.raan) == pytest.approx(52.634)
        assert math.degrees(g2.orbit.arg_lat0) == pytest.approx(328.007)
        ssc1 = self.scenario.servicers[0]
        assert ssc1.name == "SSc1"
        assert (ssc1.orbit.inclination, ssc1.orbit.raan,
                ssc1.orbit.arg_lat0) == (0.0, 0.0, 0.0)

    def test_matches_golden_table(self):
        golden = json.loads(GOLDEN.read_text())
        spec = scenario_spec(self.scenario)
        assert spec.epoch == golden["epoch"]
        assert spec.deadline_hours == golden["deadline_hours"]
        assert len(spec.servicers) == len(golden["servicers"])
        for rec, row in zip(spec.servicers, golden["servicers"]):
            assert [rec.name, rec.inclination_deg, rec.raan_deg,
                    rec.true_anomaly_deg] == row
            assert rec.dv_budget_mps == golden["dv_budget_mps"]
        for rec, row in zip(spec.targets, golden["targets"]):
            assert [rec.name, rec.inclination_deg, rec.raan_deg,
                    rec.true_anomaly_deg] == row
            assert rec.repair_hours == golden["repair_hours"]


class TestRandomScenario:
    def test_shapes_and_mission_parameters(self):
        sc = random_scenario(10, 2, 15.0, seed=3)
        assert len(sc.targets) == 10 and len(sc.servicers) == 2
        assert sc.deadline == 15 * 86400.0
        assert all(s.dv_budget == 2000.0 for s in sc.servicers)
        assert all(t.repair_duration == 86400.0 for t in sc.targets)

    def test_angle_ranges(self):
        for seed in range(20):
            sc = random_scenario(8, 2, 15.0, seed=seed)
            for orb in ([s.orbit for s in sc.servicers]
                        + [t.orbit for t in sc.targets]):
                assert 0.0 <= orb.inclination <= math.radians(10.0)
                assert 0.0 <= orb.raan < 2 * math.pi
                assert 0.0 <= orb.arg_lat0 < 2 * math.pi

    def test_determinism(self):
        assert random_scenario(6, 2, 10.0, 42) == random_scenario(6, 2, 10.0, 42)
        assert random_scenario(6, 2, 10.0, 42) != random_scenario(6, 2, 10.0, 43)

    def test_inclination_is_uniform(self):
        # Kolmogorov-Smirnov at the 1% level over 10^4 draws.
        incs = []
        seed = 0
        while len(incs) < 10_000:
            sc = random_scenario(50, 1, 15.0, seed=seed)
            incs.extend(math.degrees(t.orbit.inclination) for t in sc.targets)
            seed += 1
        result = stats.kstest(incs[:10_000], stats.uniform(0, 10).cdf)
        assert result.pvalue > 0.01

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            random_scenario(0, 1, 10.0, 0)


class TestSaveLoad:
    def test_case_study_round_trip(self, tmp_path):
        path = tmp_path / "case.json"
        original = case_study()
        save(original, path)
        assert load(path) == original

    def test_random_round_trip_identity(self, tmp_path):
        sc = random_scenario(5, 2, 12.0, seed=9)
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save(sc, p1)
        save(load(p1), p2)
        assert p1.read_text() == p2.read_text()

    def test_custom_constants_round_trip(self, tmp_path):
        data = spec_to_dict(scenario_spec(case_study()))
        data["constants"] = {"mu_km3s2": GEO.mu, "t_geo_s": GEO.t_geo}
        path = tmp_path / "c.json"
        path.write_text(json.dumps(data))
        sc = load(path)
        assert sc.constants.mu == GEO.mu
        out = tmp_path / "d.json"
        save(sc, out)
        assert json.loads(out.read_text())["constants"]["t_geo_s"] == GEO.t_geo

    def test_missing_field_names_it(self, tmp_path):
        data = spec_to_dict(scenario_spec(case_study()))
        del data["deadline_hours"]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        with pytest.raises(ParseError, match="deadline_hours"):
            load(path)

    def test_unknown_field_rejected(self, tmp_path):
        data = spec_to_dict(scenario_spec(case_study()))
        data["thrust_n"] = 5.0
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        with pytest.raises(ParseError, match="thrust_n"):
            load(path)
        data2 = spec_to_dict(scenario_spec(case_study()))
        data2["servicers"][0]["mass_kg"] = 100.0
        path.write_text(json.dumps(data2))
        with pytest.raises(ParseError, match="mass_kg"):
            load(path)

    def test_negative_budget_is_validation_error(self, tmp_path):
        data = spec_to_dict(scenario_spec(case_study()))
        data["servicers"][0]["dv_budget_mps"] = -10.0
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        with pytest.raises(ValidationError, match="dv_budget"):
            load(path)

    def test_invalid_json_is_parse_error(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{ nope")
        with pytest.raises(ParseError, match="line"):
            load(path)
