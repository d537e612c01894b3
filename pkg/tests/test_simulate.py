from datetime import datetime

import pytest

from heliotrope.ephemeris_sky import GeoTime, SkyParams, day_sequence, sun_direction
from heliotrope.simulate import (
    ActuatorModel,
    PanelModel,
    canyon_batch,
    compare_day,
    export_histograms,
    export_ledger_csv,
    export_summary_csv,
    simulate_day,
)
from heliotrope.sphere import SphereGrid, angle_between
from heliotrope.strategies import Strategy


@pytest.fixture(scope="module")
def summer_day():
    grid = SphereGrid(64, 32)
    site = GeoTime(40.7128, -74.0060, datetime(2024, 6, 20, 6, 0), tz_offset_hours=-4.0)
    return day_sequence(site, datetime(2024, 6, 20, 20, 0), 60.0, SkyParams(), grid)


class TestModels:
    def test_panel_defaults(self):
        p = PanelModel()
        assert p.area_m2 == pytest.approx(0.0625)
        assert p.efficiency == pytest.approx(0.20)

    def test_validation(self):
        with pytest.raises(ValueError):
            PanelModel(area_m2=0.0)
        with pytest.raises(ValueError):
            PanelModel(efficiency=1.5)
        with pytest.raises(ValueError):
            ActuatorModel(joules_per_step=-1.0)


class TestSimulateDay:
    def test_ledger_identity_exact(self, summer_day):
        led = simulate_day(summer_day, Strategy("proposed"))
        assert led.net_j == led.harvested_j - led.actuator_j  # exact, same floats

    def test_fixed_strategies_never_actuate(self, summer_day):
        for kind in ("fixed_up", "fixed_latitude"):
            led = simulate_day(summer_day, Strategy(kind, latitude_deg=40.7128))
            assert led.actuator_j == 0.0

    def test_sun_tracker_follows_sun(self, summer_day):
        led = simulate_day(summer_day, Strategy("sun_tracker"))
        site = summer_day.site
        for row in led.rows:
            sun = sun_direction(site.at(row.timestamp))
            if sun is not None and sun[2] > 0.0:
                assert angle_between(row.orientation.normal, sun) < 1e-6

    def test_sun_tracker_pays_for_slew(self, summer_day):
        led = simulate_day(summer_day, Strategy("sun_tracker"))
        assert led.actuator_j > 0.0

    def test_optimal_beats_everyone(self, summer_day):
        opt = simulate_day(summer_day, Strategy("optimal"))
        for kind in ("proposed", "fixed_up", "sun_tracker"):
            led = simulate_day(summer_day, Strategy(kind))
            assert led.harvested_j <= opt.harvested_j * (1.0 + 1e-6)

    def test_row_count_matches_sequence(self, summer_day):
        led = simulate_day(summer_day, Strategy("fixed_up"))
        assert len(led.rows) == len(summer_day.entries)

    def test_actuator_share_is_small(self, summer_day):
        led = simulate_day(summer_day, Strategy("proposed"))
        assert led.actuator_j < 0.01 * led.harvested_j


class TestCompareDay:
    def test_requires_optimal_entry(self, summer_day):
        with pytest.raises(ValueError):
            compare_day(summer_day, [Strategy("proposed")])

    def test_rows_and_gains(self, summer_day):
        rows = compare_day(
            summer_day, [Strategy("optimal"), Strategy("proposed"), Strategy("sun_tracker")]
        )
        by_kind = {r.strategy: r for r in rows}
        assert by_kind["optimal"].pct_of_optimal == pytest.approx(100.0)
        assert 0.0 < by_kind["proposed"].pct_of_optimal <= 100.0
        assert "sun_tracker" in by_kind["proposed"].gain_pct


class TestCanyonBatch:
    def test_batch_shape_and_ordering(self):
        grid = SphereGrid(64, 32)
        site = GeoTime(40.7128, -74.0060, datetime(2024, 6, 20, 7, 0), tz_offset_hours=-4.0)
        results = canyon_batch(site, datetime(2024, 6, 20, 19, 0), 3, 50, grid, interval_minutes=60.0)
        assert len(results) == 3
        for rows in results.values():
            kinds = [r.strategy for r in rows]
            assert kinds == ["optimal", "proposed", "sun_tracker", "fixed_latitude"]

    def test_rejects_zero_locations(self):
        grid = SphereGrid(32, 16)
        site = GeoTime(40.0, -74.0, datetime(2024, 6, 20, 7, 0), tz_offset_hours=-4.0)
        with pytest.raises(ValueError):
            canyon_batch(site, datetime(2024, 6, 20, 19, 0), 0, 0, grid)


class TestExports:
    def test_ledger_csv(self, summer_day, tmp_path):
        led = simulate_day(summer_day, Strategy("fixed_up"))
        path = tmp_path / "ledger.csv"
        export_ledger_csv(led, path, "cfg")
        lines = path.read_text().splitlines()
        assert lines[0] == "# cfg"
        assert lines[1].startswith("timestamp,zenith_deg")
        assert len(lines) == 2 + len(led.rows)

    def test_summary_and_histograms(self, summer_day, tmp_path):
        rows = compare_day(
            summer_day,
            [
                Strategy("optimal"),
                Strategy("proposed"),
                Strategy("sun_tracker"),
                Strategy("fixed_latitude", latitude_deg=40.7128),
            ],
        )
        results = {"loc0": rows}
        export_summary_csv(results, tmp_path / "summary.csv")
        export_histograms(results, tmp_path / "hist.csv")
        summary = (tmp_path / "summary.csv").read_text().splitlines()
        assert len(summary) == 1 + 4
        hist = (tmp_path / "hist.csv").read_text().splitlines()
        assert hist[0] == "location_id,gain_vs_sun_tracker_pct,gain_vs_fixed_pct,pct_of_optimal"
        assert len(hist) == 2

    def test_histograms_reject_empty(self, tmp_path):
        with pytest.raises(ValueError):
            export_histograms({}, tmp_path / "hist.csv")
