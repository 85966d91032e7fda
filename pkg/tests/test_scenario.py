"""Integration tests for the scenario runner and matrix orchestration."""

import numpy as np
import pytest

from fwadapt.config import default_scenario
from fwadapt.flightlog import COLUMNS, FlightLog
from fwadapt.scenario import (
    STATUS_INCOMPLETE,
    STATUS_SUCCESS,
    comparison_table,
    metrics_summary,
    run_matrix,
    run_scenario,
)


def short_mission(**kwargs):
    """Two-waypoint dash the aircraft can finish in a few seconds."""
    mission = {
        "loop": False,
        "default_airspeed": 15.0,
        "acceptance_radius": 25.0,
        "waypoints": [[0, 0, -100], [150, 0, -100]],
    }
    return default_scenario(mission=mission, **kwargs)


def corner_mission(**kwargs):
    """L-shaped course: excites bank errors so no metric is exactly zero."""
    mission = {
        "loop": False,
        "default_airspeed": 15.0,
        "acceptance_radius": 25.0,
        "waypoints": [[0, 0, -100], [150, 0, -100], [150, 150, -100]],
    }
    return default_scenario(mission=mission, **kwargs)


class TestRunScenario:
    def test_short_dash_completes(self):
        res = run_scenario(short_mission(name="dash", duration_s=15.0))
        assert res.status == STATUS_SUCCESS
        assert res.exit_code == 0
        assert len(res.log) == int(round(15.0 / 0.004))

    def test_truncated_run_is_incomplete(self):
        res = run_scenario(default_scenario(name="stub", duration_s=5.0))
        assert res.status == STATUS_INCOMPLETE
        assert res.exit_code == 3

    def test_outputs_written(self, tmp_path):
        res = run_scenario(short_mission(name="dash", duration_s=10.0),
                           out_dir=tmp_path)
        log_path = tmp_path / "dash" / "log.csv"
        metrics_path = tmp_path / "dash" / "metrics.txt"
        assert log_path.exists() and metrics_path.exists()
        with open(log_path) as fh:
            assert fh.readline().strip() == ",".join(COLUMNS)
        text = metrics_path.read_text()
        assert "scenario: dash" in text
        assert "j_traj_m:" in text

    def test_byte_identical_reruns(self, tmp_path):
        cfg = short_mission(name="det", duration_s=8.0, adaptive=True)
        run_scenario(cfg, out_dir=tmp_path / "a")
        run_scenario(cfg, out_dir=tmp_path / "b")
        a = (tmp_path / "a" / "det" / "log.csv").read_bytes()
        b = (tmp_path / "b" / "det" / "log.csv").read_bytes()
        assert a == b

    def test_log_is_readable_flightlog(self, tmp_path):
        run_scenario(short_mission(name="rt", duration_s=5.0), out_dir=tmp_path)
        log = FlightLog.read_csv(tmp_path / "rt" / "log.csv")
        t = log.column("time_s")
        assert t[0] == 0.0
        assert np.allclose(np.diff(t), 0.004)

    def test_metrics_summary_fields(self):
        res = run_scenario(short_mission(name="s", duration_s=5.0))
        text = metrics_summary(res)
        for key in ("scenario:", "status:", "records:", "j_phi_rad:",
                    "j_theta_rad:", "j_traj_m:", "terminal_gain_norm:"):
            assert key in text


class TestRunMatrix:
    def test_benchmark_normalization(self, tmp_path):
        configs = [
            corner_mission(name="bench", duration_s=14.0),
            corner_mission(name="soft", duration_s=14.0, alpha_d=0.7),
        ]
        matrix = run_matrix(configs, "bench", out_dir=tmp_path)
        bench = matrix.results["bench"].metrics
        assert bench.normalized() == (1.0, 1.0, 1.0)
        assert matrix.results["soft"].metrics.norm_traj is not None
        assert (tmp_path / "comparison.csv").exists()
        assert (tmp_path / "trajectories.svg").exists()
        assert (tmp_path / "gain_traces.svg").exists()
        assert (tmp_path / "metrics.svg").exists()
        table = comparison_table(matrix)
        assert table.splitlines()[0].startswith("scenario,status,")
        assert "bench" in table and "soft" in table

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            run_matrix([], "bench")

    def test_unknown_benchmark_rejected(self):
        with pytest.raises(ValueError):
            run_matrix([short_mission(name="a", duration_s=5.0)], "nope")

    def test_duplicate_names_rejected(self):
        cfgs = [short_mission(name="a", duration_s=5.0),
                short_mission(name="a", duration_s=5.0)]
        with pytest.raises(ValueError):
            run_matrix(cfgs, "a")

    def test_benchmark_flag_used_when_name_omitted(self):
        cfgs = [corner_mission(name="a", duration_s=14.0, benchmark=True),
                corner_mission(name="b", duration_s=14.0)]
        matrix = run_matrix(cfgs, benchmark_name=None)
        assert matrix.benchmark == "a"
