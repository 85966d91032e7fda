"""Unit tests for the flight log container and the RMS error metrics."""

import math

import numpy as np
import pytest

from fwadapt.flightlog import COLUMNS, IDX, FlightLog
from fwadapt.metrics import MetricReport, compute_metrics, normalize
from tests_helpers import make_log


class TestFlightLog:
    def test_needs_at_least_one_record(self):
        with pytest.raises(ValueError):
            FlightLog(np.zeros((0, len(COLUMNS))))

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            FlightLog(np.zeros((3, 5)))

    def test_rejects_non_monotonic_time(self):
        data = np.zeros((3, len(COLUMNS)))
        data[:, IDX["time_s"]] = [0.0, 0.008, 0.004]
        with pytest.raises(ValueError):
            FlightLog(data)

    def test_rejects_uneven_spacing(self):
        data = np.zeros((3, len(COLUMNS)))
        data[:, IDX["time_s"]] = [0.0, 0.004, 0.02]
        with pytest.raises(ValueError):
            FlightLog(data)

    def test_csv_roundtrip(self, tmp_path):
        log = make_log(5, phi_m_rad=[0.1, 0.2, 0.3, -0.1, 0.0],
                       e_xtrack_m=[1, 2, 3, 4, 5])
        path = tmp_path / "log.csv"
        log.write_csv(path)
        with open(path) as fh:
            assert fh.readline().strip() == ",".join(COLUMNS)
        back = FlightLog.read_csv(path)
        np.testing.assert_allclose(back.data, log.data, rtol=1e-8)

    def test_read_rejects_foreign_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError):
            FlightLog.read_csv(path)

    def test_warmup_slice(self):
        log = make_log(10)
        assert len(log.after(0.02)) == 5
        with pytest.raises(ValueError):
            log.after(1.0)


class TestComputeMetrics:
    def test_perfect_tracking_is_zero(self):
        m = compute_metrics(make_log(6))
        assert m.j_phi == m.j_theta == m.j_traj == 0.0

    def test_constant_bank_error(self):
        m = compute_metrics(make_log(7, phi_s_rad=0.1, phi_m_rad=0.0))
        assert abs(m.j_phi - 0.1) < 1e-12

    def test_alternating_cross_track(self):
        m = compute_metrics(make_log(4, e_xtrack_m=[3.0, -3.0, 0.0, 0.0]))
        assert abs(m.j_traj - math.sqrt(18.0 / 4.0)) < 1e-12

    def test_permutation_invariance(self):
        values = np.array([1.0, -2.0, 3.5, 0.0, 7.0])
        a = compute_metrics(make_log(5, e_xtrack_m=values))
        b = compute_metrics(make_log(5, e_xtrack_m=values[::-1]))
        assert a.j_traj == b.j_traj

    def test_scaling_monotonicity(self):
        errs = np.array([0.5, -1.0, 2.0, 0.1])
        base = compute_metrics(make_log(4, e_xtrack_m=errs))
        scaled = compute_metrics(make_log(4, e_xtrack_m=3.0 * errs))
        assert abs(scaled.j_traj - 3.0 * base.j_traj) < 1e-12

    def test_warmup_exclusion(self):
        log = make_log(10, e_xtrack_m=[100.0] + [0.0] * 9)
        assert compute_metrics(log, warmup=0.004).j_traj == 0.0
        assert compute_metrics(log).j_traj > 0.0


class TestNormalize:
    def test_self_benchmark_is_exactly_one(self):
        m = MetricReport(j_phi=0.123, j_theta=0.456, j_traj=7.89)
        out = normalize(m, m)
        assert out.normalized() == (1.0, 1.0, 1.0)

    def test_double_benchmark(self):
        m = MetricReport(j_phi=0.2, j_theta=0.4, j_traj=8.0)
        b = MetricReport(j_phi=0.1, j_theta=0.2, j_traj=4.0)
        assert normalize(m, b).normalized() == (2.0, 2.0, 2.0)

    def test_mixed_elementwise(self):
        m = MetricReport(j_phi=0.2, j_theta=0.1, j_traj=4.0)
        b = MetricReport(j_phi=0.1, j_theta=0.1, j_traj=2.0)
        assert normalize(m, b).normalized() == (2.0, 1.0, 2.0)

    def test_degenerate_benchmark_rejected(self):
        m = MetricReport(j_phi=0.2, j_theta=0.1, j_traj=4.0)
        with pytest.raises(ValueError):
            normalize(m, MetricReport(j_phi=0.0, j_theta=0.1, j_traj=2.0))

    def test_unnormalized_report_raises(self):
        with pytest.raises(ValueError):
            MetricReport(j_phi=1, j_theta=1, j_traj=1).normalized()
