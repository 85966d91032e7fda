"""Post-flight tracking error metrics: bank, elevation, trajectory RMS."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .flightlog import FlightLog


@dataclass(frozen=True)
class MetricReport:
    """Raw RMS metrics, plus the benchmark-normalized triplet once computed."""

    j_phi: float  # rad
    j_theta: float  # rad
    j_traj: float  # m
    norm_phi: float | None = None
    norm_theta: float | None = None
    norm_traj: float | None = None

    def normalized(self) -> tuple[float, float, float]:
        if self.norm_phi is None:
            raise ValueError("report has not been normalized against a benchmark")
        return (self.norm_phi, self.norm_theta, self.norm_traj)


def _rms(x: np.ndarray) -> float:
    return float(math.sqrt(np.mean(np.square(x))))


def compute_metrics(log: FlightLog, warmup: float = 0.0) -> MetricReport:
    """RMS bank, elevation, and cross-track errors over the logged flight.

    ``warmup`` seconds measured from the first record are excluded;
    the default keeps every record.
    """
    if len(log) == 0:
        raise ValueError("empty flight log")
    if warmup > 0.0:
        log = log.after(float(log.column("time_s")[0]) + warmup)
    return MetricReport(
        j_phi=_rms(log.column("phi_s_rad") - log.column("phi_m_rad")),
        j_theta=_rms(log.column("theta_s_rad") - log.column("theta_m_rad")),
        j_traj=_rms(log.column("e_xtrack_m")),
    )


def normalize(report: MetricReport, benchmark: MetricReport) -> MetricReport:
    """Scale each metric by the benchmark run's value."""
    for name, value in (
        ("j_phi", benchmark.j_phi),
        ("j_theta", benchmark.j_theta),
        ("j_traj", benchmark.j_traj),
    ):
        if value <= 0.0:
            raise ValueError(f"degenerate benchmark: {name} = {value}")
    return replace(
        report,
        norm_phi=report.j_phi / benchmark.j_phi,
        norm_theta=report.j_theta / benchmark.j_theta,
        norm_traj=report.j_traj / benchmark.j_traj,
    )
