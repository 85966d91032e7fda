"""Per-tick flight log with a fixed, unit-suffixed CSV schema.

One record per inner tick.  The column set and order below are the stable
on-disk schema; values are written as decimal text with 9 significant
digits, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

COLUMNS = (
    "time_s",
    "phi_s_rad",
    "phi_m_rad",
    "theta_s_rad",
    "theta_m_rad",
    "psi_m_rad",
    "e_xtrack_m",
    "p_s_rad_s",
    "q_s_rad_s",
    "r_s_rad_s",
    "p_m_rad_s",
    "q_m_rad_s",
    "r_m_rad_s",
    "rcac_pitch_kp_1_s",
    "rcac_pitch_ki_1_s2",
    "rcac_roll_kp_1_s",
    "rcac_roll_ki_1_s2",
    "rcac_p_kp_1_s",
    "rcac_p_ki_1_s2",
    "rcac_q_kp_1_s",
    "rcac_q_ki_1_s2",
    "rcac_r_kp_1_s",
    "rcac_r_ki_1_s2",
    "aileron_rad",
    "elevator_rad",
    "rudder_rad",
    "throttle_frac",
    "north_m",
    "east_m",
    "down_m",
    "vn_m_s",
    "ve_m_s",
    "vd_m_s",
    "airspeed_m_s",
)

IDX = {name: i for i, name in enumerate(COLUMNS)}


class FlightLog:
    """Dense per-tick record table with fixed columns."""

    def __init__(self, data: np.ndarray):
        data = np.asarray(data, dtype=float)
        if data.ndim != 2 or data.shape[1] != len(COLUMNS):
            raise ValueError(
                f"flight log needs shape (N, {len(COLUMNS)}), got {data.shape}"
            )
        if data.shape[0] < 1:
            raise ValueError("flight log needs at least one record")
        t = data[:, IDX["time_s"]]
        dt = np.diff(t)
        if dt.size and (dt.min() <= 0.0 or abs(dt.max() - dt.min()) > 1e-9):
            raise ValueError("log time must be strictly increasing at constant spacing")
        self.data = data

    @classmethod
    def allocate(cls, n_ticks: int) -> np.ndarray:
        """Raw buffer for the run loop to fill; wrap with FlightLog afterwards."""
        return np.zeros((n_ticks, len(COLUMNS)))

    def __len__(self) -> int:
        return self.data.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.data[:, IDX[name]]

    def after(self, t_start: float) -> "FlightLog":
        """Records with time >= t_start (used for warm-up exclusion)."""
        mask = self.column("time_s") >= t_start
        if not mask.any():
            raise ValueError(f"no records at or after t={t_start}")
        return FlightLog(self.data[mask])

    def write_csv(self, path: str | Path) -> None:
        buf = io.StringIO()
        buf.write(",".join(COLUMNS) + "\n")
        fmt = ",".join(["%.9g"] * len(COLUMNS))
        for row in self.data:
            buf.write(fmt % tuple(row) + "\n")
        Path(path).write_text(buf.getvalue())

    @classmethod
    def read_csv(cls, path: str | Path) -> "FlightLog":
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            if tuple(header) != COLUMNS:
                raise ValueError(f"unexpected flight log header in {path}")
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        return cls(data)
