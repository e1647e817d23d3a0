"""Snapshot bookkeeping shared by the 2-D and 3-D solvers.

Snapshot timing is step-aligned: a requested time is satisfied by the first
step whose time t = step * dt is at or after it, and the exact step index and
time are recorded so output files never need interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .grid import Field

__all__ = ["SnapshotSeries", "snapshot_steps"]


def snapshot_steps(snapshot_times, dt: float, t_end: float) -> list[int]:
    """Map requested times to step indices (first step with t >= requested)."""
    times = list(snapshot_times)
    if any(times[i] > times[i + 1] for i in range(len(times) - 1)):
        raise ConfigurationError("snapshot times must be sorted ascending")
    if times and (times[0] < 0 or times[-1] > t_end + 1e-12 * max(t_end, dt)):
        raise ConfigurationError(
            f"snapshot times must lie within [0, t_end={t_end}], got {times}"
        )
    return [int(np.ceil(t / dt - 1e-9)) for t in times]


@dataclass
class SnapshotSeries:
    """Fields captured at requested times during a run."""

    requested_times: list[float]
    steps: list[int] = field(default_factory=list)
    times: list[float] = field(default_factory=list)
    fields: list[Field] = field(default_factory=list)
    slices: list[np.ndarray] = field(default_factory=list)  # 3-D runs only
    stability: object | None = None

    def append(self, step: int, time: float, snapshot: Field,
               plane: np.ndarray | None = None) -> None:
        self.steps.append(step)
        self.times.append(time)
        self.fields.append(snapshot)
        if plane is not None:
            self.slices.append(plane)

    def __len__(self) -> int:
        return len(self.fields)
