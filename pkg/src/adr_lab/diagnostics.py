"""Numerical verification tools: error norms, convergence order, positivity,
norm-growth bounds, and phase-space trajectory extraction.

All diagnostics are pure functions over snapshots and logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .analytic2d import SeriesSolution, sample_series
from .chemistry import DbarEstimate
from .errors import ConfigurationError, StabilityError, UnsupportedNetworkError
from .grid import Field, Grid2D, TransportParams, sample_initial_2d
from .snapshots import SnapshotSeries

__all__ = [
    "ErrorReport",
    "TrajectoryLog",
    "l2_norm",
    "max_error_vs_analytic",
    "estimate_order",
    "convergence_order",
    "boundedness_check",
    "positivity_check",
    "max_pairwise_distance",
]


def l2_norm(field: Field) -> float:
    """Cell-volume-weighted discrete L2 norm, summed over species.

    sqrt( sum_j sum_cells c_j(cell)^2 * cell_volume ).  Boundary cells are
    included with full weight; they are zero under Dirichlet anyway.
    """
    return math.sqrt(float((field.values**2).sum()) * field.grid.cell_volume)


@dataclass(frozen=True)
class ErrorReport:
    t: float
    max_abs_error: float
    l2_error: float
    grid_shape: tuple[int, ...]


def max_error_vs_analytic(numeric: Field, sol: SeriesSolution, t: float) -> ErrorReport:
    """Pointwise max and L2 difference between a numeric field and the series."""
    grid = numeric.grid
    if not isinstance(grid, Grid2D):
        raise ConfigurationError("analytic comparison requires a 2-D field")
    exact = sample_series(sol, grid, t)
    diff = Field(grid, numeric.values - exact.values)
    return ErrorReport(
        t=t,
        max_abs_error=float(np.abs(diff.values).max()),
        l2_error=l2_norm(diff),
        grid_shape=grid.shape,
    )


def estimate_order(spacings, errors) -> float:
    """Least-squares slope of log(error) vs log(spacing)."""
    h = np.log(np.asarray(spacings, dtype=float))
    e = np.log(np.asarray(errors, dtype=float))
    if h.size < 2:
        raise ConfigurationError("order estimation needs at least 2 levels")
    slope = np.polyfit(h, e, 1)[0]
    return float(slope)


def convergence_order(
    configs,
    sol: SeriesSolution,
    t: float,
    initial_profile=None,
) -> tuple[float, list[ErrorReport]]:
    """Measured spatial order of the 2-D solver against the series oracle.

    configs is a list of (grid, dt) refinement levels with dt scaled
    proportionally to dx^2 (the caller's responsibility; this isolates the
    second-order spatial term).  Each level runs from the sampled initial
    profile (default: the zero-time series) to time t, then the max error is
    measured.  Any unstable level aborts with its stability report.
    """
    from .solver2d import run2d, stability2d

    if len(configs) < 3:
        raise ConfigurationError("convergence study needs >= 3 refinement levels")
    reports: list[ErrorReport] = []
    spacings: list[float] = []
    params = TransportParams(u=(sol.u, sol.u), k=(sol.k, sol.k))
    for grid, dt in configs:
        stab = stability2d(params, grid, dt)
        if not stab.ok:
            raise StabilityError(
                f"refinement level {grid.shape} with dt={dt} is unstable "
                f"({stab.violated})", stab,
            )
        if initial_profile is not None:
            init = sample_initial_2d(grid, initial_profile)
        else:
            init = sample_series(sol, grid, 0.0)
        series = run2d(init, params, grid, dt, t_end=t, snapshot_times=[t])
        reports.append(max_error_vs_analytic(series.fields[-1], sol, series.times[-1]))
        spacings.append(grid.dx)
    order = estimate_order(spacings, [r.max_abs_error for r in reports])
    return order, reports


def boundedness_check(
    times,
    norms,
    dbar: DbarEstimate,
    u0_norm: float,
    holds_H: bool = True,
) -> tuple[bool, np.ndarray]:
    """Check ||u(t)|| <= exp(dbar*t) * (||u0|| + 1) at every sample.

    Returns (ok, margins) where margins[i] = bound(t_i) - norm_i; the check
    is only meaningful for monomolecular networks, so holds_H=False raises.
    """
    if not holds_H:
        raise UnsupportedNetworkError(
            "the norm growth bound is proved only for monomolecular networks"
        )
    times = np.asarray(times, dtype=float)
    norms = np.asarray(norms, dtype=float)
    bound = np.exp(dbar.dbar * times) * (u0_norm + 1.0)
    margins = bound - norms
    return bool((margins >= 0).all()), margins


def positivity_check(
    series: SnapshotSeries, tol_scale: float = 1e-12
) -> tuple[bool, dict | None]:
    """True iff every snapshot value is >= -tol, tol = tol_scale * field max.

    On failure returns the first violating (snapshot index, species, cell,
    value) for reporting.
    """
    for idx, snap in enumerate(series.fields):
        vmax = float(np.abs(snap.values).max())
        tol = tol_scale * vmax
        vmin = float(snap.values.min())
        if vmin < -tol:
            where = np.argwhere(snap.values < -tol)[0]
            return False, {
                "snapshot": idx,
                "t": series.times[idx],
                "species": int(where[0]),
                "cell": tuple(int(v) for v in where[1:]),
                "value": vmin,
            }
    return True, None


@dataclass
class TrajectoryLog:
    """Per-cell species trajectories sampled every `stride` steps.

    rows() yields (t, i, j, k, c1, ..., cs) suitable for CSV export and
    3-D phase-space plotting.
    """

    cells: list[tuple[int, ...]]
    stride: int
    species: list[str]
    times: list[float] = dc_field(default_factory=list)
    data: list[np.ndarray] = dc_field(default_factory=list)  # (n_cells, s) each

    def append(self, t: float, sample: np.ndarray) -> None:
        if self.times and t <= self.times[-1]:
            raise ConfigurationError("trajectory samples must be time-ordered")
        self.times.append(t)
        self.data.append(np.asarray(sample, dtype=float).copy())

    def points(self, t_min: float = -math.inf, t_max: float = math.inf) -> np.ndarray:
        """All (c1..cs) samples with t_min <= t < t_max as an (N, s) array."""
        chunks = [d for t, d in zip(self.times, self.data) if t_min <= t < t_max]
        if not chunks:
            return np.empty((0, len(self.species)))
        return np.concatenate(chunks, axis=0)

    def rows(self):
        for t, block in zip(self.times, self.data):
            for cell, conc in zip(self.cells, block):
                yield (t, *cell, *conc)


def max_pairwise_distance(points: np.ndarray, block: int = 1024) -> float:
    """Largest Euclidean distance between any two rows of an (N, d) array."""
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] < 2:
        return 0.0
    best = 0.0
    for start in range(0, pts.shape[0], block):
        chunk = pts[start:start + block]
        d2 = ((chunk[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1)
        best = max(best, float(d2.max()))
    return math.sqrt(best)
