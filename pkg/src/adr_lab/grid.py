"""Uniform rectangular grids and multi-species concentration fields.

Grids are vertex-centered: node i sits at x = i*dx for i in [0, n-1], so the
first and last nodes lie on the physical boundary and dx = L/(n-1).  Fields
store one scalar array per species, species-major, and carry the Dirichlet
boundary value (zero by default) on every boundary node.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError, InputError

__all__ = [
    "Grid2D",
    "Grid3D",
    "Field",
    "TransportParams",
    "make_grid2d",
    "make_grid3d",
    "zero_dirichlet",
    "sample_initial_2d",
]


def _check_axis(name_n: str, n: int, name_l: str, L: float) -> None:
    if n < 3:
        raise ConfigurationError(f"{name_n} must be >= 3, got {n}")
    if not (L > 0):
        raise ConfigurationError(f"{name_l} must be positive, got {L}")


@dataclass(frozen=True)
class Grid2D:
    """Uniform vertex-centered 2-D grid with nx*ny nodes over [0,Lx]x[0,Ly]."""

    nx: int
    ny: int
    Lx: float
    Ly: float
    dx: float = dc_field(init=False)
    dy: float = dc_field(init=False)

    def __post_init__(self):
        _check_axis("nx", self.nx, "Lx", self.Lx)
        _check_axis("ny", self.ny, "Ly", self.Ly)
        object.__setattr__(self, "dx", self.Lx / (self.nx - 1))
        object.__setattr__(self, "dy", self.Ly / (self.ny - 1))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def num_cells(self) -> int:
        return self.nx * self.ny

    @property
    def cell_volume(self) -> float:
        return self.dx * self.dy

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Node coordinate arrays (x_i, y_j) along each axis."""
        return (
            np.arange(self.nx) * self.dx,
            np.arange(self.ny) * self.dy,
        )

    def flat_index(self, i: int, j: int) -> int:
        if not (0 <= i < self.nx and 0 <= j < self.ny):
            raise InputError(f"cell ({i}, {j}) outside grid {self.shape}")
        return i * self.ny + j

    def cell_at(self, flat: int) -> tuple[int, int]:
        if not (0 <= flat < self.num_cells):
            raise InputError(f"flat index {flat} outside grid {self.shape}")
        return divmod(flat, self.ny)


@dataclass(frozen=True)
class Grid3D:
    """Uniform vertex-centered 3-D grid with nx*ny*nz nodes."""

    nx: int
    ny: int
    nz: int
    Lx: float
    Ly: float
    Lz: float
    dx: float = dc_field(init=False)
    dy: float = dc_field(init=False)
    dz: float = dc_field(init=False)

    def __post_init__(self):
        _check_axis("nx", self.nx, "Lx", self.Lx)
        _check_axis("ny", self.ny, "Ly", self.Ly)
        _check_axis("nz", self.nz, "Lz", self.Lz)
        object.__setattr__(self, "dx", self.Lx / (self.nx - 1))
        object.__setattr__(self, "dy", self.Ly / (self.ny - 1))
        object.__setattr__(self, "dz", self.Lz / (self.nz - 1))

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def num_cells(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def cell_volume(self) -> float:
        return self.dx * self.dy * self.dz

    def coords(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (
            np.arange(self.nx) * self.dx,
            np.arange(self.ny) * self.dy,
            np.arange(self.nz) * self.dz,
        )

    def flat_index(self, i: int, j: int, k: int) -> int:
        if not (0 <= i < self.nx and 0 <= j < self.ny and 0 <= k < self.nz):
            raise InputError(f"cell ({i}, {j}, {k}) outside grid {self.shape}")
        return (i * self.ny + j) * self.nz + k

    def cell_at(self, flat: int) -> tuple[int, int, int]:
        if not (0 <= flat < self.num_cells):
            raise InputError(f"flat index {flat} outside grid {self.shape}")
        ij, k = divmod(flat, self.nz)
        i, j = divmod(ij, self.ny)
        return i, j, k


@dataclass
class Field:
    """Per-species concentrations on a grid, shape (species, *grid.shape).

    Boundary nodes carry the Dirichlet value after every operation that
    returns a Field; interior nodes hold the evolving state.
    """

    grid: Grid2D | Grid3D
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        expected = (self.species_count,) + self.grid.shape
        if self.values.shape != expected:
            raise ConfigurationError(
                f"field values shape {self.values.shape} does not match "
                f"(species, *grid) = {expected}"
            )

    @property
    def species_count(self) -> int:
        return self.values.shape[0] if self.values.ndim > len(self.grid.shape) else 1

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    @classmethod
    def zeros(cls, grid: Grid2D | Grid3D, species_count: int = 1) -> "Field":
        if species_count < 1:
            raise ConfigurationError(f"species_count must be >= 1, got {species_count}")
        return cls(grid, np.zeros((species_count,) + grid.shape))


@dataclass(frozen=True)
class TransportParams:
    """Constant per-axis advection velocities u and diffusion coefficients k.

    Entries must be nonnegative.  The solvers derive their stencils for
    positive constants; zero entries are accepted so that single-physics
    configurations (pure reaction, pure diffusion) remain expressible, and
    negative entries are always rejected.
    """

    u: tuple[float, ...]
    k: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(float(v) for v in self.u))
        object.__setattr__(self, "k", tuple(float(v) for v in self.k))
        if len(self.u) != len(self.k):
            raise ConfigurationError(
                f"u has {len(self.u)} axes but k has {len(self.k)}"
            )
        if any(v < 0 for v in self.u):
            raise ConfigurationError(f"advection velocities must be >= 0, got {self.u}")
        if any(v < 0 for v in self.k):
            raise ConfigurationError(f"diffusion coefficients must be >= 0, got {self.k}")

    @property
    def ndim(self) -> int:
        return len(self.u)


def make_grid2d(nx: int, ny: int, Lx: float, Ly: float) -> Grid2D:
    """Build a validated, immutable 2-D grid; spacing dx = Lx/(nx-1)."""
    return Grid2D(nx, ny, Lx, Ly)


def make_grid3d(nx: int, ny: int, nz: int, Lx: float, Ly: float, Lz: float) -> Grid3D:
    return Grid3D(nx, ny, nz, Lx, Ly, Lz)


def zero_dirichlet(field: Field, value: float = 0.0) -> Field:
    """Set every boundary node of every species to `value` (default 0), in place.

    Interior nodes are untouched.  Idempotent.  Returns the same field.
    """
    v = field.values
    ndim_space = len(field.grid.shape)
    for axis in range(1, ndim_space + 1):
        idx_lo = [slice(None)] * v.ndim
        idx_hi = [slice(None)] * v.ndim
        idx_lo[axis] = 0
        idx_hi[axis] = -1
        v[tuple(idx_lo)] = value
        v[tuple(idx_hi)] = value
    return field


def sample_initial_2d(grid: Grid2D, f: Callable[[float, float], float]) -> Field:
    """Sample f(x, y) at every node, then apply zero Dirichlet boundaries.

    f is evaluated with numpy broadcasting when possible, falling back to
    pointwise calls for non-vectorized callables.
    """
    x, y = grid.coords()
    try:
        vals = np.asarray(f(x[:, None], y[None, :]), dtype=float)
        if vals.shape != grid.shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.empty(grid.shape)
        for i, xi in enumerate(x):
            for j, yj in enumerate(y):
                vals[i, j] = f(xi, yj)
    bad = ~np.isfinite(vals)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise InputError(
            f"initial condition is non-finite at node ({i}, {j}), "
            f"(x, y) = ({x[i]}, {y[j]})"
        )
    return zero_dirichlet(Field(grid, vals[None, :, :]))
