"""Staggered 2D grid for the TE mode (H_z at cell centers, E_x/E_y on edges).

Conventions used throughout the package:

* cells are indexed ``(i, j)`` with ``i`` along x (propagation axis in all
  shipped devices) and ``j`` along y; the flat index is ``i * ny + j``
  (row-major, y-fastest).
* E_x lives on edges at ``(i, j + 1/2)`` and occupies flat indices
  ``0 .. n_cells``; E_y lives at ``(i + 1/2, j)`` and occupies
  ``n_cells .. 2 n_cells``.
* grid spacing is 1, vacuum permittivity/permeability are 1, so the angular
  frequency is ``2 pi / wavelength`` with the wavelength in grid points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import InvalidGrid

# Normal-incidence reflection targeted by the default absorber strength.
_PML_TARGET_REFLECTION = 1e-4


@dataclass(frozen=True)
class PmlParams:
    """Stretched-coordinate absorber profile for one boundary pair."""

    thickness: int = 10
    max_sigma: float | None = None
    polynomial_order: int = 3

    def __post_init__(self):
        if self.thickness < 4:
            raise InvalidGrid(f"PML thickness must be >= 4 cells, got {self.thickness}")
        if self.polynomial_order < 1:
            raise InvalidGrid("PML polynomial order must be a positive integer")
        if self.max_sigma is None:
            # conductivity scale giving the target theoretical reflection
            sigma = (
                (self.polynomial_order + 1)
                * math.log(1.0 / _PML_TARGET_REFLECTION)
                / (2.0 * self.thickness)
            )
            object.__setattr__(self, "max_sigma", sigma)
        elif self.max_sigma <= 0:
            raise InvalidGrid("PML max_sigma must be positive")


@dataclass(frozen=True)
class Periodic:
    """Wrap-around boundary pair (normal incidence, zero phase shift)."""


@dataclass(frozen=True)
class Absorbing:
    """Truncated boundary pair, optionally backed by a PML.

    ``pml=None`` gives a bare truncation; design boxes use this since their
    outermost field layers are pinned by the objective rather than absorbed.
    """

    pml: PmlParams | None = field(default_factory=PmlParams)


Boundary = Periodic | Absorbing


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    wavelength: float
    boundary_x: Boundary = field(default_factory=Absorbing)
    boundary_y: Boundary = field(default_factory=Absorbing)

    def __post_init__(self):
        if self.nx < 4 or self.ny < 4:
            raise InvalidGrid(f"grid must be at least 4x4 cells, got {self.nx}x{self.ny}")
        if self.wavelength <= 2:
            raise InvalidGrid(
                f"wavelength {self.wavelength} grid points is at or below the Nyquist limit"
            )
        if isinstance(self.boundary_x, Periodic) and not isinstance(self.boundary_y, Periodic):
            # Physical runs wrap y only (free-space devices); a periodic x
            # pair is accepted solely in the fully periodic diagnostic case.
            raise InvalidGrid("periodic x-boundaries require periodic y-boundaries")
        for name, b in (("x", self.boundary_x), ("y", self.boundary_y)):
            if isinstance(b, Absorbing) and b.pml is not None:
                if 2 * b.pml.thickness >= min(self.nx, self.ny):
                    raise InvalidGrid(
                        f"PML thickness {b.pml.thickness} does not fit the {name}-axis"
                    )

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)


def sparse_from_entries(rows, cols, values, shape) -> sp.csr_matrix:
    """Assemble a CSR operator from triplets; duplicate entries are summed."""
    m = sp.coo_matrix((values, (rows, cols)), shape=shape, dtype=complex)
    return m.tocsr()


def _stretch_factors(n: int, boundary: Boundary, omega: float):
    """1/s at integer (backward) and half-integer (forward) positions."""
    inv_b = np.ones(n, dtype=complex)
    inv_f = np.ones(n, dtype=complex)
    if not isinstance(boundary, Absorbing) or boundary.pml is None:
        return inv_b, inv_f
    pml = boundary.pml
    d, m, smax = pml.thickness, pml.polynomial_order, pml.max_sigma

    def s(pos: float) -> complex:
        depth = max(d - 0.5 - pos, pos - (n - d - 0.5), 0.0)
        rho = min(depth / d, 1.0)
        return 1.0 + 1j * smax * rho**m / omega

    for i in range(n):
        inv_b[i] = 1.0 / s(float(i))
        inv_f[i] = 1.0 / s(i + 0.5)
    return inv_b, inv_f


def build_curls(grid: GridSpec) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Discrete curl pair (Ch: centers->edges, Ce: edges->centers).

    Any PML stretch factors are folded into the difference coefficients.  On
    fully periodic, PML-free grids the pair satisfies ``Ce == Ch.T`` exactly
    (the discrete curl is self-adjoint; see test suite).
    """
    nx, ny, n = grid.nx, grid.ny, grid.n_cells
    omega = grid.omega
    per_x = isinstance(grid.boundary_x, Periodic)
    per_y = isinstance(grid.boundary_y, Periodic)
    inv_bx, inv_fx = _stretch_factors(nx, grid.boundary_x, omega)
    inv_by, inv_fy = _stretch_factors(ny, grid.boundary_y, omega)

    def cell(i, j):
        return i * ny + j

    rows, cols, vals = [], [], []
    # E_x rows: dH/dy at (i, j+1/2)
    for i in range(nx):
        for j in range(ny):
            e = cell(i, j)
            w = inv_fy[j]
            rows.append(e)
            cols.append(cell(i, j))
            vals.append(-w)
            if j + 1 < ny:
                rows.append(e)
                cols.append(cell(i, j + 1))
                vals.append(w)
            elif per_y:
                rows.append(e)
                cols.append(cell(i, 0))
                vals.append(w)
    # E_y rows: -dH/dx at (i+1/2, j)
    for i in range(nx):
        for j in range(ny):
            e = n + cell(i, j)
            w = inv_fx[i]
            rows.append(e)
            cols.append(cell(i, j))
            vals.append(w)
            if i + 1 < nx:
                rows.append(e)
                cols.append(cell(i + 1, j))
                vals.append(-w)
            elif per_x:
                rows.append(e)
                cols.append(cell(0, j))
                vals.append(-w)
    ch = sparse_from_entries(rows, cols, vals, (2 * n, n))

    rows, cols, vals = [], [], []
    # cell rows: dEy/dx - dEx/dy at (i, j)
    for i in range(nx):
        for j in range(ny):
            c = cell(i, j)
            wx = inv_bx[i]
            rows.append(c)
            cols.append(n + cell(i, j))
            vals.append(wx)
            if i > 0:
                rows.append(c)
                cols.append(n + cell(i - 1, j))
                vals.append(-wx)
            elif per_x:
                rows.append(c)
                cols.append(n + cell(nx - 1, j))
                vals.append(-wx)
            wy = inv_by[j]
            rows.append(c)
            cols.append(cell(i, j))
            vals.append(-wy)
            if j > 0:
                rows.append(c)
                cols.append(cell(i, j - 1))
                vals.append(wy)
            elif per_y:
                rows.append(c)
                cols.append(cell(i, ny - 1))
                vals.append(wy)
    ce = sparse_from_entries(rows, cols, vals, (n, 2 * n))
    return ch, ce


def build_edge_map(grid: GridSpec) -> sp.csr_matrix:
    """Averaging map from cell-centered design values to E-edge locations.

    Interior edges average their two adjacent cells with weight 1/2; at a
    truncated boundary the single interior neighbor gets weight 1, so every
    row sums to exactly 1.
    """
    nx, ny, n = grid.nx, grid.ny, grid.n_cells
    per_x = isinstance(grid.boundary_x, Periodic)
    per_y = isinstance(grid.boundary_y, Periodic)

    def cell(i, j):
        return i * ny + j

    rows, cols, vals = [], [], []
    for i in range(nx):
        for j in range(ny):
            e = cell(i, j)  # E_x edge (i, j+1/2): neighbors (i,j) and (i,j+1)
            if j + 1 < ny or per_y:
                rows += [e, e]
                cols += [cell(i, j), cell(i, (j + 1) % ny)]
                vals += [0.5, 0.5]
            else:
                rows.append(e)
                cols.append(cell(i, j))
                vals.append(1.0)
    for i in range(nx):
        for j in range(ny):
            e = n + cell(i, j)  # E_y edge (i+1/2, j): neighbors (i,j) and (i+1,j)
            if i + 1 < nx or per_x:
                rows += [e, e]
                cols += [cell(i, j), cell((i + 1) % nx, j)]
                vals += [0.5, 0.5]
            else:
                rows.append(e)
                cols.append(cell(i, j))
                vals.append(1.0)
    m = sp.coo_matrix((vals, (rows, cols)), shape=(2 * n, n))
    return m.tocsr()


def pml_cell_mask(grid: GridSpec) -> np.ndarray:
    """Boolean (nx, ny) array marking cells inside an absorbing layer."""
    mask = np.zeros((grid.nx, grid.ny), dtype=bool)
    bx, by = grid.boundary_x, grid.boundary_y
    if isinstance(bx, Absorbing) and bx.pml is not None:
        t = bx.pml.thickness
        mask[:t, :] = True
        mask[-t:, :] = True
    if isinstance(by, Absorbing) and by.pml is not None:
        t = by.pml.thickness
        mask[:, :t] = True
        mask[:, -t:] = True
    return mask


class GridOperators:
    """Immutable bundle of the discrete operators for one grid.

    Construction is pure; instances are safe to share across threads.
    """

    def __init__(self, grid: GridSpec):
        self.grid = grid
        self.ch, self.ce = build_curls(grid)
        self.edge_map = build_edge_map(grid)
        self.omega = grid.omega
        self.n_cells = grid.n_cells

    @cached_property
    def stencil(self) -> sp.csr_matrix:
        """Boolean cell-to-cell coupling pattern of the wave operator."""
        pat = abs(self.ce) @ abs(self.ch) + sp.identity(self.n_cells)
        pat.data[:] = 1.0
        return pat.tocsr()


def build_operators(grid: GridSpec) -> GridOperators:
    return GridOperators(grid)
