"""Transverse eigenmodes of 1D permittivity slices.

The slice operator mirrors the 2D stencil exactly (same staggered
differences, same edge averaging), so a computed mode inserted into a
uniform-along-x 2D grid satisfies the discrete wave equation to roundoff.
A field of the form ``m(y) exp(i beta i)`` solves the 2D equation when

    (omega^2 I - K) m = 4 sin^2(beta/2) diag(p_long) m

where K is the transverse part of the double curl, ``p_long`` the inverse
permittivity at longitudinal edges, and the eigenvalue fixes the discrete
propagation constant beta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidGrid, NoSuchMode, PortInPml, RequiresPeriodic
from .grid import Absorbing, GridOperators, GridSpec, Periodic
from .physics import SourceSpec


@dataclass(frozen=True)
class ModeProfile:
    profile: np.ndarray  # unit l2 norm over the slice
    beta: float
    mode_index: int
    slice_eps: np.ndarray
    omega: float

    @property
    def mu(self) -> float:
        """Eigenvalue 4 sin^2(beta/2) of the transverse problem."""
        return 4.0 * np.sin(self.beta / 2.0) ** 2


def _slice_matrices(p: np.ndarray, periodic: bool) -> tuple[np.ndarray, np.ndarray]:
    """Transverse stiffness K and longitudinal edge weights diag(p_long)."""
    n = p.size
    k = np.zeros((n, n))
    # transverse edge (j+1/2) averages cells j and j+1, matching the 2D map
    for j in range(n):
        if j + 1 < n:
            pe = 0.5 * (p[j] + p[j + 1])
            k[j, j] += pe
            k[j + 1, j + 1] += pe
            k[j, j + 1] -= pe
            k[j + 1, j] -= pe
        elif periodic:
            pe = 0.5 * (p[j] + p[0])
            k[j, j] += pe
            k[0, 0] += pe
            k[j, 0] -= pe
            k[0, j] -= pe
        else:
            # truncated top edge: zero ghost cell, single-neighbor weight 1;
            # the edge below the first cell does not exist and adds nothing
            k[j, j] += p[j]
    # longitudinal edges average across x; on a uniform slice that is p itself
    return k, p.copy()


def count_guided_modes(slice_eps: np.ndarray, omega: float) -> int:
    return len(_guided_eigenpairs(np.asarray(slice_eps, dtype=float), omega)[0])


def _guided_eigenpairs(eps: np.ndarray, omega: float):
    if np.any(eps == 0.0):
        raise InvalidGrid("slice permittivity must be nonzero")
    p = 1.0 / eps
    k, p_long = _slice_matrices(p, periodic=False)
    lhs = omega**2 * np.eye(p.size) - k
    if np.all(p > 0):
        mu, vecs = scipy.linalg.eigh(lhs, np.diag(p_long))
        mu = mu.astype(complex)
        vecs = vecs.astype(complex)
    else:
        mu, vecs = scipy.linalg.eig(lhs, np.diag(p_long))
        order = np.argsort(-mu.real)
        mu, vecs = mu[order], vecs[:, order]
    eps_ends = max(eps[0].real, eps[-1].real)
    guided = [
        idx
        for idx in range(mu.size)
        if abs(mu[idx].imag) < 1e-9 * max(1.0, abs(mu[idx].real))
        and omega**2 * eps_ends < mu[idx].real < 4.0
    ]
    guided.sort(key=lambda idx: -mu[idx].real)
    return [mu[i].real for i in guided], [vecs[:, i] for i in guided]


def _fix_phase(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v)))
    ph = v[k] / abs(v[k])
    return v / ph


def solve_waveguide_mode(slice_eps, omega: float, mode_index: int) -> ModeProfile:
    """Guided mode of a truncated 1D slice, ordered by decreasing beta."""
    eps = np.asarray(slice_eps, dtype=float).ravel()
    mus, vecs = _guided_eigenpairs(eps, omega)
    if mode_index >= len(mus):
        raise NoSuchMode(
            f"slice supports {len(mus)} guided mode(s) at omega={omega:.4g}, "
            f"mode {mode_index} requested"
        )
    mu = mus[mode_index]
    beta = 2.0 * np.arcsin(np.sqrt(mu) / 2.0)
    profile = _fix_phase(vecs[mode_index])
    return ModeProfile(profile, float(beta), mode_index, eps, omega)


def plane_wave_profile(grid: GridSpec, eps: float = 1.0) -> ModeProfile:
    """Uniform transverse profile for free-space devices (periodic y only)."""
    if not isinstance(grid.boundary_y, Periodic):
        raise RequiresPeriodic("plane-wave profiles need periodic y-boundaries")
    omega = grid.omega
    arg = omega * np.sqrt(eps) / 2.0
    if arg >= 1.0:
        raise InvalidGrid("medium is below the grid Nyquist limit at this wavelength")
    beta = 2.0 * np.arcsin(arg)
    profile = np.full(grid.ny, 1.0 / np.sqrt(grid.ny), dtype=complex)
    return ModeProfile(profile, float(beta), 0, np.full(grid.ny, eps), omega)


def mode_source(
    mode: ModeProfile,
    column: int,
    ops: GridOperators,
    direction: int = +1,
    amplitude: complex = 1.0,
) -> SourceSpec:
    """Two-line unidirectional current source exciting the given mode.

    Places J_y lines on the edge columns ``column + 1/2`` and
    ``column + 3/2`` with a relative phase set by the mode's beta, so the
    wave launched against ``direction`` cancels exactly.
    """
    grid = ops.grid
    nx, ny, n = grid.nx, grid.ny, grid.n_cells
    if mode.profile.size != ny:
        raise InvalidGrid("mode profile height does not match the grid")
    if direction not in (+1, -1):
        raise ValueError("direction must be +1 or -1")
    bx = grid.boundary_x
    if isinstance(bx, Absorbing) and bx.pml is not None:
        t = bx.pml.thickness
        if column < t or column + 1 >= nx - t:
            raise PortInPml(f"source columns {column},{column + 1} intersect the x PML")
    if not 0 <= column < nx - 1:
        raise InvalidGrid("source column out of range")
    j = np.zeros(2 * n, dtype=complex)
    gamma = -np.exp(-1j * direction * mode.beta)
    j[n + column * ny : n + (column + 1) * ny] = amplitude * mode.profile
    j[n + (column + 1) * ny : n + (column + 2) * ny] = amplitude * gamma * mode.profile
    return j
