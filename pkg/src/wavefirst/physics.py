"""Bilinear-form assembly for the frequency-domain wave equation.

The residual of a candidate (field, structure) pair factors two ways:

    A(p) x - b(p) = B(x) p - d(x)

with ``A(p) = Ce diag(M p) Ch - omega^2 I`` acting on the field and
``B(x) = Ce diag(Ch x - J) M`` acting on the inverse permittivity.  Both
sides are assembled from the same curl pair, so the identity holds to
machine precision; it is what lets the design loop alternate between two
convex sub-problems.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch
from .grid import GridOperators

# Defaults from the silicon/air material system: p = 1/eps.
DEFAULT_P_LO = 1.0 / 12.25
DEFAULT_P_HI = 1.0


@dataclass
class Structure:
    """Design vector p = 1/eps per cell, with bounds and a vary/frozen mask.

    Frozen cells (vary_mask False) may hold any nonzero value, including
    negative p for metals; varying cells must stay inside [p_lo, p_hi].
    """

    shape: tuple[int, int]
    p: np.ndarray
    p_lo: float = DEFAULT_P_LO
    p_hi: float = DEFAULT_P_HI
    vary_mask: np.ndarray | None = None

    def __post_init__(self):
        n = self.shape[0] * self.shape[1]
        self.p = np.asarray(self.p, dtype=float).ravel().copy()
        if self.p.size != n:
            raise DimensionMismatch(f"p has {self.p.size} entries, grid has {n} cells")
        if self.vary_mask is None:
            self.vary_mask = np.ones(n, dtype=bool)
        else:
            self.vary_mask = np.asarray(self.vary_mask, dtype=bool).ravel().copy()
            if self.vary_mask.size != n:
                raise DimensionMismatch("vary_mask size does not match the grid")
        if self.p_lo > self.p_hi:
            raise ValueError("p_lo must not exceed p_hi")
        v = self.vary_mask
        if np.any(self.p[v] < self.p_lo - 1e-12) or np.any(self.p[v] > self.p_hi + 1e-12):
            raise ValueError("initial p violates its bounds on varying cells")
        if np.any(self.p[~v] == 0.0):
            raise ValueError("frozen cells must hold nonzero p")

    @property
    def n_cells(self) -> int:
        return self.p.size

    @property
    def eps(self) -> np.ndarray:
        return 1.0 / self.p

    def replace_p(self, p_new: np.ndarray) -> "Structure":
        s = Structure(self.shape, p_new, self.p_lo, self.p_hi, self.vary_mask.copy())
        return s

    @classmethod
    def uniform(cls, shape, value, p_lo=DEFAULT_P_LO, p_hi=DEFAULT_P_HI, vary_mask=None):
        n = shape[0] * shape[1]
        return cls(shape, np.full(n, value, dtype=float), p_lo, p_hi, vary_mask)


# A field state is a complex H_z vector over the cells; a source is a complex
# current vector over the 2*n_cells E-edges.
FieldState = np.ndarray
SourceSpec = np.ndarray


def _check_cells(ops: GridOperators, v: np.ndarray, what: str) -> np.ndarray:
    v = np.asarray(v).ravel()
    if v.size != ops.n_cells:
        raise DimensionMismatch(f"{what} has {v.size} entries, grid has {ops.n_cells} cells")
    return v


def _check_edges(ops: GridOperators, v: np.ndarray | None) -> np.ndarray:
    if v is None:
        return np.zeros(2 * ops.n_cells, dtype=complex)
    v = np.asarray(v, dtype=complex).ravel()
    if v.size != 2 * ops.n_cells:
        raise DimensionMismatch(
            f"source has {v.size} entries, grid has {2 * ops.n_cells} edges"
        )
    return v


def assemble_A(s: Structure, ops: GridOperators) -> sp.csr_matrix:
    """Wave operator A(p) = Ce diag(M p) Ch - omega^2 I."""
    p = _check_cells(ops, s.p, "p")
    edge_p = ops.edge_map @ p
    a = ops.ce @ sp.diags(edge_p.astype(complex)) @ ops.ch
    a = a - (ops.omega**2) * sp.identity(ops.n_cells, dtype=complex, format="csr")
    return a.tocsr()


def assemble_b(s: Structure, src: SourceSpec | None, ops: GridOperators) -> np.ndarray:
    """Source vector b(p) = Ce diag(M p) J."""
    p = _check_cells(ops, s.p, "p")
    j = _check_edges(ops, src)
    return ops.ce @ ((ops.edge_map @ p) * j)


def assemble_B_full(x: FieldState, ops: GridOperators, src: SourceSpec | None = None) -> sp.csr_matrix:
    """Structure-side operator B(x) = Ce diag(Ch x - J) M over all cells."""
    x = _check_cells(ops, np.asarray(x, dtype=complex), "x")
    j = _check_edges(ops, src)
    w = ops.ch @ x - j
    return (ops.ce @ sp.diags(w) @ ops.edge_map).tocsr()


def assemble_B(
    x: FieldState, s: Structure, ops: GridOperators, src: SourceSpec | None = None
) -> tuple[sp.csr_matrix, np.ndarray]:
    """B(x) restricted to varying cells, plus the frozen-cell right-hand side.

    Returns ``(B_vary, rhs)`` such that the residual is
    ``B_vary p[vary] - rhs`` with the frozen-cell contributions folded into
    ``rhs = d(x) - B_frozen p[frozen]``.
    """
    b_full = assemble_B_full(x, ops, src)
    vary = s.vary_mask
    frozen_p = np.where(vary, 0.0, s.p)
    rhs = assemble_d(x, ops) - b_full @ frozen_p
    return b_full[:, vary].tocsr(), rhs


def assemble_d(x: FieldState, ops: GridOperators) -> np.ndarray:
    """Field-side right-hand side d(x) = omega^2 x."""
    x = _check_cells(ops, np.asarray(x, dtype=complex), "x")
    return (ops.omega**2) * x


def physics_residual(
    s: Structure, x: FieldState, ops: GridOperators, src: SourceSpec | None = None
) -> float:
    """l2 norm of the wave-equation violation, ||A(p) x - b(p)||."""
    a = assemble_A(s, ops)
    b = assemble_b(s, src, ops)
    x = _check_cells(ops, np.asarray(x, dtype=complex), "x")
    return float(np.linalg.norm(a @ x - b))
