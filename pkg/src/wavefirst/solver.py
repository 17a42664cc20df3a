"""Forward frequency-domain solves: given a structure and a current source,
find the H_z field with A(p) x = b(p).

Direct sparse factorization is the default (2D systems are small); an
ILU-preconditioned GMRES fallback is available for large grids.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .errors import NonConvergence, SingularSystem
from .grid import GridOperators
from .physics import FieldState, SourceSpec, Structure, assemble_A, assemble_b


@dataclass(frozen=True)
class SolveReport:
    relative_residual: float
    method: str
    iterations: int = 0


def simulate(
    s: Structure,
    src: SourceSpec | None,
    ops: GridOperators,
    method: str = "direct",
    tol: float = 1e-10,
    maxiter: int = 5000,
) -> tuple[FieldState, SolveReport]:
    """Solve the forward problem A(p) x = b(p).

    A zero source returns the zero field (the homogeneous system convention)
    rather than raising.
    """
    a = assemble_A(s, ops)
    b = assemble_b(s, src, ops)
    nb = np.linalg.norm(b)
    if nb == 0.0:
        return np.zeros(ops.n_cells, dtype=complex), SolveReport(0.0, method)

    if method == "direct":
        try:
            lu = spla.splu(a.tocsc())
            x = lu.solve(b)
            for _ in range(2):  # iterative refinement against mild ill-conditioning
                r = b - a @ x
                if np.linalg.norm(r) <= tol * nb:
                    break
                x = x + lu.solve(r)
        except RuntimeError as exc:
            raise SingularSystem(f"sparse factorization failed: {exc}") from exc
        rel = float(np.linalg.norm(b - a @ x) / nb)
        if not np.all(np.isfinite(x)) or rel > 1e3 * tol:
            raise SingularSystem(
                f"direct solve left relative residual {rel:.3e}; "
                "the frequency may sit on a resonance of the discrete operator"
            )
        return x, SolveReport(rel, "direct")

    if method == "iterative":
        try:
            ilu = spla.spilu(a.tocsc(), drop_tol=1e-5, fill_factor=20)
        except RuntimeError as exc:
            raise SingularSystem(f"ILU factorization failed: {exc}") from exc
        pre = spla.LinearOperator(a.shape, ilu.solve)
        count = {"n": 0}

        def cb(_):
            count["n"] += 1

        x, info = spla.gmres(a, b, rtol=tol, atol=0.0, M=pre, maxiter=maxiter, callback=cb)
        if info != 0:
            raise NonConvergence(f"GMRES stalled after {count['n']} iterations (info={info})")
        rel = float(np.linalg.norm(b - a @ x) / nb)
        return x, SolveReport(rel, "iterative", count["n"])

    raise ValueError(f"unknown solve method {method!r}")


def fields_to_e(
    x: FieldState, s: Structure, ops: GridOperators, src: SourceSpec | None = None
) -> np.ndarray:
    """Edge electric fields E = (curl H - J) / (i eps omega).

    Returns a length 2*n_cells vector (E_x block then E_y block) using the
    same edge layout as the curl operators; the edge permittivity is the
    averaged design value.
    """
    j = np.zeros(2 * ops.n_cells, dtype=complex) if src is None else np.asarray(src)
    edge_inv_eps = ops.edge_map @ s.p
    return edge_inv_eps * (ops.ch @ x - j) / (1j * ops.omega)
