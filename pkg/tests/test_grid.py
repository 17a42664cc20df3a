import numpy as np
import pytest
import scipy.sparse as sp

from wavefirst.errors import InvalidGrid
from wavefirst.grid import (
    Absorbing,
    GridSpec,
    Periodic,
    PmlParams,
    build_curls,
    build_edge_map,
    build_operators,
    pml_cell_mask,
    sparse_from_entries,
)


def periodic_grid(nx=8, ny=8, wl=10.0):
    return GridSpec(nx, ny, wl, boundary_x=Periodic(), boundary_y=Periodic())


def test_omega_definition():
    g = GridSpec(8, 8, 25.0, boundary_x=Absorbing(None), boundary_y=Absorbing(None))
    assert g.omega == 2.0 * np.pi / 25.0


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(nx=3, ny=8, wavelength=10.0),
        dict(nx=8, ny=2, wavelength=10.0),
        dict(nx=8, ny=8, wavelength=2.0),
        dict(nx=8, ny=8, wavelength=1.5),
    ],
)
def test_invalid_grids_rejected(kwargs):
    with pytest.raises(InvalidGrid):
        GridSpec(**kwargs)


def test_periodic_x_requires_periodic_y():
    with pytest.raises(InvalidGrid):
        GridSpec(8, 8, 10.0, boundary_x=Periodic(), boundary_y=Absorbing(None))
    GridSpec(8, 8, 10.0, boundary_x=Absorbing(None), boundary_y=Periodic())


def test_pml_params_validation():
    with pytest.raises(InvalidGrid):
        PmlParams(thickness=3)
    with pytest.raises(InvalidGrid):
        PmlParams(max_sigma=-1.0)
    with pytest.raises(InvalidGrid):
        GridSpec(12, 12, 10.0, boundary_x=Absorbing(PmlParams(thickness=6)))
    assert PmlParams().max_sigma > 0


def test_adjoint_identity_fully_periodic():
    ch, ce = build_curls(periodic_grid(8, 8))
    assert abs(ce - ch.T).max() == 0.0


def test_curl_annihilates_constants_periodic():
    ch, _ = build_curls(periodic_grid(8, 8))
    ones = np.ones(64)
    assert np.max(np.abs(ch @ ones)) == 0.0


def test_curl_shapes():
    g = GridSpec(6, 9, 10.0, boundary_x=Absorbing(None), boundary_y=Absorbing(None))
    ch, ce = build_curls(g)
    assert ch.shape == (2 * 54, 54)
    assert ce.shape == (54, 2 * 54)


def test_pml_leaves_interior_untouched():
    pml = PmlParams(thickness=4)
    g_pml = GridSpec(16, 16, 10.0, boundary_x=Absorbing(pml), boundary_y=Absorbing(pml))
    g_bare = GridSpec(16, 16, 10.0, boundary_x=Absorbing(None), boundary_y=Absorbing(None))
    ch1, ce1 = build_curls(g_pml)
    ch0, ce0 = build_curls(g_bare)
    interior = np.zeros((16, 16), dtype=bool)
    interior[5:-5, 5:-5] = True
    cells = np.flatnonzero(interior.ravel())
    # rows of Ch indexed by edges touching only interior cells
    edge_sel = np.zeros(2 * 256, dtype=bool)
    for blk in (0, 256):
        for c in cells:
            edge_sel[blk + c] = True
    d_ch = abs(ch1 - ch0).tocsr()
    assert d_ch[edge_sel][:, cells].max() == 0.0
    d_ce = abs(ce1 - ce0).tocsr()
    assert d_ce[cells][:, edge_sel].max() == 0.0


def test_edge_map_rows_sum_to_one():
    for g in (
        periodic_grid(6, 7),
        GridSpec(6, 7, 10.0, boundary_x=Absorbing(None), boundary_y=Absorbing(None)),
        GridSpec(6, 7, 10.0, boundary_x=Absorbing(None), boundary_y=Periodic()),
    ):
        m = build_edge_map(g)
        sums = np.asarray(m.sum(axis=1)).ravel()
        assert np.allclose(sums, 1.0, atol=0.0)
        assert m.min() >= 0.0


def test_edge_map_preserves_constants():
    g = GridSpec(5, 6, 10.0, boundary_x=Absorbing(None), boundary_y=Absorbing(None))
    m = build_edge_map(g)
    p = np.full(30, 3.7)
    assert np.allclose(m @ p, 3.7, atol=0.0)


def test_edge_map_interior_rows_are_half_half():
    g = GridSpec(4, 4, 10.0, boundary_x=Absorbing(None), boundary_y=Absorbing(None))
    m = build_edge_map(g).tocsr()
    # E_x edge (1, 1+1/2) averages cells (1,1) and (1,2)
    row = m[1 * 4 + 1].toarray().ravel()
    assert sorted(row[row != 0]) == [0.5, 0.5]
    assert row[1 * 4 + 1] == 0.5 and row[1 * 4 + 2] == 0.5


def test_edge_map_checkerboard_average():
    g = GridSpec(6, 6, 10.0, boundary_x=Absorbing(None), boundary_y=Absorbing(None))
    m = build_edge_map(g)
    a, b = 0.2, 0.8
    ii, jj = np.meshgrid(np.arange(6), np.arange(6), indexing="ij")
    p = np.where((ii + jj) % 2 == 0, a, b).ravel().astype(float)
    vals = m @ p
    # interior edges (two neighbors of opposite parity) all equal (a+b)/2
    two_entry = np.asarray((m != 0).sum(axis=1)).ravel() == 2
    assert np.allclose(vals[two_entry], (a + b) / 2.0, atol=0.0)


def test_sparse_from_entries_sums_duplicates():
    m = sparse_from_entries([0, 0, 1], [1, 1, 0], [1.0, 2.0, 5.0], (2, 2))
    assert m[0, 1] == 3.0 and m[1, 0] == 5.0


def test_pml_cell_mask():
    g = GridSpec(24, 30, 10.0, boundary_x=Absorbing(PmlParams(thickness=5)), boundary_y=Periodic())
    mask = pml_cell_mask(g)
    assert mask[:5].all() and mask[-5:].all()
    assert not mask[5:-5].any()


def test_operators_bundle_stencil():
    ops = build_operators(periodic_grid(6, 6))
    pat = ops.stencil
    # 5-point pattern on a torus: diagonal + 4 neighbors
    counts = np.asarray((pat != 0).sum(axis=1)).ravel()
    assert (counts == 5).all()
