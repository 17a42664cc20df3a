import itertools

import numpy as np
import pytest
import scipy.optimize
import scipy.sparse as sp

from wavefirst.kernels import backend_name, pure

try:
    from wavefirst.kernels import _native
except ImportError:  # compiled lane missing; fallback still exercised
    _native = None

BACKENDS = [pure] + ([_native] if _native is not None else [])


def quad_problem(n, seed, lo=0.1, hi=1.0):
    """Random strongly convex box QP posed as min 1/2 p'Ap - b'p."""
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n + 4, n))
    a = sp.csr_matrix(m.T @ m + 0.05 * np.eye(n))
    target = rng.uniform(lo - 0.3, hi + 0.3, n)
    b = a @ target
    return a, b, m, target


@pytest.mark.parametrize("impl", BACKENDS)
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_matches_lsq_linear_oracle(impl, seed):
    n = 24
    a, b, m, target = quad_problem(n, seed)
    lo, hi = 0.1, 1.0
    # independent oracle: min ||M p - M target|| with bounds, solved by scipy
    res = scipy.optimize.lsq_linear(m, m @ target, bounds=(lo, hi), method="bvls", tol=1e-14)
    lam = pure.power_bound(a)
    p, _, pg, converged = impl.bcls_minimize(a, b, lo, hi, np.full(n, 0.5), lam, 20000, 1e-12)
    assert converged
    assert np.linalg.norm(p - res.x, np.inf) < 1e-7


@pytest.mark.parametrize("impl", BACKENDS)
def test_two_cell_active_set_enumeration(impl):
    # brute force over the 2-variable QP's active sets; the unconstrained
    # minimizer violates the upper bound in one coordinate
    a = sp.csr_matrix(np.array([[2.0, 0.3], [0.3, 1.0]]))
    b = np.array([4.0, 0.5])
    lo, hi = 0.0, 1.0

    def q(p):
        return 0.5 * p @ (a @ p) - b @ p

    best = None
    for active_lo, active_hi in itertools.product([(), (0,), (1,), (0, 1)], repeat=2):
        if set(active_lo) & set(active_hi):
            continue
        fixed = {i: lo for i in active_lo} | {i: hi for i in active_hi}
        free = [i for i in range(2) if i not in fixed]
        p = np.zeros(2)
        for i, v in fixed.items():
            p[i] = v
        if free:
            af = a.toarray()[np.ix_(free, free)]
            rhs = b[free] - a.toarray()[np.ix_(free, list(fixed))] @ np.array(
                [fixed[i] for i in fixed]
            ) if fixed else b[free]
            p[free] = np.linalg.solve(af, rhs)
        if np.all(p >= lo - 1e-12) and np.all(p <= hi + 1e-12):
            if best is None or q(p) < q(best):
                best = p
    unconstrained = np.linalg.solve(a.toarray(), b)
    assert unconstrained[0] > hi  # the bound must actually bite

    p, _, _, conv = impl.bcls_minimize(a, b, lo, hi, np.array([0.5, 0.5]), 3.0, 10000, 1e-13)
    assert conv
    assert np.allclose(p, best, atol=1e-9)
    assert p[0] == pytest.approx(hi, abs=1e-12)


@pytest.mark.parametrize("impl", BACKENDS)
def test_never_worsens_and_stays_feasible(impl):
    a, b, _, _ = quad_problem(30, 11)
    lo, hi = 0.2, 0.8
    p0 = np.clip(np.linspace(0.21, 0.79, 30), lo, hi)

    def q(p):
        return 0.5 * p @ (a @ p) - b @ p

    for max_iter in (0, 1, 3, 10, 200):
        p, _, _, _ = impl.bcls_minimize(a, b, lo, hi, p0, pure.power_bound(a), max_iter, 0.0)
        assert q(p) <= q(p0) + 1e-12 * abs(q(p0))
        assert p.min() >= lo and p.max() <= hi


@pytest.mark.parametrize("impl", BACKENDS)
def test_zero_objective_returns_input(impl):
    n = 12
    a = sp.csr_matrix((n, n))
    b = np.zeros(n)
    p0 = np.linspace(0.3, 0.7, n)
    p, iters, pg, conv = impl.bcls_minimize(a, b, 0.1, 1.0, p0, 1.0, 100, 1e-10)
    assert conv and iters == 0 and pg == 0.0
    assert np.array_equal(p, p0)


@pytest.mark.parametrize("impl", BACKENDS)
def test_bad_lipschitz_recovers_via_backtracking(impl):
    a, b, m, target = quad_problem(16, 5)
    # deliberately underestimate the Lipschitz constant by 1000x
    lam = pure.power_bound(a) / 1000.0
    p, _, pg, conv = impl.bcls_minimize(a, b, 0.1, 1.0, np.full(16, 0.4), lam, 20000, 1e-10)
    assert conv


def test_backends_agree():
    if _native is None:
        pytest.skip("compiled kernel not built")
    a, b, _, _ = quad_problem(40, 3)
    args = (a, b, 0.1, 1.0, np.full(40, 0.5), pure.power_bound(a), 5000, 1e-11)
    p1, _, _, c1 = pure.bcls_minimize(*args)
    p2, _, _, c2 = _native.bcls_minimize(*args)
    assert c1 and c2
    assert np.linalg.norm(p1 - p2, np.inf) < 1e-9


def test_power_bound_is_upper_bound():
    a, _, _, _ = quad_problem(25, 9)
    lam_true = np.linalg.eigvalsh(a.toarray()).max()
    assert pure.power_bound(a) >= lam_true
    if _native is not None:
        assert _native.power_bound(a) >= lam_true


def test_backend_selected():
    assert backend_name() in ("native", "python")
