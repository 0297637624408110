from fractions import Fraction

import pytest

from upbbell.rational_lp import LPInfeasibleError, LPUnboundedError, maximize

F = Fraction


def test_simple_equality():
    # max x + 2y  s.t.  x + y = 1  ->  y = 1
    res = maximize([F(1), F(2)], [[F(1), F(1)]], [F(1)])
    assert res.value == F(2)
    assert res.solution == [F(0), F(1)]


def test_degenerate_redundant_rows():
    # duplicated constraints must not break phase transitions
    rows = [[F(1), F(1)], [F(1), F(1)], [F(2), F(2)]]
    rhs = [F(1), F(1), F(2)]
    res = maximize([F(3), F(1)], rows, rhs)
    assert res.value == F(3)
    assert res.solution == [F(1), F(0)]


def test_exact_rational_answer():
    # max x  s.t.  3x + 7y = 2, x,y >= 0  ->  x = 2/3
    res = maximize([F(1), F(0)], [[F(3), F(7)]], [F(2)])
    assert res.value == F(2, 3)


def test_infeasible():
    with pytest.raises(LPInfeasibleError):
        maximize([F(1)], [[F(-1)]], [F(1)])


def test_unbounded():
    # max x s.t. x - y = 0 is unbounded along the diagonal
    with pytest.raises(LPUnboundedError):
        maximize([F(1), F(0)], [[F(1), F(-1)]], [F(0)])


def test_negative_rhs_normalized():
    # -x - y = -1 is x + y = 1
    res = maximize([F(1), F(1)], [[F(-1), F(-1)]], [F(-1)])
    assert res.value == F(1)


def test_solution_verified_exactly():
    rows = [
        [F(1), F(1), F(1), F(0)],
        [F(0), F(1), F(2), F(1)],
    ]
    rhs = [F(1), F(1)]
    res = maximize([F(1), F(2), F(3), F(-1)], rows, rhs)
    for row, b in zip(rows, rhs):
        assert sum(e * v for e, v in zip(row, res.solution)) == b
    assert all(v >= 0 for v in res.solution)


def test_matches_scipy_on_random_instances():
    scipy_opt = pytest.importorskip("scipy.optimize")
    import numpy as np

    rng = np.random.default_rng(21)
    for _ in range(25):
        m, n = 3, 6
        a = rng.integers(-3, 4, size=(m, n))
        x_feas = rng.integers(0, 3, size=n)
        b = a @ x_feas
        c = rng.integers(-4, 5, size=n)
        rows = [[F(int(e)) for e in row] for row in a]
        rhs = [F(int(e)) for e in b]
        # bound the feasible set so both solvers agree on a finite optimum
        rows.append([F(1)] * n)
        rhs.append(F(20))
        try:
            res = maximize([F(int(e)) for e in c], rows, rhs)
        except LPInfeasibleError:
            continue
        lp = scipy_opt.linprog(-np.asarray(c, dtype=float),
                               A_eq=np.vstack([a, np.ones(n)]),
                               b_eq=np.append(b, 20.0).astype(float),
                               bounds=(0, None), method="highs")
        assert lp.success
        assert abs(float(res.value) + lp.fun) <= 1e-7
