#!/usr/bin/env python3
"""Independent oracle runs behind the frozen constants in the test suite.

Two quantities have no closed form and are therefore frozen from
independent computations rather than asserted from theory:

* the product-state minimum of the canonical three-qubit unextendible
  set's span projector (frozen as SHIFTS_EPSILON), cross-checked here by
  a dense real Bloch-angle grid (step pi/200) plus a local refinement,
  both independent of the library's alternating-descent path;
* the no-signalling maximum of the derived inequality (frozen as
  SHIFTS_BETA_N = 4/3), cross-checked here by scipy's HiGHS solver on an
  independently assembled floating-point LP using only single-party
  no-signalling constraints (which define the same polytope).

Run:  python3 tools/oracles.py
"""

from itertools import product as iproduct

import numpy as np
from scipy.optimize import linprog, minimize

from upbbell.bounds import ns_bound, product_epsilon
from upbbell.families import shifts_upb
from upbbell.inequalities import inequality_from_set
from upbbell.product_sets import check_property_p
from upbbell.bounds import span_projector


def grid_epsilon(step_count: int = 200):
    pi = span_projector(shifts_upb()).real.reshape((2,) * 6)
    theta = np.arange(step_count) * (np.pi / step_count)
    v = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    e = np.einsum("abcdef,ia,jb,kc,id,je,kf->ijk", pi, v, v, v, v, v, v, optimize=True)
    idx = np.unravel_index(e.argmin(), e.shape)
    start = [float(theta[i]) for i in idx]

    pif = pi.reshape(8, 8)

    def value(angles):
        kets = [np.array([np.cos(a), np.sin(a)]) for a in angles]
        full = np.kron(np.kron(kets[0], kets[1]), kets[2])
        return float(full @ pif @ full)

    res = minimize(value, start, method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 5000})
    return float(e.min()), float(res.fun)


def scipy_beta_n():
    pset = shifts_upb()
    ineq = inequality_from_set(pset, check_property_p(pset))
    sc = ineq.scenario
    xs = list(iproduct(*(range(m) for m in sc.inputs)))
    var_index = {}
    for x in xs:
        for a in iproduct(*(range(sc.outputs[i][x[i]]) for i in range(sc.n))):
            var_index[(x, a)] = len(var_index)
    nv = len(var_index)
    rows, rhs = [], []
    for x in xs:
        row = np.zeros(nv)
        for a in iproduct(*(range(sc.outputs[i][x[i]]) for i in range(sc.n))):
            row[var_index[(x, a)]] = 1
        rows.append(row)
        rhs.append(1.0)
    for i in range(sc.n):
        keep = [j for j in range(sc.n) if j != i]
        for x in xs:
            if x[i] == 0:
                continue
            x0 = list(x)
            x0[i] = 0
            x0 = tuple(x0)
            for a_keep in iproduct(*(range(sc.outputs[j][x[j]]) for j in keep)):
                row = np.zeros(nv)
                for sign, xv in ((1.0, x), (-1.0, x0)):
                    for ai in range(sc.outputs[i][xv[i]]):
                        a = [0] * sc.n
                        for j, aj in zip(keep, a_keep):
                            a[j] = aj
                        a[i] = ai
                        row[var_index[(xv, tuple(a))]] += sign
                rows.append(row)
                rhs.append(0.0)
    c = np.zeros(nv)
    for t in ineq.terms:
        c[var_index[(t.x, t.a)]] -= float(t.q)
    lp = linprog(c, A_eq=np.array(rows), b_eq=np.array(rhs), bounds=(0, 1), method="highs")
    assert lp.success
    return -lp.fun


def main():
    pset = shifts_upb()
    pi = span_projector(pset)
    eps = product_epsilon(pi, pset.dims, restarts=256, seed=0)
    grid, refined = grid_epsilon()
    print(f"alternating-descent epsilon (256 restarts): {eps.value!r}")
    print(f"grid epsilon (step pi/200):                 {grid!r}")
    print(f"grid-refined epsilon:                       {refined!r}")
    assert abs(eps.value - grid) <= 1e-4, "grid cross-check outside 1e-4"

    ineq = inequality_from_set(pset, check_property_p(pset))
    exact = ns_bound(ineq)
    approx = scipy_beta_n()
    print(f"exact rational beta_N:                      {exact.value}")
    print(f"scipy HiGHS beta_N:                         {approx!r}")
    assert abs(float(exact.value) - approx) <= 1e-7


if __name__ == "__main__":
    main()
