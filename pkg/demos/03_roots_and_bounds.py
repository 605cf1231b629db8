"""Truncation roots, the delta profile, and the closed-form E bounds.

The degree-n truncation of the characteristic function, s_n(z), reverses into
the monic polynomial p_n whose largest root modulus r_n decides which
finite-approximation certificate can fire: r_n < 1 with a small coefficient
tail proves asymptotic stability, r_n > 1 with a small tail proves
instability via the maximized product profile delta_n or its cheap lower
bounds E1/E2/E3.

Run:  python demos/03_roots_and_bounds.py
"""

import numpy as np

from volterra_stability import (
    KernelSpec,
    TailModel,
    circle_min_modulus,
    e_bounds,
    maximize_delta,
    partial_sum_eval,
    pn_roots,
    tail_abs_sum,
)

# Six-coefficient showcase kernel with a geometric tail: r_n drops below 1
# only at n = 6, and only there does the tail fit under (1 - r_n)^n.
table = KernelSpec(
    (1.0, -41.0 / 36.0, 8.0 / 9.0, -34.0 / 81.0, 16.0 / 81.0, -4.0 / 81.0),
    TailModel.parametric(1.0 / 64.0, 0.5),
)
print("n, r_n, L_n, (1-r_n)^n")
for n in range(1, 7):
    rs = pn_roots(table, n)
    if rs.r_n < 1.0:
        ln = tail_abs_sum(table, n).hi
        print(f"{n}, {rs.r_n:.3f}, {ln:.5f}, {(1.0 - rs.r_n) ** n:.5f}")
    else:
        print(f"{n}, {rs.r_n:.3f}, -, -")

# The reversal identity s_n(z) = z^n p_n(1/z) ties the two representations.
z = 0.7 + 0.2j
lhs = partial_sum_eval(table, 4, z)
rs = pn_roots(table, 4)
rhs = z**4 * np.prod([1.0 / z - r for r in rs.roots])
print("reversal check |s_4(z) - z^4 p_4(1/z)| =", abs(lhs - rhs))

# A double root at 2: all roots outside the unit circle makes E1 applicable,
# and the profile maximum confirms the cheap bound from below.
pair = KernelSpec((4.0, -4.0), TailModel.parametric(2.0, 0.5))
rs = pn_roots(pair, 2)
print("roots of p_2:", rs.roots, " r_2 =", rs.r_n)
eb = e_bounds(rs)
dm = maximize_delta(rs)
print(f"E bound: {eb.kind} = {eb.value}   delta max = {dm.value} at rho0 = {dm.rho0}")
print("tail past n=2:", tail_abs_sum(pair, 2).hi, "< E1  -> instability certificate")

# Marginal kernels show up as near-zeros of |s_n| on the unit circle.
half = KernelSpec((), TailModel.parametric(1.0, 0.5))
val, where = circle_min_modulus(half, 20, 4096)
print(f"2^-n kernel: min |s_20| on the circle = {val:.2e} near z = {where:.4f}")
