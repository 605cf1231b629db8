"""Kernels and certified series enclosures.

A kernel is the coefficient sequence (a_n) of the convolution recursion
x_n = sum_{i<n} a_{n-i} x_i, stored as an explicit prefix plus a parametric
tail c * q^n / (n^alpha (n+1)^beta).  Everything the certificates consume is
an *enclosure*: an interval that provably contains the series value, or a
divergence proof, never a bare float.

Run:  python demos/01_kernels_and_enclosures.py
"""

from volterra_stability import (
    KernelSpec,
    TailModel,
    loads_kernel,
    radius_of_convergence,
    series_sum,
    support_gcd,
    tail_abs_sum,
    term,
)

# The renewal kernel a_n = 1/(n(n+1)): prefix empty, tail (c=1, q=1, a=1, b=1).
renewal = KernelSpec((), TailModel.parametric(1.0, 1.0, 1.0, 1.0))
print("renewal kernel a_3 =", term(renewal, 3))  # 1/12

# Kernels parse from JSON; prefix[0] is a_1 and the tail covers n > len(prefix).
two_term = loads_kernel('{"prefix": [1.5, -0.5625], '
                        '"tail": {"kind": "parametric", "c": 400.0, "q": 0.05, "alpha": 0.0, "beta": 0.0}}')
print("two-term kernel a_3 =", term(two_term, 3))  # 1/20

# series_sum returns enclosures.  The renewal kernel telescopes: the sum is
# exactly 1 and the enclosure has width zero.
total = series_sum(renewal, "plain")
print(f"renewal mass: [{total.lo}, {total.hi}] (width {total.width})")

# Its first moment diverges -- the divergence is *proved* from the tail
# exponents, not guessed from partial sums.
print("renewal first moment:", series_sum(renewal, "first_moment").status)

# Geometric tails get closed forms: here sum |a_n| past index 2 is 1/19.
tail = tail_abs_sum(two_term, 2)
print(f"two-term kernel tail mass past n=2: [{tail.lo:.17g}, {tail.hi:.17g}]")
print("  contains 1/19:", tail.contains(1.0 / 19.0), " width:", tail.width)

# The alternating conditionally-convergent regime uses the alternating-series
# remainder; over-tight precision requests are answered honestly with Unknown.
alt = KernelSpec((), TailModel.parametric(1.0, -1.0, 1.0, 0.0))  # (-1)^n / n
print("alternating harmonic, 1e-5 :", series_sum(alt, "plain", 1e-5).status)
print("alternating harmonic, 1e-12:", series_sum(alt, "plain", 1e-12).status)

# Radius of convergence comes straight from the tail ratio, and the support
# gcd drives the renewal-theorem certificate.
fast = KernelSpec((), TailModel.parametric(0.5, 2.0, 1.0, 1.0))
print("radius of a_n = 2^(n-1)/(n(n+1)):", radius_of_convergence(fast))
print("support gcd of renewal kernel:", support_gcd(renewal))
print("support gcd of a_n = (0, 1, 0, 1):",
      support_gcd(KernelSpec((0.0, 1.0, 0.0, 1.0), TailModel.zero())))
