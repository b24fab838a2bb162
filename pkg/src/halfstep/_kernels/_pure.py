"""Pure-Python reference implementations of the enumeration kernels.

Same contracts as the compiled module ``_core``.  Python integers are
unbounded, so these have no overflow preconditions; only speed differs.
The two backends must return identical values on any shared input, which
is what tests/test_kernels.py checks.
"""

from math import gcd


def union_reduction(n):
    """Reduced (num, den) of prod_{k=n+1}^{2n} (k-1)/k.

    Multiplies term by term, reducing by the gcd after every step so the
    intermediate integers stay small.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    num = 1
    den = 1
    for k in range(n + 1, 2 * n + 1):
        num *= k - 1
        den *= k
        g = gcd(num, den)
        num //= g
        den //= g
    return num, den


def tail_mass(ks, cs, base, thr):
    """Total pattern weight (numerator over prod(ks)) where |value| > thr.

    ``ks`` are event indices (all >= 2; always-on events must already be
    folded into ``base``), ``cs`` the scaled integer coefficients, ``thr``
    the scaled nonnegative threshold.  The weight numerator of a pattern A
    is prod_{i not in A} (ks[i] - 1); occurrence probabilities are
    1/ks[i].  Enumerates all 2**len(ks) patterns in Gray-code order.
    """
    t = len(ks)
    w = 1
    for k in ks:
        w *= k - 1
    acc = w if abs(base) > thr else 0
    value = base
    cur = 0
    for m in range(1, 1 << t):
        i = (m & -m).bit_length() - 1
        bit = 1 << i
        cur ^= bit
        if cur & bit:
            w //= ks[i] - 1
            value += cs[i]
        else:
            w *= ks[i] - 1
            value -= cs[i]
        if abs(value) > thr:
            acc += w
    return acc


def atom_table(ks, cs, base):
    """Weight numerators and |value| for every occurrence pattern.

    Returns ``(weights, absvalues)`` as lists of ints, in enumeration
    order (the order is irrelevant to callers, which only sum over atoms).
    """
    t = len(ks)
    w = 1
    for k in ks:
        w *= k - 1
    weights = [0] * (1 << t)
    absvalues = [0] * (1 << t)
    weights[0] = w
    absvalues[0] = abs(base)
    value = base
    cur = 0
    for m in range(1, 1 << t):
        i = (m & -m).bit_length() - 1
        bit = 1 << i
        cur ^= bit
        if cur & bit:
            w //= ks[i] - 1
            value += cs[i]
        else:
            w *= ks[i] - 1
            value -= cs[i]
        weights[m] = w
        absvalues[m] = abs(value)
    return weights, absvalues
