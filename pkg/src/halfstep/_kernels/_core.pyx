# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration kernels.

Hot loops behind the exact probability computations: the telescoping
union product, Gray-code tail-mass enumeration, and the per-pattern atom
table.  Callers (the ``_kernels`` package dispatcher) are responsible for
the overflow preconditions documented on each function; inside we use
fixed-width integers (int64 values, unsigned 128-bit weights).
"""

from libc.stdint cimport int64_t, uint64_t

cdef extern from *:
    """
    typedef unsigned __int128 hs_u128;
    static inline int hs_ctz64(unsigned long long x)
    {
        return (int)__builtin_ctzll(x);
    }
    """
    ctypedef unsigned long long u128 "hs_u128"
    int hs_ctz64(unsigned long long x) noexcept nogil


cdef inline int64_t _gcd64(int64_t a, int64_t b) noexcept nogil:
    cdef int64_t t
    while b:
        t = a % b
        a = b
        b = t
    return a


def union_reduction(long long n):
    """Reduced (num, den) of prod_{k=n+1}^{2n} (k-1)/k.

    Reduces after every factor; with the running product telescoping to
    n/j the reduced parts stay below 2n and the mid-step products below
    4n**2, so int64 suffices for any plausible n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cdef int64_t num = 1, den = 1, g, k
    with nogil:
        for k in range(n + 1, 2 * n + 1):
            num *= k - 1
            den *= k
            g = _gcd64(num, den)
            num //= g
            den //= g
    return num, den


def tail_mass(const int64_t[::1] ks, const int64_t[::1] cs,
              long long base, long long thr):
    """Total pattern weight (numerator over prod(ks)) where |value| > thr.

    Preconditions enforced by the dispatcher: prod(ks) < 2**125 (the
    accumulated mass is at most prod(ks)) and |base| + sum|cs| < 2**62
    (values stay inside int64).  Returns a Python int.
    """
    cdef Py_ssize_t t = ks.shape[0]
    cdef u128 w = 1, acc = 0
    cdef int64_t value = base
    cdef unsigned long long m, cur = 0, bit, top
    cdef int i
    cdef Py_ssize_t j
    for j in range(t):
        w *= <u128>(ks[j] - 1)
    if value < -thr or value > thr:
        acc = w
    top = 1ULL << t
    with nogil:
        for m in range(1, top):
            i = hs_ctz64(m)
            bit = 1ULL << i
            cur ^= bit
            if cur & bit:
                w //= <u128>(ks[i] - 1)
                value += cs[i]
            else:
                w *= <u128>(ks[i] - 1)
                value -= cs[i]
            if value < -thr or value > thr:
                acc += w
    cdef unsigned long long hi = <unsigned long long>(acc >> 64)
    cdef unsigned long long lo = <unsigned long long>acc
    return ((<object>hi) << 64) | (<object>lo)


def atom_table(const int64_t[::1] ks, const int64_t[::1] cs, long long base,
               uint64_t[::1] w_out, int64_t[::1] a_out):
    """Fill weight numerators and |value| for all 2**len(ks) patterns.

    Precondition: prod(ks) < 2**64 so every weight fits uint64 (values as
    in tail_mass).  ``w_out`` and ``a_out`` must have length 2**len(ks).
    """
    cdef Py_ssize_t t = ks.shape[0]
    cdef uint64_t w = 1
    cdef int64_t value = base
    cdef unsigned long long m, cur = 0, bit, top
    cdef int i
    cdef Py_ssize_t j
    for j in range(t):
        w *= <uint64_t>(ks[j] - 1)
    w_out[0] = w
    a_out[0] = value if value >= 0 else -value
    top = 1ULL << t
    with nogil:
        for m in range(1, top):
            i = hs_ctz64(m)
            bit = 1ULL << i
            cur ^= bit
            if cur & bit:
                w //= <uint64_t>(ks[i] - 1)
                value += cs[i]
            else:
                w *= <uint64_t>(ks[i] - 1)
                value -= cs[i]
            w_out[m] = w
            a_out[m] = value if value >= 0 else -value
