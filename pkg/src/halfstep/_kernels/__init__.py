"""Enumeration kernels with a compiled fast path and a pure-Python fallback.

The compiled extension (Cython) is used when it imported successfully and
the inputs fit its fixed-width preconditions; otherwise the pure-Python
implementations take over transparently.  Set the environment variable
``HALFSTEP_PURE=1`` before import to force the pure backend.

Public functions (identical results on both backends):

- ``union_reduction(n)``: reduced (num, den) of prod_{k=n+1}^{2n} (k-1)/k.
- ``tail_mass(ks, cs, base, thr)``: integer mass numerator of
  ``P(|base/L + sum cs[i]/L * chi_i| > thr/L)`` over the pattern lattice,
  denominator ``prod(ks)``.
- ``atom_table(ks, cs, base)``: per-pattern ``(weights, absvalues)`` lists.
"""

import os

from . import _pure

if os.environ.get("HALFSTEP_PURE"):
    _core = None
else:
    try:
        from . import _core
    except ImportError:  # pragma: no cover - missing/broken extension build
        _core = None

BACKEND = "compiled" if _core is not None else "pure-python"

_VALUE_LIMIT = 1 << 62
_MASS_LIMIT = 1 << 125
_TABLE_LIMIT = 1 << 64


def _validate(ks, cs):
    if len(ks) != len(cs):
        raise ValueError("ks and cs must have equal length")
    if len(ks) > 63:
        raise ValueError("at most 63 events per enumeration")
    for k in ks:
        if k < 2:
            raise ValueError(
                "event indices must be >= 2 (sure events fold into the base)"
            )


def _values_fit(cs, base, thr):
    return abs(base) + sum(abs(c) for c in cs) < _VALUE_LIMIT and thr < _VALUE_LIMIT


def _prod(ks):
    p = 1
    for k in ks:
        p *= k
    return p


def union_reduction(n):
    """Reduced (num, den) of prod_{k=n+1}^{2n} (k-1)/k."""
    if _core is not None and n <= 10**9:
        return _core.union_reduction(n)
    return _pure.union_reduction(n)


def tail_mass(ks, cs, base, thr):
    """Mass numerator (over prod(ks)) of patterns with |value| > thr."""
    _validate(ks, cs)
    if thr < 0:
        raise ValueError("threshold must be nonnegative")
    if (
        _core is not None
        and _prod(ks) < _MASS_LIMIT
        and _values_fit(cs, base, thr)
    ):
        import numpy as np

        return _core.tail_mass(
            np.asarray(ks, dtype=np.int64),
            np.asarray(cs, dtype=np.int64),
            base,
            thr,
        )
    return _pure.tail_mass(ks, cs, base, thr)


def atom_table(ks, cs, base):
    """Per-pattern (weights, absvalues) lists over all 2**len(ks) patterns."""
    _validate(ks, cs)
    if (
        _core is not None
        and _prod(ks) < _TABLE_LIMIT
        and _values_fit(cs, base, 0)
    ):
        import numpy as np

        w_out = np.empty(1 << len(ks), dtype=np.uint64)
        a_out = np.empty(1 << len(ks), dtype=np.int64)
        _core.atom_table(
            np.asarray(ks, dtype=np.int64),
            np.asarray(cs, dtype=np.int64),
            base,
            w_out,
            a_out,
        )
        return w_out.tolist(), a_out.tolist()
    return _pure.atom_table(ks, cs, base)
