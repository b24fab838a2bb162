"""Exact and Monte-Carlo laboratory for the independent-event model.

The sample space carries independent events S_1, S_2, ... with
P(S_k) = 1/k held as exact rationals (S_1 is sure).  Random variables
are finite linear combinations of event indicators.  Two of them matter
most here:

- ``drive_rv(n)``: the single spike 2**n on S_n.  Its tail probability
  P(|.| > t) is 1/n for t < 2**n, so the family tends to 0 in
  probability while being unbounded pointwise.
- ``solution_rv(n)``: the solution of 2*X[n+1] - X[n] = drive_rv(n)
  started at 0, with coefficient 2**(2k-n) on S_k for k < n.  Along odd
  indices it exceeds 1/2 with probability at least 1/2 — the recurrence
  smooths nothing here — because at least one of S_{n+1}..S_{2n}
  occurring already forces X_{2n+1} > 1/2, and that union has
  probability exactly 1 - prod_{k=n+1}^{2n} (k-1)/k = 1/2.

Exact operations enumerate the 2**T occurrence patterns of the T
referenced (non-sure) events through the ``_kernels`` backends with all
values pre-scaled to integers, so every comparison is exact.  Monte
Carlo estimators use a counter-based generator (Philox4x64) in fixed
32768-sample blocks: the block partition is part of the contract, which
makes estimates bit-reproducible for a given (seed, samples, mode).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np
from gmpy2 import mpq, mpz

from . import _kernels
from .errors import EnumerationTooLarge, IndexOutOfRange

__all__ = [
    "ENUMERATION_CAP",
    "RNG_NAME",
    "IndepEventModel",
    "IndicatorSum",
    "McConfig",
    "McEstimate",
    "ScanRow",
    "ScanTable",
    "convergence_in_probability_scan",
    "drive_rv",
    "event_probability",
    "prob_metric_exact",
    "prob_metric_mc",
    "rv_combine",
    "sample_coordinates",
    "sample_occurrences",
    "solution_rv",
    "tail_probability_exact",
    "tail_probability_mc",
    "union_probability_exact",
    "verify_recurrence_identity",
]

ENUMERATION_CAP = 25  # exact ops enumerate at most 2**25 patterns
RNG_NAME = "philox4x64"
_BLOCK = 1 << 15  # fixed sampling block size; part of the repro contract


def event_probability(k):
    """P(S_k) = 1/k as an exact rational."""
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise IndexOutOfRange(f"event index must be an integer >= 1, got {k!r}")
    return Fraction(1, k)


def union_probability_exact(n):
    """P(S_{n+1} u ... u S_{2n}) = 1 - prod_{k=n+1}^{2n} (k-1)/k, exactly.

    The product telescopes to n/(2n), so the result is 1/2 for every n —
    but it is computed factor by factor, not assumed.
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n!r}")
    num, den = _kernels.union_reduction(n)
    return 1 - Fraction(num, den)


def _as_mpq(value, what):
    if isinstance(value, float):
        raise TypeError(
            f"{what} must be an exact rational (int, Fraction, mpq); "
            "floats are rejected to keep identities exact"
        )
    if isinstance(value, bool) or not isinstance(value, (int, Rational, type(mpq()))):
        raise TypeError(f"{what} must be an exact rational, got {value!r}")
    return mpq(value)


class IndicatorSum:
    """A random variable sum_k a_k * [S_k occurs] with exact coefficients.

    Zero coefficients are dropped on construction; the empty sum is the
    zero random variable.  Instances are immutable and compare by their
    normalized coefficient table.
    """

    __slots__ = ("_terms",)

    def __init__(self, coeffs=()):
        items = coeffs.items() if hasattr(coeffs, "items") else coeffs
        table = {}
        for k, a in items:
            if not isinstance(k, int) or isinstance(k, bool) or k < 1:
                raise IndexOutOfRange(
                    f"event index must be an integer >= 1, got {k!r}"
                )
            if k in table:
                raise ValueError(f"duplicate event index {k}")
            table[k] = _as_mpq(a, f"coefficient of event {k}")
        self._terms = tuple(
            (k, a) for k, a in sorted(table.items()) if a != 0
        )

    @classmethod
    def _from_normalized(cls, terms):
        rv = object.__new__(cls)
        rv._terms = terms
        return rv

    @property
    def coefficients(self):
        """The coefficient table as {index: Fraction}."""
        return {k: Fraction(a) for k, a in self._terms}

    @property
    def is_zero(self):
        return not self._terms

    @property
    def max_index(self):
        """Largest referenced event index (0 for the zero variable)."""
        return self._terms[-1][0] if self._terms else 0

    def evaluate(self, occurred):
        """Value at one occurrence pattern (a container of indices)."""
        return Fraction(sum(a for k, a in self._terms if k in occurred))

    def __eq__(self, other):
        if not isinstance(other, IndicatorSum):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def __repr__(self):
        body = ", ".join(f"{k}: {a}" for k, a in self._terms)
        return f"IndicatorSum({{{body}}})"


@lru_cache(maxsize=None)
def _pow2(e):
    return mpq(2) ** e


def drive_rv(n):
    """The drive term: coefficient 2**n on event n alone."""
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise IndexOutOfRange(f"index must be an integer >= 1, got {n!r}")
    return IndicatorSum._from_normalized(((n, _pow2(n)),))


def solution_rv(n):
    """The recurrence solution started at 0: coefficient 2**(2k-n) on
    event k for k = 1..n-1; the zero variable for n = 1."""
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise IndexOutOfRange(f"index must be an integer >= 1, got {n!r}")
    return IndicatorSum._from_normalized(
        tuple((k, _pow2(2 * k - n)) for k in range(1, n))
    )


def rv_combine(a, r1, b, r2):
    """The linear combination a*r1 + b*r2 with exact scalars."""
    a = _as_mpq(a, "scalar a")
    b = _as_mpq(b, "scalar b")
    table = {}
    if a != 0:
        for k, c in r1._terms:
            table[k] = a * c
    if b != 0:
        for k, c in r2._terms:
            table[k] = table.get(k, 0) + b * c
    return IndicatorSum._from_normalized(
        tuple((k, c) for k, c in sorted(table.items()) if c != 0)
    )


def verify_recurrence_identity(n):
    """Exact coefficient check of 2*solution(n+1) - solution(n) = drive(n)."""
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise IndexOutOfRange(f"index must be an integer >= 1, got {n!r}")
    lhs = rv_combine(2, solution_rv(n + 1), -1, solution_rv(n))
    return lhs == drive_rv(n)


def _scaled_terms(r, extra=()):
    """Integer-scale the variable for exact enumeration.

    Folds sure events (index 1) into the base value, scales all
    coefficients (and any ``extra`` rationals) by the common denominator
    L, and returns (ks, cs, base, L) with ks/cs/base plain ints.  Raises
    EnumerationTooLarge past the 2**ENUMERATION_CAP pattern cap.
    """
    base = mpq(0)
    enum = []
    for k, a in r._terms:
        if k == 1:
            base += a
        else:
            enum.append((k, a))
    if len(enum) > ENUMERATION_CAP:
        raise EnumerationTooLarge(
            f"{len(enum)} probabilistic events exceed the exact-enumeration "
            f"cap of {ENUMERATION_CAP}"
        )
    denoms = [int(a.denominator) for _, a in enum]
    denoms.append(int(base.denominator))
    denoms.extend(int(mpq(x).denominator) for x in extra)
    L = math.lcm(*denoms)
    ks = [k for k, _ in enum]
    cs = [int(a * L) for _, a in enum]
    return ks, cs, int(base * L), L


def tail_probability_exact(r, t):
    """P(|r| > t) by exact enumeration of all occurrence patterns."""
    t = Fraction(t)
    if t < 0:
        raise ValueError(f"threshold must be nonnegative, got {t}")
    ks, cs, base, L = _scaled_terms(r, extra=(t,))
    thr = int(t * L)
    if not ks:
        return Fraction(1) if abs(base) > thr else Fraction(0)
    mass = _kernels.tail_mass(ks, cs, base, thr)
    den = 1
    for k in ks:
        den *= k
    return Fraction(mass, den)


def _ratio_sum(weights, absvals, scale):
    """Exact sum of w * v/(scale + v) over atoms, via pairwise merging.

    Partial sums are kept unreduced as (num, den) pairs and merged in a
    binary-counter pattern so operand sizes stay balanced; the single
    final reduction happens inside one mpq construction.
    """
    scale = mpz(scale)
    stack = []  # (level, num, den), strictly increasing level from the top
    for w, v in zip(weights, absvals):
        if v == 0:
            continue
        num = mpz(w) * v
        den = scale + v
        level = 0
        while stack and stack[-1][0] == level:
            _, n2, d2 = stack.pop()
            num, den = n2 * den + num * d2, d2 * den
            level += 1
        stack.append((level, num, den))
    num, den = mpz(0), mpz(1)
    for _, n2, d2 in stack:
        num, den = n2 * den + num * d2, d2 * den
    return num, den


def prob_metric_exact(r1, r2):
    """The expectation E[|r1 - r2| / (1 + |r1 - r2|)], exactly.

    This bounded expectation metrizes convergence in probability: it is
    a pseudo-metric, and it tends to 0 along a family iff every tail
    probability does.
    """
    diff = rv_combine(1, r1, -1, r2)
    ks, cs, base, L = _scaled_terms(diff)
    if not ks:
        v = abs(Fraction(base, L))
        return v / (1 + v)
    weights, absvals = _kernels.atom_table(ks, cs, base)
    num, den = _ratio_sum(weights, absvals, L)
    if num == 0:
        return Fraction(0)
    D = 1
    for k in ks:
        D *= k
    return Fraction(mpq(num, den * mpz(D)))


@dataclass(frozen=True)
class IndepEventModel:
    """Truncation of the event model to indices 1..max_index."""

    max_index: int

    def __post_init__(self):
        if not isinstance(self.max_index, int) or self.max_index < 1:
            raise ValueError("max_index must be an integer >= 1")

    def probability(self, k):
        if not 1 <= k <= self.max_index:
            raise IndexOutOfRange(
                f"event index {k} outside the model range 1..{self.max_index}"
            )
        return event_probability(k)


@dataclass(frozen=True)
class McConfig:
    """Reproducible sampling plan: seed, sample count, and drawing mode.

    ``membership`` draws one Bernoulli(1/k) per referenced event;
    ``full`` draws a uniform coordinate on {1..k} for every k up to
    ``depth`` and declares S_k to occur when the coordinate equals 1.
    Both induce the same law on every IndicatorSum.
    """

    seed: int
    samples: int
    mode: str = "membership"
    depth: int = None

    def __post_init__(self):
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ValueError("seed must be an integer")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if not isinstance(self.samples, int) or self.samples < 1:
            raise ValueError("samples must be an integer >= 1")
        if self.mode not in ("membership", "full"):
            raise ValueError(
                f"mode must be 'membership' or 'full', got {self.mode!r}"
            )
        if self.depth is not None and (
            not isinstance(self.depth, int) or self.depth < 1
        ):
            raise ValueError("depth must be an integer >= 1 when given")


@dataclass(frozen=True)
class McEstimate:
    """A Monte-Carlo mean with its standard error and provenance."""

    mean: float
    stderr: float
    samples: int
    seed: int
    mode: str


def _block_rng(seed, block_index):
    """Independent substream for one block of a run.

    The block index is planted in the upper half of the 256-bit Philox
    counter; in-block draws only advance the lower half, so substreams
    never overlap and the (seed, block) -> stream map is pure.
    """
    return np.random.Generator(
        np.random.Philox(key=seed, counter=block_index << 128)
    )


def _block_sizes(samples):
    full, rest = divmod(samples, _BLOCK)
    sizes = [_BLOCK] * full
    if rest:
        sizes.append(rest)
    return sizes


def _occurrence_blocks(ks, cfg):
    """Yield boolean occurrence arrays (block_size x len(ks)) per block.

    In membership mode, one uniform is drawn per (sample, referenced
    event).  In full mode, uniforms are drawn for every coordinate up to
    ``depth`` and the referenced columns are compared; this costs more
    but realizes the product-space picture coordinate by coordinate.
    """
    ks = np.asarray(ks, dtype=np.int64)
    inv = 1.0 / ks
    if cfg.mode == "full":
        depth = cfg.depth if cfg.depth is not None else int(ks.max(initial=1))
        if ks.size and depth < int(ks.max()):
            raise ValueError(
                f"depth {depth} is below the largest referenced event "
                f"index {int(ks.max())}"
            )
        cols = ks - 1
    for j, size in enumerate(_block_sizes(cfg.samples)):
        rng = _block_rng(cfg.seed, j)
        if cfg.mode == "membership":
            u = rng.random((size, ks.size))
            yield u < inv
        else:
            u = rng.random((size, depth))
            yield u[:, cols] < inv


def sample_occurrences(model, cfg):
    """Stream occurrence patterns (frozensets of indices) one by one."""
    ks = list(range(1, model.max_index + 1))
    for block in _occurrence_blocks(ks, cfg):
        for row in block:
            yield frozenset(k for k, hit in zip(ks, row) if hit)


def sample_coordinates(model, cfg):
    """Stream raw product-space coordinates (v_1, ..., v_depth).

    Each v_k is uniform on {1..k}; S_k occurs exactly when v_k = 1.
    Only meaningful in full mode (membership mode never materializes
    coordinates).
    """
    if cfg.mode != "full":
        raise ValueError("coordinates exist only in full mode")
    depth = cfg.depth if cfg.depth is not None else model.max_index
    scale = np.arange(1, depth + 1, dtype=np.float64)
    for j, size in enumerate(_block_sizes(cfg.samples)):
        rng = _block_rng(cfg.seed, j)
        u = rng.random((size, depth))
        v = np.floor(u * scale).astype(np.int64) + 1
        for row in v:
            yield tuple(int(x) for x in row)


def _float_eval_blocks(r, cfg):
    """Yield float value arrays of ``r`` per sampling block."""
    base = 0.0
    enum = []
    for k, a in r._terms:
        if k == 1:
            base += float(Fraction(a))
        else:
            enum.append((k, float(Fraction(a))))
    ks = [k for k, _ in enum]
    coeffs = np.asarray([c for _, c in enum], dtype=np.float64)
    for occ in _occurrence_blocks(ks, cfg):
        # pairwise numpy reduction, no BLAS: deterministic bit-for-bit
        yield (occ * coeffs).sum(axis=1) + base


def tail_probability_mc(r, t, cfg):
    """Frequency estimate of P(|r| > t) with binomial standard error."""
    t = float(t)
    if t < 0:
        raise ValueError(f"threshold must be nonnegative, got {t!r}")
    hits = 0
    for vals in _float_eval_blocks(r, cfg):
        hits += int(np.count_nonzero(np.abs(vals) > t))
    n = cfg.samples
    mean = hits / n
    stderr = math.sqrt(mean * (1.0 - mean) / n)
    return McEstimate(
        mean=mean, stderr=stderr, samples=n, seed=cfg.seed, mode=cfg.mode
    )


def prob_metric_mc(r1, r2, cfg):
    """Sample-mean estimate of E[|r1 - r2| / (1 + |r1 - r2|)]."""
    diff = rv_combine(1, r1, -1, r2)
    s1 = 0.0
    s2 = 0.0
    for vals in _float_eval_blocks(diff, cfg):
        a = np.abs(vals)
        g = a / (1.0 + a)
        s1 += float(g.sum())
        s2 += float((g * g).sum())
    n = cfg.samples
    mean = s1 / n
    if n > 1:
        var = max(0.0, (s2 - s1 * s1 / n) / (n - 1))
        stderr = math.sqrt(var / n)
    else:
        stderr = 0.0
    return McEstimate(
        mean=mean, stderr=stderr, samples=n, seed=cfg.seed, mode=cfg.mode
    )


@dataclass(frozen=True)
class ScanRow:
    """Tail probability of one family member against the zero variable."""

    index: int
    value: float
    stderr: float  # None for exact rows
    mode: str  # "exact" | "mc"
    exact: Fraction  # None for mc rows


@dataclass(frozen=True)
class ScanTable:
    """Tail probabilities along a family, with a coarse trend verdict."""

    eps: float
    rows: tuple
    verdict: str  # "decaying" | "bounded away"


def convergence_in_probability_scan(family, eps, indices, cfg):
    """Tabulate P(|family(n)| > eps) over ``indices``.

    Uses exact enumeration whenever the member fits the cap, Monte Carlo
    otherwise.  The verdict is a coarse finite-sample trend: "decaying"
    when the last quartile of values has dropped to at most half the
    smallest value of the first quartile, "bounded away" otherwise.
    """
    indices = list(indices)
    if not indices:
        raise ValueError("indices must be nonempty")
    if not float(eps) >= 0:
        raise ValueError(f"eps must be nonnegative, got {eps!r}")
    rows = []
    for n in indices:
        r = family(n)
        try:
            exact = tail_probability_exact(r, Fraction(eps))
            rows.append(
                ScanRow(
                    index=n,
                    value=float(exact),
                    stderr=None,
                    mode="exact",
                    exact=exact,
                )
            )
        except EnumerationTooLarge:
            est = tail_probability_mc(r, float(eps), cfg)
            rows.append(
                ScanRow(
                    index=n,
                    value=est.mean,
                    stderr=est.stderr,
                    mode="mc",
                    exact=None,
                )
            )
    values = [row.value for row in rows]
    q = max(1, len(values) // 4)
    head_floor = min(values[:q])
    tail_ceiling = max(values[-q:])
    verdict = "decaying" if tail_ceiling <= head_floor / 2 else "bounded away"
    return ScanTable(eps=float(eps), rows=tuple(rows), verdict=verdict)
