"""Weighted power-sum seminorms on finite-dimensional real vectors.

The concrete functional is sigma(x) = sum_i w_i * |x_i|**p with exponent
p in (0, 1] and nonnegative weights.  For p <= 1 this satisfies both the
triangle inequality (since (a+b)**p <= a**p + b**p) and p-homogeneity
sigma(k*x) = |k|**p * sigma(x).  Zero weights are allowed, so a family of
these seminorms need not separate points — which is exactly what the
indistinguishability predicate probes.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from numbers import Rational

from .errors import DimensionMismatch, ExponentOutOfRange

__all__ = [
    "INDISTINGUISHABLE_TOL",
    "AxiomReport",
    "PSeminorm",
    "SeminormFamily",
    "as_vector",
    "ball_contains",
    "check_seminorm_axioms",
    "eval_seminorm",
    "homogeneity_residual",
    "points_indistinguishable",
    "triangle_gap",
    "validate_p",
    "vec_add",
    "vec_scale",
    "vec_sub",
]

INDISTINGUISHABLE_TOL = 1e-12


def validate_p(p):
    """Return ``p`` unchanged if it is a finite real in (0, 1].

    Raises ExponentOutOfRange otherwise: above 1 the triangle inequality
    fails for the power-sum class, and p <= 0 breaks homogeneity at 0.
    """
    if isinstance(p, bool) or not isinstance(p, (int, float, Rational)):
        raise ExponentOutOfRange(f"exponent must be a real number, got {p!r}")
    value = float(p)
    if not math.isfinite(value) or not 0.0 < value <= 1.0:
        raise ExponentOutOfRange(f"exponent must lie in (0, 1], got {p!r}")
    return p


def as_vector(entries, dim=None):
    """Normalize ``entries`` to a tuple of finite reals.

    Accepts ints, floats and exact rationals, rejecting NaN/infinity.
    When ``dim`` is given the length must match.
    """
    vec = tuple(entries)
    for v in vec:
        if isinstance(v, bool) or not isinstance(v, (int, float, Rational)):
            raise ValueError(f"vector entries must be real numbers, got {v!r}")
        if isinstance(v, float) and not math.isfinite(v):
            raise ValueError(f"vector entries must be finite, got {v!r}")
    if dim is not None and len(vec) != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {len(vec)}")
    return vec


def _check_same_dim(x, y):
    if len(x) != len(y):
        raise DimensionMismatch(
            f"vectors of dimension {len(x)} and {len(y)} are incompatible"
        )


def vec_add(x, y):
    """Entrywise sum (exact when both entries are exact)."""
    _check_same_dim(x, y)
    return tuple(a + b for a, b in zip(x, y))


def vec_sub(x, y):
    """Entrywise difference (exact when both entries are exact)."""
    _check_same_dim(x, y)
    return tuple(a - b for a, b in zip(x, y))


def vec_scale(k, x):
    """Scalar multiple (exact when ``k`` and the entries are exact)."""
    return tuple(k * a for a in x)


@dataclass(frozen=True)
class PSeminorm:
    """A p-homogeneous seminorm sigma(x) = sum_i weights[i] * |x_i|**p."""

    p: float
    weights: tuple

    def __post_init__(self):
        validate_p(self.p)
        object.__setattr__(self, "p", float(self.p))
        weights = tuple(float(w) for w in self.weights)
        if not weights:
            raise ValueError("weights must be nonempty (ambient dimension >= 1)")
        for w in weights:
            if not math.isfinite(w) or w < 0.0:
                raise ValueError(f"weights must be finite and >= 0, got {w!r}")
        object.__setattr__(self, "weights", weights)

    @property
    def dimension(self):
        return len(self.weights)

    def __call__(self, x):
        return eval_seminorm(self, x)

    def to_config(self):
        return {"p": self.p, "weights": list(self.weights)}

    @classmethod
    def from_config(cls, obj):
        if not isinstance(obj, dict):
            raise ValueError(f"seminorm config must be an object, got {obj!r}")
        unknown = set(obj) - {"p", "weights"}
        if unknown:
            raise ValueError(f"unknown seminorm config fields: {sorted(unknown)}")
        if "p" not in obj:
            raise ValueError("seminorm config is missing field 'p'")
        if "weights" not in obj:
            raise ValueError("seminorm config is missing field 'weights'")
        weights = obj["weights"]
        if not isinstance(weights, (list, tuple)):
            raise ValueError(f"field 'weights' must be a list, got {weights!r}")
        return cls(p=obj["p"], weights=tuple(weights))


@dataclass(frozen=True)
class SeminormFamily:
    """A nonempty finite family of seminorms on one ambient dimension."""

    members: tuple

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValueError("a seminorm family must have at least one member")
        for s in members:
            if not isinstance(s, PSeminorm):
                raise ValueError(f"family members must be seminorms, got {s!r}")
        d = members[0].dimension
        for s in members[1:]:
            if s.dimension != d:
                raise DimensionMismatch(
                    f"family mixes dimensions {d} and {s.dimension}"
                )
        object.__setattr__(self, "members", members)

    @property
    def dimension(self):
        return self.members[0].dimension

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def to_config(self):
        return [s.to_config() for s in self.members]

    @classmethod
    def from_config(cls, obj):
        if isinstance(obj, dict):
            obj = [obj]
        if not isinstance(obj, (list, tuple)):
            raise ValueError(
                f"family config must be a list of seminorm objects, got {obj!r}"
            )
        return cls(members=tuple(PSeminorm.from_config(o) for o in obj))


def eval_seminorm(s, x):
    """Evaluate sigma(x) = sum_i w_i * |x_i|**p as a float."""
    if len(x) != s.dimension:
        raise DimensionMismatch(
            f"vector of dimension {len(x)} fed to seminorm of dimension "
            f"{s.dimension}"
        )
    if s.p == 1.0:
        return sum(w * abs(float(v)) for w, v in zip(s.weights, x))
    p = s.p
    return sum(w * abs(float(v)) ** p for w, v in zip(s.weights, x))


def ball_contains(center, s, eps, y):
    """Membership of ``y`` in the open ball {y : sigma(y - center) < eps}."""
    if not eps > 0:
        raise ValueError(f"ball radius must be positive, got {eps!r}")
    return eval_seminorm(s, vec_sub(y, center)) < eps


def points_indistinguishable(family, x, y):
    """True when every seminorm in the family vanishes on x - y.

    Such points share all their neighborhoods, so a sequence converging
    to one converges to the other.  Uses absolute tolerance 1e-12.
    """
    diff = vec_sub(x, y)
    return all(eval_seminorm(s, diff) <= INDISTINGUISHABLE_TOL for s in family)


def triangle_gap(s, x, y):
    """sigma(x+y) - sigma(x) - sigma(y); at most rounding noise above 0."""
    return eval_seminorm(s, vec_add(x, y)) - eval_seminorm(s, x) - eval_seminorm(s, y)


def homogeneity_residual(s, k, x):
    """|sigma(k*x) - |k|**p * sigma(x)| scaled by 1/(1 + sigma(k*x))."""
    lhs = eval_seminorm(s, vec_scale(k, x))
    rhs = abs(k) ** s.p * eval_seminorm(s, x)
    return abs(lhs - rhs) / (1.0 + lhs)


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of a sampled check of the two seminorm axioms."""

    sample_count: int
    seed: int
    tol: float
    triangle_violations: int
    homogeneity_violations: int
    max_triangle_gap: float
    max_homogeneity_residual: float

    @property
    def passed(self):
        return self.triangle_violations == 0 and self.homogeneity_violations == 0


def check_seminorm_axioms(s, sample_count, seed, tol):
    """Sample random pairs/scalars and report worst axiom violations.

    Triangle slack is measured absolutely (violation when
    sigma(x+y) - sigma(x) - sigma(y) > tol); the homogeneity residual is
    measured relative to 1 + sigma(k*x).  Deterministic given ``seed``.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    if not tol > 0:
        raise ValueError("tol must be positive")
    rng = random.Random(seed)
    d = s.dimension
    tri_bad = 0
    hom_bad = 0
    max_gap = -math.inf
    max_resid = 0.0
    for _ in range(sample_count):
        x = tuple(rng.uniform(-8.0, 8.0) for _ in range(d))
        y = tuple(rng.uniform(-8.0, 8.0) for _ in range(d))
        k = rng.uniform(-4.0, 4.0)
        gap = triangle_gap(s, x, y)
        if gap > tol:
            tri_bad += 1
        max_gap = max(max_gap, gap)
        resid = homogeneity_residual(s, k, x)
        if resid > tol:
            hom_bad += 1
        max_resid = max(max_resid, resid)
    return AxiomReport(
        sample_count=sample_count,
        seed=seed,
        tol=tol,
        triangle_violations=tri_bad,
        homogeneity_violations=hom_bad,
        max_triangle_gap=max_gap,
        max_homogeneity_residual=max_resid,
    )
