"""Quantitative tail certificates for the averaged recurrence.

Once the drive c_n = 2*x[n+1] - x[n] (shifted so the candidate limit is
the zero vector) stays under the budget (2**p - 1)*eps from some index N
on, unrolling the recurrence m steps and applying the triangle
inequality plus p-homogeneity on the power-of-two coefficients gives

    sigma(x[N+m] - limit) <= 2**(-m*p) * sigma(x[N] - limit)
                             + (1 - 2**(-m*p)) * eps,

a curve sliding from sigma(x[N] - limit) toward eps.  This module finds
N, evaluates every observed term against that curve, and reports the
result as a certificate (or a refusal when no N exists in the prefix).
Strict "<" claims are validated as "<=" with 1e-9 relative slack, since
floats cannot witness strictness.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IndexOutOfRange, PrefixTooShort
from .seminorms import (
    eval_seminorm,
    points_indistinguishable,
    validate_p,
    vec_scale,
    vec_sub,
)
from .sequences import (
    SequencePrefix,
    converges_to,
    exact_vector,
    forward_transform,
    materialize,
)

__all__ = [
    "BOUND_SLACK",
    "DEFAULT_EPS_GRID",
    "LIMSUP_SLACK",
    "CertRow",
    "CertifyReport",
    "IndistinguishableLimitsReport",
    "Refusal",
    "TailCertificate",
    "TelescopeRow",
    "certify",
    "find_threshold_index",
    "indistinguishable_limits_check",
    "tail_bound",
    "telescoped_bound_check",
]

DEFAULT_EPS_GRID = (1.0, 0.3, 0.1, 0.03, 0.01)
BOUND_SLACK = 1e-9  # relative slack standing in for strict "<"
LIMSUP_SLACK = 1e-6  # absolute slack on the empirical limsup vs eps


def budget(p, eps):
    """The drive budget (2**p - 1) * eps."""
    return (2.0 ** float(p) - 1.0) * float(eps)


def find_threshold_index(s, c, eps):
    """Smallest N with sigma(c_n) < (2**p - 1)*eps for all n >= N in c.

    Returns None when even the last observed term violates the budget.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    cap = budget(s.p, eps)
    last_violation = 0
    for n, term in enumerate(c, start=1):
        if not eval_seminorm(s, term) < cap:
            last_violation = n
    if last_violation == len(c):
        return None
    return last_violation + 1


def tail_bound(sigma_xN, eps, p, m):
    """The certificate curve 2**(-m*p)*sigma_xN + (1 - 2**(-m*p))*eps."""
    validate_p(p)
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m!r}")
    decay = 2.0 ** (-float(m) * float(p))
    return decay * float(sigma_xN) + (1.0 - decay) * float(eps)


@dataclass(frozen=True)
class TelescopeRow:
    """One unrolled-recurrence comparison sigma(2**m*u_m - u_0) vs budget."""

    m: int
    lhs: float
    rhs: float
    passed: bool


def telescoped_bound_check(s, x, limit, N, eps):
    """Check sigma(2**m*(x[N+m]-limit) - (x[N]-limit)) < (2**(m*p)-1)*eps.

    This is the pre-division form of the certificate inequality; the 2**m
    scaling is exact (rational arithmetic), floats enter only at the
    seminorm.  Emits one row per available m = 1..L-N.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    if not 1 <= N <= len(x):
        raise IndexOutOfRange(f"N={N} outside the prefix range 1..{len(x)}")
    base = vec_sub(x.term(N), limit)
    rows = []
    for m in range(1, len(x) - N + 1):
        shifted = vec_sub(x.term(N + m), limit)
        lhs = eval_seminorm(s, vec_sub(vec_scale(2**m, shifted), base))
        rhs = (2.0 ** (m * s.p) - 1.0) * float(eps)
        passed = lhs <= rhs + BOUND_SLACK * (1.0 + rhs)
        rows.append(TelescopeRow(m=m, lhs=lhs, rhs=rhs, passed=passed))
    return tuple(rows)


@dataclass(frozen=True)
class CertRow:
    """One observed point against the certificate curve."""

    m: int
    observed: float
    bound: float
    passed: bool


@dataclass(frozen=True)
class TailCertificate:
    """A quantitative convergence certificate for one (seminorm, eps) pair."""

    seminorm_index: int
    p: float
    epsilon: float
    N: int
    sigma_xN: float
    rows: tuple
    empirical_limsup: float
    limsup_window_start: int
    certified: bool

    def to_report(self):
        return {
            "seminorm_index": self.seminorm_index,
            "p": self.p,
            "epsilon": self.epsilon,
            "N": self.N,
            "sigma_xN": self.sigma_xN,
            "rows": [
                {
                    "m": r.m,
                    "observed": r.observed,
                    "bound": r.bound,
                    "pass": r.passed,
                }
                for r in self.rows
            ],
            "empirical_limsup": self.empirical_limsup,
            "limsup_window_start": self.limsup_window_start,
            "verdict": "certified" if self.certified else "failed",
        }


@dataclass(frozen=True)
class Refusal:
    """No threshold index exists within the prefix for this pair.

    Not a divergence claim: the drive simply never settled under the
    budget inside the observed window.
    """

    seminorm_index: int
    epsilon: float
    budget: float
    reason: str

    def to_report(self):
        return {
            "seminorm_index": self.seminorm_index,
            "epsilon": self.epsilon,
            "budget": self.budget,
            "verdict": "refusal",
            "reason": self.reason,
        }


@dataclass(frozen=True)
class CertifyReport:
    """All (seminorm, eps) outcomes for one sequence/limit, in grid order."""

    prefix_len: int
    eps_grid: tuple
    outcomes: tuple

    @property
    def certificates(self):
        return tuple(o for o in self.outcomes if isinstance(o, TailCertificate))

    @property
    def refusals(self):
        return tuple(o for o in self.outcomes if isinstance(o, Refusal))

    @property
    def all_certified(self):
        return all(
            isinstance(o, TailCertificate) and o.certified for o in self.outcomes
        )

    def to_report(self):
        return {
            "prefix_len": self.prefix_len,
            "eps_grid": list(self.eps_grid),
            "all_certified": self.all_certified,
            "outcomes": [o.to_report() for o in self.outcomes],
        }


def certify(family, x, limit, eps_grid=DEFAULT_EPS_GRID, prefix_len=64):
    """Build tail certificates for every (seminorm, eps) pair.

    Materializes the prefix, shifts it by the candidate limit (reducing
    to a zero limit), transforms it, and for each pair finds N and checks
    every observed term against the certificate curve.  The empirical
    limsup (max over the final quartile of the prefix) must sit under
    eps + 1e-6 for the pair to be certified.
    """
    if prefix_len < 3:
        raise PrefixTooShort("certification needs prefix_len >= 3")
    eps_grid = tuple(float(e) for e in eps_grid)
    if not eps_grid:
        raise ValueError("eps grid must be nonempty")
    if any(not e > 0 for e in eps_grid):
        raise ValueError("eps values must be positive")
    prefix = materialize(x, prefix_len)
    limit = exact_vector(limit, dim=prefix.dimension)
    shifted = SequencePrefix(tuple(vec_sub(t, limit) for t in prefix))
    c = forward_transform(shifted)
    L = len(prefix)
    window = max(1, L // 4)
    window_start = L - window + 1
    outcomes = []
    for i, s in enumerate(family):
        values = [eval_seminorm(s, t) for t in shifted]
        for eps in eps_grid:
            N = find_threshold_index(s, c, eps)
            if N is None:
                outcomes.append(
                    Refusal(
                        seminorm_index=i,
                        epsilon=eps,
                        budget=budget(s.p, eps),
                        reason=(
                            "transformed sequence never settles under the "
                            "budget within the prefix"
                        ),
                    )
                )
                continue
            sigma_xN = values[N - 1]
            rows = []
            ok = True
            for m in range(0, L - N + 1):
                bound = tail_bound(sigma_xN, eps, s.p, m)
                observed = values[N - 1 + m]
                passed = observed <= bound + BOUND_SLACK * (1.0 + bound)
                ok = ok and passed
                rows.append(
                    CertRow(m=m, observed=observed, bound=bound, passed=passed)
                )
            limsup = max(values[window_start - 1 :])
            certified = ok and limsup <= eps + LIMSUP_SLACK
            outcomes.append(
                TailCertificate(
                    seminorm_index=i,
                    p=s.p,
                    epsilon=eps,
                    N=N,
                    sigma_xN=sigma_xN,
                    rows=tuple(rows),
                    empirical_limsup=limsup,
                    limsup_window_start=window_start,
                    certified=certified,
                )
            )
    return CertifyReport(
        prefix_len=prefix_len, eps_grid=eps_grid, outcomes=tuple(outcomes)
    )


@dataclass(frozen=True)
class IndistinguishableLimitsReport:
    """Two candidate limits for one sequence, cross-checked for coherence.

    When the family certifies convergence to two points at once, those
    points must be separated by no member seminorm — multiple limits can
    only differ by a direction the family cannot see.
    """

    converges_a: bool
    converges_b: bool
    indistinguishable: bool

    @property
    def consistent(self):
        if self.converges_a and self.converges_b:
            return self.indistinguishable
        return True


def indistinguishable_limits_check(
    family, x, lim_a, lim_b, prefix_len, threshold_schedule
):
    """Diagnose convergence to both limits and cross-check separation."""
    diag_a = converges_to(family, x, lim_a, prefix_len, threshold_schedule)
    diag_b = converges_to(family, x, lim_b, prefix_len, threshold_schedule)
    return IndistinguishableLimitsReport(
        converges_a=diag_a.converging,
        converges_b=diag_b.converging,
        indistinguishable=points_indistinguishable(family, lim_a, lim_b),
    )
