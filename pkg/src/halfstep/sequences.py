"""Vector sequences, the averaged-step transform, and prefix diagnostics.

The central pair of maps is

    forward:  c_n = 2*x[n+1] - x[n]            (n = 1..L-1)
    inverse:  x[n+1] = (c_n + x[n]) / 2        (given x[1])

together with the closed form
x[n] = 2**-(n-1) * x[1] + sum_{k=1}^{n-1} 2**-(n-k) * c_k.  All three are
computed in exact rational arithmetic (every coefficient is a power of
two), so round-trip identities hold exactly; floats appear only when a
seminorm is evaluated.  Sequences are indexed from 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionMismatch, IndexOutOfRange, PrefixTooShort
from .jsonio import config_number, parse_config_number
from .seminorms import as_vector, eval_seminorm, vec_sub

__all__ = [
    "ConvergenceDiagnostic",
    "DrivenSpec",
    "ExplicitSpec",
    "NamedSpec",
    "SeminormTrace",
    "SequencePrefix",
    "SequenceSpec",
    "closed_form",
    "converges_to",
    "forward_transform",
    "inverse_solve",
    "spec_from_config",
]


def exact_vector(entries, dim=None):
    """Validate entries and convert them to exact rationals.

    Floats convert to their exact binary value, so dyadic inputs like
    0.25 stay exact.
    """
    return tuple(Fraction(v) for v in as_vector(entries, dim=dim))


@dataclass(frozen=True)
class SequencePrefix:
    """A finite prefix (x[1], ..., x[L]) of vectors of one dimension."""

    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise PrefixTooShort("a sequence prefix needs at least one term")
        d = len(terms[0])
        terms = tuple(exact_vector(t, dim=d) for t in terms)
        object.__setattr__(self, "terms", terms)

    @property
    def dimension(self):
        return len(self.terms[0])

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def term(self, n):
        """1-based access: term(1) is the first entry."""
        if not 1 <= n <= len(self.terms):
            raise IndexOutOfRange(
                f"index {n} outside the prefix range 1..{len(self.terms)}"
            )
        return self.terms[n - 1]


def forward_transform(x):
    """The transformed prefix c with c_n = 2*x[n+1] - x[n], length L-1."""
    if len(x) < 2:
        raise PrefixTooShort(
            "the forward transform needs at least two terms, got "
            f"{len(x)}"
        )
    terms = tuple(
        tuple(2 * b - a for a, b in zip(x.terms[n], x.terms[n + 1]))
        for n in range(len(x) - 1)
    )
    return SequencePrefix(terms)


def inverse_solve(x1, c):
    """Solve x[n+1] = (c_n + x[n]) / 2 from seed x1; length len(c)+1.

    forward_transform of the result reproduces ``c`` exactly.
    """
    if len(c) < 1:
        raise PrefixTooShort("the drive prefix must be nonempty")
    cur = exact_vector(x1)
    if len(cur) != c.dimension:
        raise DimensionMismatch(
            f"seed of dimension {len(cur)} with drive of dimension {c.dimension}"
        )
    terms = [cur]
    for cn in c.terms:
        cur = tuple((a + b) / 2 for a, b in zip(cn, cur))
        terms.append(cur)
    return SequencePrefix(tuple(terms))


def closed_form(x1, c, n):
    """x[n] directly: 2**-(n-1)*x1 + sum_{k<n} 2**-(n-k)*c_k, exact."""
    if not 1 <= n <= len(c) + 1:
        raise IndexOutOfRange(
            f"index {n} outside the solvable range 1..{len(c) + 1}"
        )
    x1 = exact_vector(x1, dim=c.dimension)
    acc = tuple(v / 2 ** (n - 1) for v in x1)
    for k in range(1, n):
        w = Fraction(1, 2 ** (n - k))
        ck = c.terms[k - 1]
        acc = tuple(a + w * v for a, v in zip(acc, ck))
    return acc


class SequenceSpec:
    """A recipe that can materialize a prefix of any requested length."""

    def materialize(self, prefix_len):
        raise NotImplementedError

    @property
    def dimension(self):
        raise NotImplementedError

    def to_config(self):
        raise NotImplementedError


@dataclass(frozen=True)
class ExplicitSpec(SequenceSpec):
    """A literal prefix; it cannot be extended past its own length."""

    prefix: SequencePrefix

    @property
    def dimension(self):
        return self.prefix.dimension

    def materialize(self, prefix_len):
        if prefix_len < 1:
            raise ValueError("prefix length must be >= 1")
        if prefix_len > len(self.prefix):
            raise PrefixTooShort(
                f"explicit prefix has {len(self.prefix)} terms, cannot "
                f"materialize {prefix_len}"
            )
        return SequencePrefix(self.prefix.terms[:prefix_len])

    def to_config(self):
        return {
            "kind": "explicit",
            "terms": [[config_number(v) for v in t] for t in self.prefix],
        }


_FAMILIES = ("constant", "geometric", "harmonic")


@dataclass(frozen=True)
class NamedSpec(SequenceSpec):
    """Closed-form families: constant a, geometric a*r**(n-1), harmonic a/n."""

    family: str
    scale: tuple
    ratio: Fraction = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(
                f"unknown sequence family {self.family!r}; expected one of "
                f"{_FAMILIES}"
            )
        object.__setattr__(self, "scale", exact_vector(self.scale))
        if self.family == "geometric":
            if self.ratio is None:
                raise ValueError("geometric family requires a ratio")
            object.__setattr__(self, "ratio", Fraction(self.ratio))
        elif self.ratio is not None:
            raise ValueError(f"family {self.family!r} takes no ratio")

    @property
    def dimension(self):
        return len(self.scale)

    def _term(self, n):
        if self.family == "constant":
            return self.scale
        if self.family == "geometric":
            r = self.ratio ** (n - 1)
            return tuple(a * r for a in self.scale)
        return tuple(a / n for a in self.scale)

    def materialize(self, prefix_len):
        if prefix_len < 1:
            raise ValueError("prefix length must be >= 1")
        return SequencePrefix(tuple(self._term(n) for n in range(1, prefix_len + 1)))

    def to_config(self):
        obj = {
            "kind": "named",
            "family": self.family,
            "scale": [config_number(v) for v in self.scale],
        }
        if self.family == "geometric":
            obj["ratio"] = config_number(self.ratio)
        return obj


@dataclass(frozen=True)
class DrivenSpec(SequenceSpec):
    """The recurrence x[n+1] = (c_n + x[n]) / 2 with drive c and seed x1."""

    x1: tuple
    drive: SequenceSpec

    def __post_init__(self):
        x1 = exact_vector(self.x1)
        if len(x1) != self.drive.dimension:
            raise DimensionMismatch(
                f"seed of dimension {len(x1)} with drive of dimension "
                f"{self.drive.dimension}"
            )
        object.__setattr__(self, "x1", x1)

    @property
    def dimension(self):
        return len(self.x1)

    def materialize(self, prefix_len):
        if prefix_len < 1:
            raise ValueError("prefix length must be >= 1")
        if prefix_len == 1:
            return SequencePrefix((self.x1,))
        return inverse_solve(self.x1, self.drive.materialize(prefix_len - 1))

    def to_config(self):
        return {
            "kind": "driven",
            "x1": [config_number(v) for v in self.x1],
            "drive": self.drive.to_config(),
        }


def _config_vector(value, field):
    if isinstance(value, (list, tuple)):
        return tuple(parse_config_number(v, field) for v in value)
    return (parse_config_number(value, field),)


def spec_from_config(obj):
    """Build a SequenceSpec from its JSON object form.

    Errors name the offending field so CLI diagnostics stay actionable.
    """
    if not isinstance(obj, dict):
        raise ValueError(f"sequence config must be an object, got {obj!r}")
    kind = obj.get("kind")
    if kind is None:
        raise ValueError("sequence config is missing field 'kind'")
    if kind == "explicit":
        _check_fields(obj, {"kind", "terms"})
        terms = obj.get("terms")
        if not isinstance(terms, (list, tuple)) or not terms:
            raise ValueError("field 'terms' must be a nonempty list of vectors")
        return ExplicitSpec(
            SequencePrefix(tuple(_config_vector(t, "terms") for t in terms))
        )
    if kind == "named":
        _check_fields(obj, {"kind", "family", "scale", "ratio"})
        family = obj.get("family")
        if family is None:
            raise ValueError("sequence config is missing field 'family'")
        if "scale" not in obj:
            raise ValueError("sequence config is missing field 'scale'")
        scale = _config_vector(obj["scale"], "scale")
        ratio = obj.get("ratio")
        if ratio is not None:
            ratio = parse_config_number(ratio, "ratio")
        return NamedSpec(family=family, scale=scale, ratio=ratio)
    if kind == "driven":
        _check_fields(obj, {"kind", "x1", "drive"})
        if "x1" not in obj:
            raise ValueError("sequence config is missing field 'x1'")
        if "drive" not in obj:
            raise ValueError("sequence config is missing field 'drive'")
        return DrivenSpec(
            x1=_config_vector(obj["x1"], "x1"),
            drive=spec_from_config(obj["drive"]),
        )
    raise ValueError(
        f"field 'kind' must be one of 'explicit', 'named', 'driven'; got {kind!r}"
    )


def _check_fields(obj, allowed):
    unknown = set(obj) - allowed
    if unknown:
        raise ValueError(f"unknown sequence config fields: {sorted(unknown)}")


@dataclass(frozen=True)
class SeminormTrace:
    """Tail behavior of sigma(x[n] - limit) for one family member."""

    seminorm_index: int
    values: tuple
    crossings: tuple  # per threshold: first index from which values stay under
    decaying: bool


@dataclass(frozen=True)
class ConvergenceDiagnostic:
    """Finite-prefix convergence evidence; not a proof of the limit."""

    prefix_len: int
    thresholds: tuple
    traces: tuple

    @property
    def converging(self):
        return all(t.decaying for t in self.traces)


def _crossing_index(values, threshold):
    """Smallest 1-based n with values[m] < threshold for all m >= n."""
    last_violation = 0
    for i, v in enumerate(values, start=1):
        if not v < threshold:
            last_violation = i
    if last_violation == len(values):
        return None
    return last_violation + 1


def materialize(x, prefix_len):
    """Accept a spec or a literal prefix and return a SequencePrefix."""
    if isinstance(x, SequencePrefix):
        return ExplicitSpec(x).materialize(prefix_len)
    return x.materialize(prefix_len)


def converges_to(family, x, limit, prefix_len, threshold_schedule):
    """Check that sigma(x[n] - limit) falls and stays under each threshold.

    The verdict is per seminorm (all thresholds crossed within the
    prefix) and overall (all seminorms).  A finite-prefix diagnostic
    only: it inspects the materialized terms, nothing beyond them.
    """
    if prefix_len < 2:
        raise PrefixTooShort("a convergence diagnostic needs prefix_len >= 2")
    thresholds = tuple(float(t) for t in threshold_schedule)
    if not thresholds:
        raise ValueError("threshold schedule must be nonempty")
    if any(t <= 0 for t in thresholds):
        raise ValueError("thresholds must be positive")
    if any(b >= a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("threshold schedule must be strictly decreasing")
    prefix = materialize(x, prefix_len)
    limit = exact_vector(limit, dim=prefix.dimension)
    if family.dimension != prefix.dimension:
        raise DimensionMismatch(
            f"family of dimension {family.dimension} with sequence of "
            f"dimension {prefix.dimension}"
        )
    traces = []
    for i, s in enumerate(family):
        values = tuple(eval_seminorm(s, vec_sub(t, limit)) for t in prefix)
        crossings = tuple(_crossing_index(values, t) for t in thresholds)
        traces.append(
            SeminormTrace(
                seminorm_index=i,
                values=values,
                crossings=crossings,
                decaying=all(c is not None for c in crossings),
            )
        )
    return ConvergenceDiagnostic(
        prefix_len=prefix_len, thresholds=thresholds, traces=tuple(traces)
    )
