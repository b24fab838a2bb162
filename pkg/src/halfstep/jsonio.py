"""JSON helpers: exact-rational serialization and canonical report dumps.

Rational report values are serialized as "p/q" strings so no precision is
lost; config files may supply numbers as ints, floats, or such strings.
Reports are dumped in a canonical form (two-space indent, no NaN, stable
key order as constructed) so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from numbers import Rational

__all__ = [
    "config_number",
    "dumps_report",
    "parse_config_number",
    "parse_rational",
    "rational_str",
]


def rational_str(q):
    """Canonical "p/q" string of an exact rational (always with the /q)."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(s):
    """Inverse of rational_str; also accepts plain ints/decimal strings."""
    return Fraction(s)


def parse_config_number(value, field):
    """Read one exact number from a config value.

    Ints and floats convert exactly (a float means its exact binary
    value); strings go through Fraction, so "3/4" and "0.25" both work.
    Errors name the offending ``field``.
    """
    if isinstance(value, bool):
        raise ValueError(f"field {field!r} must be a number, got {value!r}")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"field {field!r} must be finite, got {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(
                f"field {field!r} is not a valid rational string: {value!r}"
            ) from exc
    raise ValueError(f"field {field!r} must be a number, got {value!r}")


def config_number(q):
    """Serialize an exact rational for a config/manifest JSON value.

    Integers stay ints; dyadics that round-trip through float exactly are
    emitted as floats; everything else becomes a "p/q" string.
    """
    q = Fraction(q)
    if q.denominator == 1:
        return int(q)
    try:
        f = float(q)
    except OverflowError:
        return rational_str(q)
    if Fraction(f) == q:
        return f
    return rational_str(q)


def dumps_report(obj):
    """Canonical JSON text for a report object (trailing newline included)."""
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"
