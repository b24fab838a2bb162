"""Exception types shared across the package."""


class ExponentOutOfRange(ValueError):
    """Homogeneity exponent outside the admissible interval (0, 1]."""


class DimensionMismatch(ValueError):
    """Vectors, seminorms, or prefixes of incompatible ambient dimension."""


class PrefixTooShort(ValueError):
    """A sequence prefix has too few terms for the requested operation."""


class IndexOutOfRange(IndexError):
    """A 1-based sequence or event index outside its valid range."""


class EnumerationTooLarge(ValueError):
    """Exact pattern enumeration would exceed the configured cap."""
