from packaging.version import InvalidVersion, parse

# Bump when the calibration cache layout or the null simulation changes.
CACHE_SCHEMA_VERSION = "1.1"
MIN_CACHE_SCHEMA_VERSION = "1.1"


def cache_schema_compatible(v: str) -> bool:
    """True if a cache entry written with schema 'v' can be reused.
    :param v: string representation of the schema version stored in the entry"""
    try:
        return parse(MIN_CACHE_SCHEMA_VERSION) <= parse(v) <= parse(CACHE_SCHEMA_VERSION)
    except InvalidVersion:
        return False

