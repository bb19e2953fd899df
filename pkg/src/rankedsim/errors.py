"""Exception hierarchy.

Validation failures derive from :class:`ValueError` so callers that only care
about bad input can catch that.
"""


class RankedSimError(Exception):
    """Base class for every error raised by this package."""


class DataError(RankedSimError, ValueError):
    """Input data violates a documented precondition."""


class DuplicateFeatureError(DataError):
    def __init__(self, entity, feature):
        super().__init__(f"duplicate feature {feature!r} in ranked list of {entity!r}")
        self.entity = entity
        self.feature = feature


class NonConjointError(DataError):
    def __init__(self, difference):
        self.difference = tuple(sorted(difference))
        super().__init__(f"lists are not conjoint; symmetric difference: {list(self.difference)}")


class CycleError(DataError):
    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__("category hierarchy cycle: " + " -> ".join(self.cycle))


class ConfigError(RankedSimError):
    """Invalid or incomplete configuration."""


class TransportError(RankedSimError):
    """An endpoint could not be reached or kept answering with errors."""

    def __init__(self, message, attempts=0, status=None, query=None):
        super().__init__(message)
        self.attempts = attempts
        self.status = status
        self.query = query


class ResultsParseError(RankedSimError):
    """A SPARQL results document could not be parsed."""

    def __init__(self, message, offset=None):
        where = f" at byte {offset}" if offset is not None else ""
        super().__init__(f"{message}{where}")
        self.offset = offset


class CacheMissError(RankedSimError):
    """Replay mode was asked for a query that was never recorded."""

    def __init__(self, digest, query):
        super().__init__(f"no recorded response for query digest {digest}")
        self.digest = digest
        self.query = query
