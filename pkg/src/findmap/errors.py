"""Exception hierarchy shared by all findmap modules."""


class FindMapError(ValueError):
    """Base class for every validation error raised by this package."""


# geometry
class CollinearInput(FindMapError):
    pass


class CoincidentFoci(FindMapError):
    pass


class DegenerateRatio(FindMapError):
    pass


class DegenerateConfiguration(FindMapError):
    pass


# ranging
class ZeroDistance(FindMapError):
    pass


class NonPositivePower(FindMapError):
    pass


class NegativeDelay(FindMapError):
    """Estimated distance would be negative (an over-shifted transmission)."""


class IllegalCorruption(FindMapError):
    pass


# adversary
class SamePosition(FindMapError):
    pass


class NoIntersection(FindMapError):
    pass


class WrongCorruptionKind(FindMapError):
    pass


class InvalidCounts(FindMapError):
    pass


# protocol / harness / cli
class TooFewSensors(FindMapError):
    pass


class SamplingExhausted(FindMapError):
    pass


class InvalidScenario(FindMapError):
    pass


class TooFewStations(FindMapError):
    pass


class InvalidParams(FindMapError):
    pass
