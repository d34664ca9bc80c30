"""Exception types shared across the library."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the function."""


class TiedBestArm(ValueError):
    """Two or more arms attain the maximum mean; the best arm is undefined."""


class ZeroCount(ValueError):
    """A pull count that must be >= 1 is zero."""


class ZeroGap(ValueError):
    """A suboptimal arm has zero gap, so gap-based formulas are undefined."""


class EmptyEpisode(ValueError):
    """An episode accumulator holds no rewards, so its mean is undefined."""


class Uninitialized(ValueError):
    """An arm has not been pulled yet; its statistics are undefined."""


class NonConvergence(RuntimeError):
    """An iterative solver exhausted its iteration budget without converging."""


class TooManyArms(ValueError):
    """The brute-force grid oracle only supports small arm counts."""


class EmptyCell(ValueError):
    """A sweep cell contains no run records to summarize."""
