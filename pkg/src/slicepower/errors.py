"""Exception types raised by the allocation pipeline."""


class SlicePowerError(Exception):
    """Base class for package errors."""


class LatencyInfeasibleError(SlicePowerError):
    """The requested transmission window does not fit the latency budget."""


class RateInfeasibleError(SlicePowerError):
    """No channel can carry the requested rate (e.g. all gains are zero)."""


class TableExhaustedError(SlicePowerError):
    """The outage table has no feasible entry for the requested query."""


class ZeroInterferenceError(SlicePowerError):
    """Interference-limited power is undefined: no resource sees interference."""
