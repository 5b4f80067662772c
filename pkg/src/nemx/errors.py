"""Exception types shared across the package."""


class NemxError(Exception):
    """Base class for package-specific errors."""


class CalibrationError(NemxError, ValueError):
    """Raised when device calibration inputs are out of domain."""


class PolicyAssumptionError(NemxError, ValueError):
    """Raised when the two-threshold policy's rate assumptions are violated."""


class InternalInvariantError(NemxError, RuntimeError):
    """A condition the theory guarantees cannot happen did happen (bug class)."""


class DeathSpiralError(NemxError, RuntimeError):
    """No retail rate in the search bracket recovers the utility's costs.

    Attributes
    ----------
    gamma, theta : float
        The adoption level and fixed cost of the infeasible rate case.
    max_surplus : float
        Largest expected utility surplus found in the bracket (negative).
    """

    def __init__(self, gamma: float, theta: float, max_surplus: float):
        self.gamma = gamma
        self.theta = theta
        self.max_surplus = max_surplus
        super().__init__(
            f"no break-even retail rate exists (gamma={gamma:.4f}, "
            f"theta={theta:.2f}, best surplus {max_surplus:.4f} < 0)"
        )


class BracketError(NemxError, RuntimeError):
    """The break-even search bracket is misconfigured (surplus positive everywhere)."""


class SchemaError(NemxError, ValueError):
    """A trace file violates its column/value schema."""


class TraceAlignmentError(NemxError, ValueError):
    """Trace timestamps are not uniformly spaced or series do not align."""


class EmptyTraceError(NemxError, ValueError):
    """A trace file contains no data rows."""


class ZeroBaselineError(NemxError, ValueError):
    """Percentage change requested against a zero baseline."""
