"""Exception types shared across the package."""


class LegicolorError(Exception):
    """Base class for all package-specific errors."""


class FieldError(LegicolorError):
    """Invalid finite-field request (non-prime characteristic, order overflow)."""


class PlaneFormatError(LegicolorError):
    """Plane file does not parse as the documented JSON interchange format."""


class InfeasibleError(LegicolorError):
    """A randomized or numeric search exhausted its budget with no witness."""


class CapsError(LegicolorError):
    """Dangerous-pair degree caps (a, b) violated for the given partial coloring."""

    def __init__(self, report):
        self.report = report
        super().__init__(
            f"degree caps exceeded: max pairs per line {report.max_pair_degree} "
            f"(cap {report.line_cap}), max involved lines per reserve point "
            f"{report.max_involved_lines} (cap {report.point_cap})"
        )


class InstanceError(LegicolorError):
    """Resampling problem instance violates a structural invariant."""


class DecodeError(LegicolorError):
    """Run register cannot be decoded; names the failing step."""

    def __init__(self, step, reason):
        self.step = step
        self.reason = reason
        super().__init__(f"register undecodable at step {step}: {reason}")
