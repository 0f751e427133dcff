"""Exception hierarchy shared by all gradmap modules."""


class GradmapError(Exception):
    """Base class for every error raised by gradmap."""


class NotSymmetric(GradmapError):
    pass


class NotCommuting(GradmapError):
    def __init__(self, i, j, defect):
        self.pair = (i, j)
        self.defect = defect
        super().__init__(
            f"generators {i} and {j} do not commute (relative defect {defect:.3e})"
        )


class DegenerateGenerators(GradmapError):
    pass


class DimensionMismatch(GradmapError):
    pass


class TooManyGenerators(GradmapError):
    pass


class UnboundedSupport(GradmapError):
    pass


class ZeroVector(GradmapError):
    pass


class ZeroDirection(GradmapError):
    pass


class UnknownName(GradmapError):
    pass


class BadParams(GradmapError):
    pass


class NotInNullCone(GradmapError):
    pass


class UnknownFace(GradmapError):
    pass


class MissingPData(GradmapError):
    pass


class MissingKAction(GradmapError):
    pass


class TargetNotInRelint(GradmapError):
    pass


class MaxIterations(GradmapError):
    """Newton solve ran out of iterations; ``best`` holds the last iterate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NonMonotone(GradmapError):
    pass
