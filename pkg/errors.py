"""
Error Types
"""


class ArtifactError(Exception):
    """Base class for every error raised by the toolkit"""


class InvariantViolation(ArtifactError):
    """A recomputed witness or identity failed its re-verification"""


class UndecidedError(ArtifactError):
    """
    A generalized Pell problem was neither obstructed nor solved within
    the configured orbit bound
    """

    def __init__(self, A: int, B: int, N: int, bound: int):
        self.A = A
        self.B = B
        self.N = N
        self.bound = bound
        super().__init__(
            f"{A}x^2 - {B}y^2 = {N}: no obstruction and no solution within {bound} orbit steps"
        )


class InstanceUnsupported(ArtifactError):
    """Wall data requested for a movable-cone case the toolkit only classifies"""
