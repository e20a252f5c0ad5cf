"""Exception hierarchy shared by all modules."""


class GenSqueezeError(Exception):
    """Base class for library errors."""


class BasisMismatch(GenSqueezeError):
    """Operands live on different truncated bases."""


class NotHermitian(GenSqueezeError):
    """An operator tagged or required Hermitian is not."""


class NonConvergent(GenSqueezeError):
    """Truncation tail mass exceeds the tolerance at the maximal cutoff."""


class NotNormalizable(GenSqueezeError):
    """The requested eigenstate has no normalizable solution.

    Attributes:
        margin: signed distance from the normalizability boundary
            (non-positive when the condition is violated).
    """

    def __init__(self, message, margin=float("nan")):
        super().__init__(message)
        self.margin = margin


class ZeroLoweringCoefficient(GenSqueezeError):
    """The coefficient u of the lowering generator vanishes."""


class DegenerateKilling(GenSqueezeError):
    """The Killing-form invariant l = sqrt(w^2 - 4uv) vanishes."""


class SingularB(GenSqueezeError):
    """The assembled complex coefficient matrix is (numerically) singular."""


class SingularBeta1(GenSqueezeError):
    """The momentum coefficient block is singular."""


class NotPositiveDefinite(GenSqueezeError):
    """M* + M is not positive definite, so the Gaussian is not normalizable."""


class InvalidChi(GenSqueezeError):
    """Amplifier ratio with |chi| <= 1."""


class ZeroProbability(GenSqueezeError):
    """Photon-number projection with vanishing probability."""
