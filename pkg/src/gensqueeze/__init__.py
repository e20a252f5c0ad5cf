"""Generalized squeezed and intelligent states for su(1,1) and canonical observables."""

from .errors import GenSqueezeError, NonConvergent, NotNormalizable
from .fock import FockBasis, LadderBasis, OperatorMatrix, StateVector
from .su11 import Su11Params, build_state, eigen_residual

__all__ = ["FockBasis", "GenSqueezeError", "LadderBasis", "NonConvergent", "NotNormalizable",
           "OperatorMatrix", "StateVector", "Su11Params", "build_state", "eigen_residual"]
__version__ = "0.1.0"
