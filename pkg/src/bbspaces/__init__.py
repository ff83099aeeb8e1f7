"""Numerics for Beurling-Bjorck spaces: weights, exponent sequences, Gabor
frames, Wilson bases and the isomorphic classification."""
from .errors import (AlignmentError, BBSpacesError, ConvergenceError, NotAFrameError,
                     PrefixExhaustedError, ResourceCapError, ValidationError)
from .signal import GridSpec, SampledSignal
from .weights import Log, PowerLog, Tabulated, WeightFunction
from .gabor import GaborCoefficients, LatticeSpec
from .wilson import GridCoefficients2D, WilsonCoefficients
from .classify import SpaceDescriptor

__version__ = "0.1.0"
