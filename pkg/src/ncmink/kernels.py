"""Pointwise translation-invariant Lorentzian kernels.

Two distributional kernels drive every bilinear form in the package: the
antisymmetric light-cone kernel sgn(t-t') Theta[-(x-x')^2] and the symmetric
logarithm ln|(x-x')^2|, plus the trivial constant kernel used for
normalization checks.
"""

from __future__ import annotations

import math
from enum import Enum

from .minkowski import minkowski_interval


class KernelKind(Enum):
    LIGHTCONE = "lightcone"
    LOGABS = "logabs"
    CONSTANT = "constant"


class NullSeparationError(ValueError):
    """Raised when a kernel with an integrable singularity is evaluated on the cone.

    Callers integrating LOGABS must use the singularity-aware quadrature in
    :mod:`ncmink.integrate`; a pointwise value on the null cone does not exist.
    """


def lightcone(x, xp):
    """sgn(t-t') Theta[-(x-x')^2] with values in {-1, 0, +1}.

    Boundary conventions sgn(0) = 0 and Theta = 0 at exactly null separation
    keep the kernel exactly antisymmetric; the null set has measure zero in
    every integral so the convention cannot affect results.
    """
    s = minkowski_interval(x, xp)
    if s >= 0.0:
        return 0
    dt = _time_difference(x, xp)
    if dt > 0.0:
        return 1
    if dt < 0.0:
        return -1
    return 0


def log_abs(x, xp):
    """ln|(x-x')^2|; raises NullSeparationError exactly on the cone."""
    s = minkowski_interval(x, xp)
    if s == 0.0:
        raise NullSeparationError("ln|(x-x')^2| is singular at null separation")
    return math.log(abs(s))


def _time_difference(x, xp):
    from .minkowski import as_components

    return as_components(x)[0] - as_components(xp)[0]
