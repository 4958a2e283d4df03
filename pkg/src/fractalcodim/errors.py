"""Exception hierarchy for the fractalcodim package."""


class FractalCodimError(Exception):
    """Base class for all errors raised by this package."""


class NonAdmissibleHeight(FractalCodimError):
    """Section height outside the model's admissible range."""


class NoConvergence(FractalCodimError):
    """A root search or orbit-crossing search failed to converge."""


class QuadratureFailure(FractalCodimError):
    """Adaptive quadrature could not reach the requested tolerance."""


class DegenerateModel(FractalCodimError):
    """The slow divergence integral vanishes at equal heights (degenerate contact)."""


class BracketFailure(FractalCodimError):
    """No sign change found when bracketing the entry-exit root."""


class DegenerateGap(FractalCodimError):
    """A height difference underflowed to zero; estimator input unusable."""


class InsufficientScales(FractalCodimError):
    """Box-counting input does not meet the size/scale-span preconditions."""


class CompositionConstantTerm(FractalCodimError):
    """Series composition requires the inner series to have zero constant term."""


class NotInvertible(FractalCodimError):
    """Series inversion requires zero constant term and unit linear coefficient."""


class WrongShape(FractalCodimError):
    """Series does not have the required -x + x^2*g(x) shape."""
