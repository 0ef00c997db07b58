"""Exception types raised across the package."""


class FragsimError(Exception):
    """Base class for all package errors."""


class NegativeMass(FragsimError):
    """A fragment mass, dust value, or mass budget was negative."""


class MassBudgetExceeded(FragsimError):
    """Sum of parts plus dust exceeds the nominal budget beyond tolerance."""


class ScaleOutOfRange(FragsimError):
    """Scaling factor outside [0, 1]."""


class RankOutOfRange(FragsimError):
    """Requested fragment rank does not exist in the state."""


class InvalidFragmentVector(FragsimError):
    """Fragment vector is not non-negative, non-increasing, with sum <= 1."""


class EmptyRestriction(FragsimError):
    """Partition restricted to an empty element set."""


class RefinementMismatch(FragsimError):
    """Per-block refinements do not line up with the blocks being refined."""


class NotAPermutation(FragsimError):
    """Relabeling map is not a bijection of the ground set."""


class DivergentMeasure(FragsimError):
    """Dislocation measure violates the finite lost-mass integral condition."""


class EmptyTruncation(FragsimError):
    """Truncation threshold removes every dislocation."""


class DeadState(FragsimError):
    """No fragments remain to dislocate."""


class FragmentCapExceeded(FragsimError):
    """Fragment count passed the configured cap."""


class DegenerateNormalizer(FragsimError):
    """Normalizing scale is zero at the requested time."""


class EmptySample(FragsimError):
    """Empirical distribution requested for an empty sample."""


class TooFewSamples(FragsimError):
    """Sample too small for the asymptotic threshold to apply."""


class InsufficientData(FragsimError):
    """Not enough observations or categories for the goodness-of-fit test."""


class UnknownSuite(FragsimError):
    """Verification suite name not recognized."""


class ConfigError(FragsimError):
    """Malformed configuration file, key, or value."""
