"""Exception and warning types shared across the package.

Plain ``ValueError`` is used for malformed arguments (bad dimensions,
indices, geometry).  The classes below mark conditions that workflows
need to tell apart, in particular the CLI's numerical-contract exit path.
"""


class NumericalContractError(ValueError):
    """Base class for violations of a module's numerical contract."""


class TruncationError(NumericalContractError):
    """Fock-space truncation too small for the requested amplitude."""


class UnmatchableError(NumericalContractError):
    """No admissible parameter value equates the two coupling rates."""


class UnobservableError(NumericalContractError):
    """Signal prefactor vanishes (atomic mixture has rho_e == rho_g)."""


class IllConditionedError(NumericalContractError):
    """A tomographic inversion point is too ill-conditioned to solve."""


class ImprobableOutcomeError(NumericalContractError):
    """Conditioning on an outcome whose probability is numerically zero."""


class ConfigError(ValueError):
    """Run configuration failed validation; message names the offender."""


class ValidityWarning(UserWarning):
    """An approximation or guard is outside its comfortable regime."""
