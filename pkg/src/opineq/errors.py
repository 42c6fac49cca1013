"""Exception types shared by all modules."""
import numpy as np


class DomainError(ValueError):
    """An argument lies outside the domain where the formula is defined."""


class IllConditionedError(np.linalg.LinAlgError):
    """A matrix is too close to singular for a fractional power."""
