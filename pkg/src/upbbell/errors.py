"""Shared exception types."""


class CapacityError(Exception):
    """Raised when an exact computation would exceed its configured size cap."""


class DegenerateWitnessError(Exception):
    """Raised when the witness normalization denominator vanishes (rank == eps * dim)."""
