"""Exception hierarchy.

Each class carries the CLI exit code it maps to, so the command line front
end never has to keep a separate table in sync.
"""

from __future__ import annotations


class ButterflyError(Exception):
    exit_code = 1


class ConstructionError(ButterflyError, ValueError):
    """Invalid network parameters (bad permutation, bad dimension)."""

    exit_code = 3


class PreconditionError(ButterflyError, ValueError):
    """A request violates an operation's precondition."""

    exit_code = 3


class NoSuchNeighbourError(PreconditionError):
    """Asked for successors of an output node or predecessors of an input."""


class UnsupportedNetworkError(ButterflyError):
    """The operation is not defined for this class of network."""

    exit_code = 4


class InternalInvariantError(ButterflyError, AssertionError):
    """Something the construction guarantees did not hold. Always a bug."""

    exit_code = 5


class StructureError(InternalInvariantError):
    """A structural property of the connectivity graph failed."""
