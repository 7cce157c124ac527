"""
Error types for the Affine Quiver toolkit.

Every failure a caller can act on carries a short machine-readable ``code``
and the process ``exit_code`` the command line front end reports for it.
Tool functions registered with the MCP server catch these and render them as
"❌" strings instead of raising.
"""


class QuiverError(Exception):
    """Base class for all toolkit errors."""

    code = "error"
    exit_code = 1

    def as_dict(self) -> dict:
        return {"error": self.code, "message": str(self)}


class UsageError(QuiverError, ValueError):
    """Bad arguments: shape mismatches, unknown vertices, wrong quiver or field."""

    code = "usage"
    exit_code = 2


class ParseError(UsageError):
    """Malformed quiver, representation or dimension-vector input."""

    code = "parse"


class NotAffine(QuiverError):
    """The underlying graph is not an extended Dynkin diagram."""

    code = "not_affine"


class NoAdmissibleOrder(QuiverError):
    """The quiver has an oriented cycle, so no admissible sink sequence exists."""

    code = "no_admissible_order"


class NeedsLargerField(QuiverError):
    """A randomized search ran out of budget; retry over a larger prime."""

    code = "needs_larger_field"
    exit_code = 3


class CombinatorialExplosion(QuiverError):
    """An enumeration would exceed the configured cap."""

    code = "explosion"
    exit_code = 4


class OracleMismatch(QuiverError):
    code = "oracle_mismatch"
    exit_code = 5


class InternalError(QuiverError):
    """A consistency check failed. This is always a bug."""

    code = "internal"


class DegreeBoundExceeded(QuiverError):
    code = "degree_bound"


class InventoryIncomplete(InternalError):
    code = "inventory_incomplete"
