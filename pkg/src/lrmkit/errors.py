"""Exception hierarchy shared by every module."""


class LRMKitError(Exception):
    """Base class for all library errors."""


class RangeError(LRMKitError, IndexError):
    """A position, rank or count argument is outside its valid range."""


class StructureError(LRMKitError, ValueError):
    """Input does not describe a well-formed structure (forest, partition, file)."""


class ContractError(LRMKitError, ValueError):
    """A precondition on an argument was violated."""


class CapabilityError(LRMKitError):
    """The structure was built without the component a query needs."""
