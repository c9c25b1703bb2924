class ContractViolation(ValueError):
    """An operation was called outside its precondition."""


class InstanceError(ValueError):
    """Malformed problem data; ``where`` names the offending entry."""

    def __init__(self, message: str, where: str | None = None):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where
