"""Shared exception types."""


class ValidationError(ValueError):
    """Raised when an input value or configuration field is out of contract.

    ``field`` carries a dotted path ("wall.width_mm") when the error comes
    from a config document, so CLI diagnostics can point at the bad key.
    """

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
