"""Exception types shared across the package."""


class PostSelectionImpossibleError(ValueError):
    """Raised when a post-selected branch carries (numerically) zero probability."""


class PbmParseError(ValueError):
    """Malformed netpbm input. Carries the byte offset of the offending data."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset
