class GermError(ValueError):
    """Malformed or degenerate germ / mixed-function / recipe input."""


class PreconditionError(ValueError):
    """A point-level computation was asked for outside its domain of validity."""
