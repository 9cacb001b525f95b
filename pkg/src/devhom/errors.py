"""Exception types shared across the package.

Every error carries a short machine-readable ``code`` so the CLI and tests
can branch on the kind of failure without parsing messages.
"""
from __future__ import annotations


class DevhomError(Exception):
    def __init__(self, code: str, message: str, ids: tuple = ()):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.ids = tuple(ids)


class CategoryError(DevhomError):
    pass


class CoefficientError(DevhomError):
    pass


class ComplexError(DevhomError):
    pass


class InstitutionError(DevhomError):
    pass


class FormulaSyntaxError(DevhomError):
    def __init__(self, message: str, offset: int):
        super().__init__("syntax-error", f"{message} at offset {offset}")
        self.offset = offset


class InvariantBreach(DevhomError):
    """A mathematical equivalence the code relies on failed; this is a bug."""
