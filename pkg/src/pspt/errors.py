from __future__ import annotations


class PsptError(Exception):
    """Base class for errors raised by this package."""


class ParseError(PsptError, ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class GraphValidationError(PsptError, ValueError):
    pass


class UnknownNodeError(PsptError, LookupError):
    def __init__(self, node):
        super().__init__(f"unknown node id {node!r}")
        self.node = node


class ContractError(PsptError, ValueError):
    """A precondition of an operation was violated by the caller."""


class IndexFormatError(PsptError):
    code = "format"


class BadMagicError(IndexFormatError):
    code = "bad_magic"


class VersionMismatchError(IndexFormatError):
    code = "version_mismatch"


class TruncatedIndexError(IndexFormatError):
    code = "truncated"


class ChecksumError(IndexFormatError):
    code = "checksum"


class CorruptIndexError(IndexFormatError):
    code = "invariant_violation"


class FanInOverflowError(PsptError, RuntimeError):
    pass
