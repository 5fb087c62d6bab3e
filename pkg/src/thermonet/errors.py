"""Exception hierarchy.

Every error carries a short machine-readable ``code`` and the exit status the
command line uses for it (2 usage/contract, 3 data, 4 internal invariant).
"""

from __future__ import annotations


class ThermonetError(Exception):
    code = "error"
    exit_status = 4

    def __init__(self, message: str, *, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class ContractError(ThermonetError, ValueError):
    """Caller violated an operation's precondition."""

    code = "contract-violation"
    exit_status = 2


class DataError(ThermonetError, ValueError):
    """Input data is malformed or degenerate."""

    code = "data-error"
    exit_status = 3


class MissingFileError(ContractError, FileNotFoundError):
    code = "file-not-found"


class ManifestError(DataError):
    code = "bad-manifest"


class GeometryError(DataError):
    code = "geometry-mismatch"


class BitDepthError(DataError):
    code = "bit-depth"


class RoiError(ContractError):
    code = "roi-out-of-bounds"


class StageError(ContractError):
    code = "wrong-stage"


class ZeroVarianceError(DataError):
    code = "zero-variance"


class InvariantError(ThermonetError, AssertionError):
    code = "invariant-failure"
    exit_status = 4
