# errors.py

from typing import Optional, Sequence, Tuple


class SkinpermError(Exception):
    """
    Base class for every error raised by skinperm.
    """


class InvalidArgumentError(SkinpermError, ValueError):
    """
    A precondition on an argument was violated.
    """


class SingularPointError(SkinpermError):
    """
    TM admittance requested where kz vanishes exactly.
    """

    def __init__(self, k_rho: float, freq: float):
        self.k_rho = k_rho
        self.freq = freq
        super().__init__(
            f"TM admittance is singular at k_rho={k_rho!r} rad/m, f={freq!r} Hz (kz = 0); "
            "perturb k_rho"
        )


class ConvergenceError(SkinpermError):
    """
    Adaptive quadrature did not reach its tolerance within the subdivision cap.
    """

    def __init__(self, estimate, error_bound: float, max_depth: int):
        self.estimate = estimate
        self.error_bound = error_bound
        self.max_depth = max_depth
        super().__init__(
            f"quadrature did not converge within max_depth={max_depth}: "
            f"estimate={estimate!r}, error bound={error_bound:.3e}"
        )


class ForwardSolverError(SkinpermError):
    """
    Forward evaluation failed for a specific permittivity and frequency.
    """

    def __init__(self, eps: complex, freq: float, cause: Exception):
        self.eps = eps
        self.freq = freq
        self.cause = cause
        super().__init__(f"forward solve failed at eps={eps!r}, f={freq!r} Hz: {cause}")


class TableFormatError(SkinpermError):
    """
    Training-table file or its metadata sidecar is malformed.
    """


class DuplicateCenterError(SkinpermError):
    """
    Two training samples share the same reflection coefficient.
    """

    def __init__(self, pairs: Sequence[Tuple[int, int]]):
        self.pairs = list(pairs)
        shown = ", ".join(f"{i}/{j}" for i, j in self.pairs[:10])
        super().__init__(f"duplicate RBN centers at sample indices {shown}")


class ConditioningError(SkinpermError):
    """
    RBN least-squares solve failed or produced non-finite weights.
    """


class BankFormatError(SkinpermError):
    """
    Model-bank file cannot be decoded.
    """


class BankVersionError(BankFormatError):
    """
    Model-bank file was written with an unsupported format version.
    """


class BankOrderError(BankFormatError):
    """
    Model-bank frequencies are not strictly increasing.
    """


class TouchstoneParseError(SkinpermError):
    """
    Touchstone document violates the supported one-port v1 grammar.
    """

    def __init__(self, message: str, line_number: Optional[int] = None, source: str = "<string>"):
        self.line_number = line_number
        self.source = source
        self.reason = message
        where = f"{source}:{line_number}" if line_number is not None else source
        super().__init__(f"{where}: {message}")


class CoverageError(SkinpermError):
    """
    Measured trace does not span the requested frequency grid.
    """

    def __init__(self, trace_span: Tuple[float, float], grid_span: Tuple[float, float]):
        self.trace_span = trace_span
        self.grid_span = grid_span
        super().__init__(
            f"trace covers {trace_span[0]:.6g}-{trace_span[1]:.6g} Hz but grid needs "
            f"{grid_span[0]:.6g}-{grid_span[1]:.6g} Hz"
        )


class GridMismatchError(SkinpermError):
    """
    Frequencies of two objects that must share a grid differ.
    """


class DatasetError(SkinpermError):
    """
    Dataset root cannot be read at all.
    """
