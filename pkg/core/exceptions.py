"""Standardized exception handling for graphlim."""

from enum import Enum
from typing import Optional, Dict, Any


class ErrorCode(str, Enum):
    """Standardized error codes."""

    # Graph errors (GRA001-GRA999)
    INVALID_VERTEX = "GRA001"
    DEGREE_BOUND_EXCEEDED = "GRA002"
    INVALID_GRAPH = "GRA003"
    SIZE_MISMATCH = "GRA004"
    DEGREE_BOUND_MISMATCH = "GRA005"
    EMPTY_GRAPH = "GRA006"
    INVALID_LABELING = "GRA007"

    # Local statistics errors (STA001-STA999)
    CANONICALIZATION_LIMIT = "STA001"
    STATISTICS_MISMATCH = "STA002"
    INVALID_KEY = "STA003"

    # Metric errors (MET001-MET999)
    EXACT_LIMIT_EXCEEDED = "MET001"

    # Partition errors (PAR001-PAR999)
    NOT_PATH_LIKE = "PAR001"
    NOT_TORUS = "PAR002"
    NOT_FOREST = "PAR003"
    PARTITION_MISMATCH = "PAR004"

    # Functional errors (FUN001-FUN999)
    FUNCTIONAL_EVALUATION_FAILED = "FUN001"
    NON_SCALAR_FUNCTIONAL = "FUN002"
    UNKNOWN_FUNCTIONAL = "FUN003"

    # Spectral errors (SPE001-SPE999)
    MISSING_KERNEL_CLASS = "SPE001"
    KERNEL_NOT_WELL_DEFINED = "SPE002"
    KERNEL_ASYMMETRIC = "SPE003"
    MATRIX_ASYMMETRIC = "SPE004"
    UNKNOWN_KERNEL = "SPE005"
    UNKNOWN_REFERENCE = "SPE006"

    # Sequence errors (SEQ001-SEQ999)
    SEQUENCE_TOO_SHORT = "SEQ001"
    INVALID_MANIFEST = "SEQ002"
    GENERATION_INFEASIBLE = "SEQ003"
    REJECTION_CAP_EXCEEDED = "SEQ004"
    UNKNOWN_FAMILY = "SEQ005"

    # Validation errors (VAL001-VAL999)
    INVALID_INPUT = "VAL001"
    PARAMETER_OUT_OF_RANGE = "VAL002"
    EDGE_LIST_FORMAT = "VAL003"
    INVALID_DOCUMENT = "VAL004"

    # System errors (SYS001-SYS999)
    INTERNAL_ERROR = "SYS001"
    INVARIANT_VIOLATION = "SYS003"


class GraphLimException(Exception):
    """Base exception for graphlim errors."""

    def __init__(
        self,
        error_code: ErrorCode,
        message: str,
        details: Optional[Dict[str, Any]] = None,
        cause: Optional[Exception] = None
    ):
        self.error_code = error_code
        self.message = message
        self.details = details or {}
        self.cause = cause
        super().__init__(message)

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to dictionary for reports and diagnostics."""
        result = {
            "error_code": self.error_code.value,
            "error_message": self.message,
            "details": self.details
        }

        if self.cause:
            result["cause"] = str(self.cause)

        return result


# Graph Exceptions
class GraphException(GraphLimException):
    """Base graph exception."""
    pass


class InvalidVertexException(GraphException):
    def __init__(self, vertex: Any, n: int):
        super().__init__(
            ErrorCode.INVALID_VERTEX,
            f"Invalid vertex {vertex} for graph on {n} vertices",
            {"vertex": str(vertex), "n": n}
        )


class DegreeBoundExceededException(GraphException):
    def __init__(self, vertex: int, degree: int, degree_bound: int):
        super().__init__(
            ErrorCode.DEGREE_BOUND_EXCEEDED,
            f"Vertex {vertex} has degree {degree} above the bound {degree_bound}",
            {"vertex": vertex, "degree": degree, "degree_bound": degree_bound}
        )


class InvalidGraphException(GraphException):
    def __init__(self, reason: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            ErrorCode.INVALID_GRAPH,
            f"Invalid graph: {reason}",
            {"reason": reason, **(details or {})}
        )


class SizeMismatchException(GraphException):
    def __init__(self, left: int, right: int):
        super().__init__(
            ErrorCode.SIZE_MISMATCH,
            f"Vertex counts differ: {left} != {right}",
            {"left": left, "right": right}
        )


class DegreeBoundMismatchException(GraphException):
    def __init__(self, left: int, right: int):
        super().__init__(
            ErrorCode.DEGREE_BOUND_MISMATCH,
            f"Degree bounds differ: {left} != {right}",
            {"left": left, "right": right}
        )


class EmptyGraphException(GraphException):
    def __init__(self, operation: str):
        super().__init__(
            ErrorCode.EMPTY_GRAPH,
            f"Operation '{operation}' requires a nonempty graph",
            {"operation": operation}
        )


class InvalidLabelingException(GraphException):
    def __init__(self, reason: str):
        super().__init__(
            ErrorCode.INVALID_LABELING,
            f"Invalid vertex labeling: {reason}",
            {"reason": reason}
        )


# Local Statistics Exceptions
class StatisticsException(GraphLimException):
    """Base local statistics exception."""
    pass


class CanonicalizationLimitException(StatisticsException):
    def __init__(self, vertex_count: int, limit: int):
        super().__init__(
            ErrorCode.CANONICALIZATION_LIMIT,
            f"Rooted graph has {vertex_count} vertices, canonicalization limit is {limit}",
            {"vertex_count": vertex_count, "limit": limit}
        )


class StatisticsMismatchException(StatisticsException):
    def __init__(self, field: str, left: Any, right: Any):
        super().__init__(
            ErrorCode.STATISTICS_MISMATCH,
            f"Statistics vectors disagree on {field}: {left} != {right}",
            {"field": field, "left": left, "right": right}
        )


class InvalidKeyException(StatisticsException):
    def __init__(self, key: str, reason: str):
        super().__init__(
            ErrorCode.INVALID_KEY,
            f"Invalid canonical key '{key}': {reason}",
            {"key": key, "reason": reason}
        )


# Metric Exceptions
class MetricException(GraphLimException):
    """Base metric exception."""
    pass


class ExactLimitExceededException(MetricException):
    def __init__(self, vertex_count: int, limit: int):
        super().__init__(
            ErrorCode.EXACT_LIMIT_EXCEEDED,
            f"Exact search requested on {vertex_count} vertices, limit is {limit}",
            {"vertex_count": vertex_count, "limit": limit}
        )


# Partition Exceptions
class PartitionException(GraphLimException):
    """Base partition exception."""
    pass


class NotPathLikeException(PartitionException):
    def __init__(self, max_degree: int):
        super().__init__(
            ErrorCode.NOT_PATH_LIKE,
            f"Graph is not a disjoint union of paths and cycles (max degree {max_degree})",
            {"max_degree": max_degree}
        )


class NotTorusException(PartitionException):
    def __init__(self, n: int):
        super().__init__(
            ErrorCode.NOT_TORUS,
            f"Graph on {n} vertices is not a row-major torus grid",
            {"n": n}
        )


class NotForestException(PartitionException):
    def __init__(self, n: int, edges: int):
        super().__init__(
            ErrorCode.NOT_FOREST,
            f"Graph with {n} vertices and {edges} edges contains a cycle",
            {"n": n, "edges": edges}
        )


class PartitionMismatchException(PartitionException):
    def __init__(self, field: str, left: Any, right: Any):
        super().__init__(
            ErrorCode.PARTITION_MISMATCH,
            f"Partitions disagree on {field}: {left} != {right}",
            {"field": field, "left": left, "right": right}
        )


# Functional Exceptions
class FunctionalException(GraphLimException):
    """Base functional exception."""
    pass


class FunctionalEvaluationException(FunctionalException):
    def __init__(self, functional: str, cause: Exception):
        super().__init__(
            ErrorCode.FUNCTIONAL_EVALUATION_FAILED,
            f"Evaluation of functional '{functional}' failed: {cause}",
            {"functional": functional},
            cause
        )


class NonScalarFunctionalException(FunctionalException):
    def __init__(self, functional: str, value_type: str):
        super().__init__(
            ErrorCode.NON_SCALAR_FUNCTIONAL,
            f"Functional '{functional}' returned {value_type}, a scalar value is required",
            {"functional": functional, "value_type": value_type}
        )


class UnknownFunctionalException(FunctionalException):
    def __init__(self, name: str):
        super().__init__(
            ErrorCode.UNKNOWN_FUNCTIONAL,
            f"Unknown functional: {name}",
            {"name": name}
        )


# Spectral Exceptions
class SpectralException(GraphLimException):
    """Base spectral exception."""
    pass


class MissingKernelClassException(SpectralException):
    def __init__(self, key_hex: str, vertex: int):
        super().__init__(
            ErrorCode.MISSING_KERNEL_CLASS,
            f"Kernel has no entry for ball class {key_hex} (first seen at vertex {vertex})",
            {"key": key_hex, "vertex": vertex}
        )


class KernelNotWellDefinedException(SpectralException):
    def __init__(self, key_hex: str, orbit: list):
        super().__init__(
            ErrorCode.KERNEL_NOT_WELL_DEFINED,
            f"Kernel values for class {key_hex} are not constant on the root-fixing orbit {orbit}",
            {"key": key_hex, "orbit": orbit}
        )


class KernelAsymmetricException(SpectralException):
    def __init__(self, x: int, y: int, forward: float, backward: float):
        super().__init__(
            ErrorCode.KERNEL_ASYMMETRIC,
            f"Assembled kernel is asymmetric at ({x}, {y}): {forward} != {backward}",
            {"x": x, "y": y, "forward": forward, "backward": backward}
        )


class MatrixAsymmetricException(SpectralException):
    def __init__(self, deviation: float):
        super().__init__(
            ErrorCode.MATRIX_ASYMMETRIC,
            f"Matrix is not symmetric (max deviation {deviation})",
            {"deviation": deviation}
        )


class UnknownKernelException(SpectralException):
    def __init__(self, name: str):
        super().__init__(
            ErrorCode.UNKNOWN_KERNEL,
            f"Unknown kernel: {name}",
            {"name": name}
        )


class UnknownReferenceException(SpectralException):
    def __init__(self, name: str, reason: str = "not registered"):
        super().__init__(
            ErrorCode.UNKNOWN_REFERENCE,
            f"Unknown reference curve '{name}': {reason}",
            {"name": name, "reason": reason}
        )


# Sequence Exceptions
class SequenceException(GraphLimException):
    """Base sequence exception."""
    pass


class SequenceTooShortException(SequenceException):
    def __init__(self, length: int, required: int):
        super().__init__(
            ErrorCode.SEQUENCE_TOO_SHORT,
            f"Sequence has {length} members, at least {required} required",
            {"length": length, "required": required}
        )


class InvalidManifestException(SequenceException):
    def __init__(self, field: str, reason: str):
        super().__init__(
            ErrorCode.INVALID_MANIFEST,
            f"Invalid manifest field '{field}': {reason}",
            {"field": field, "reason": reason}
        )


class GenerationInfeasibleException(SequenceException):
    def __init__(self, family: str, reason: str):
        super().__init__(
            ErrorCode.GENERATION_INFEASIBLE,
            f"Cannot generate {family}: {reason}",
            {"family": family, "reason": reason}
        )


class RejectionCapExceededException(SequenceException):
    def __init__(self, n: int, d: int, attempts: int):
        super().__init__(
            ErrorCode.REJECTION_CAP_EXCEEDED,
            f"Pairing model rejected {attempts} samples for n={n}, d={d}",
            {"n": n, "d": d, "attempts": attempts}
        )


class UnknownFamilyException(SequenceException):
    def __init__(self, family: str):
        super().__init__(
            ErrorCode.UNKNOWN_FAMILY,
            f"Unknown graph family: {family}",
            {"family": family}
        )


# Validation Exceptions
class ValidationException(GraphLimException):
    """Base validation exception."""
    pass


class InvalidInputException(ValidationException):
    def __init__(self, field: str, value: Any, reason: str):
        super().__init__(
            ErrorCode.INVALID_INPUT,
            f"Invalid input for field '{field}': {reason}",
            {"field": field, "value": str(value), "reason": reason}
        )


class ParameterOutOfRangeException(ValidationException):
    def __init__(self, field: str, value: Any, allowed: str):
        super().__init__(
            ErrorCode.PARAMETER_OUT_OF_RANGE,
            f"Parameter '{field}' = {value} is outside {allowed}",
            {"field": field, "value": str(value), "allowed": allowed}
        )


class EdgeListFormatException(ValidationException):
    def __init__(self, source: str, line: int, reason: str):
        super().__init__(
            ErrorCode.EDGE_LIST_FORMAT,
            f"{source}:{line}: {reason}",
            {"source": source, "line": line, "reason": reason}
        )


class InvalidDocumentException(ValidationException):
    def __init__(self, source: str, field: str, reason: str):
        super().__init__(
            ErrorCode.INVALID_DOCUMENT,
            f"{source}: invalid field '{field}': {reason}",
            {"source": source, "field": field, "reason": reason}
        )


# System Exceptions
class SystemException(GraphLimException):
    """Base system exception."""
    pass


class InvariantViolationException(SystemException):
    def __init__(self, invariant: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            ErrorCode.INVARIANT_VIOLATION,
            f"Invariant violated: {invariant}",
            {"invariant": invariant, **(details or {})}
        )


# Exception mapping for process exit codes
EXCEPTION_EXIT_CODE_MAP = {
    ErrorCode.INVALID_VERTEX: 1,
    ErrorCode.DEGREE_BOUND_EXCEEDED: 1,
    ErrorCode.INVALID_GRAPH: 1,
    ErrorCode.SIZE_MISMATCH: 1,
    ErrorCode.DEGREE_BOUND_MISMATCH: 1,
    ErrorCode.EMPTY_GRAPH: 1,
    ErrorCode.INVALID_LABELING: 1,

    ErrorCode.CANONICALIZATION_LIMIT: 1,
    ErrorCode.STATISTICS_MISMATCH: 1,
    ErrorCode.INVALID_KEY: 1,

    ErrorCode.EXACT_LIMIT_EXCEEDED: 1,

    ErrorCode.NOT_PATH_LIKE: 1,
    ErrorCode.NOT_TORUS: 1,
    ErrorCode.NOT_FOREST: 1,
    ErrorCode.PARTITION_MISMATCH: 1,

    ErrorCode.FUNCTIONAL_EVALUATION_FAILED: 1,
    ErrorCode.NON_SCALAR_FUNCTIONAL: 1,
    ErrorCode.UNKNOWN_FUNCTIONAL: 1,

    ErrorCode.MISSING_KERNEL_CLASS: 1,
    ErrorCode.KERNEL_NOT_WELL_DEFINED: 1,
    ErrorCode.KERNEL_ASYMMETRIC: 1,
    ErrorCode.MATRIX_ASYMMETRIC: 1,
    ErrorCode.UNKNOWN_KERNEL: 1,
    ErrorCode.UNKNOWN_REFERENCE: 1,

    ErrorCode.SEQUENCE_TOO_SHORT: 1,
    ErrorCode.INVALID_MANIFEST: 1,
    ErrorCode.GENERATION_INFEASIBLE: 1,
    ErrorCode.REJECTION_CAP_EXCEEDED: 1,
    ErrorCode.UNKNOWN_FAMILY: 1,

    ErrorCode.INVALID_INPUT: 1,
    ErrorCode.PARAMETER_OUT_OF_RANGE: 1,
    ErrorCode.EDGE_LIST_FORMAT: 1,
    ErrorCode.INVALID_DOCUMENT: 1,

    ErrorCode.INTERNAL_ERROR: 2,
    ErrorCode.INVARIANT_VIOLATION: 2,
}


def get_exit_code(error_code: ErrorCode) -> int:
    """Get process exit code for error code."""
    return EXCEPTION_EXIT_CODE_MAP.get(error_code, 2)
