"""Engine error types.

Every failure the engine can signal to callers derives from EngineError and
carries a stable machine-readable ``code`` so the CLI and HTTP layers can map
errors without string matching.
"""


class EngineError(Exception):
    code = "engine-error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.details:
            out["details"] = self.details
        return out


# --- ingest ---------------------------------------------------------------

class MissingFile(EngineError):
    code = "missing-file"


class HeaderMismatch(EngineError):
    code = "header-mismatch"


class EmptyTable(EngineError):
    code = "empty-table"


class InvalidDescriptor(EngineError):
    code = "invalid-descriptor"


class InvalidCrosswalk(EngineError):
    code = "invalid-crosswalk"


class NoOverlap(EngineError):
    code = "no-overlap"


class AllColumnsDropped(EngineError):
    code = "all-columns-dropped"


class TooFewRows(EngineError):
    code = "too-few-rows"


class EmptyColumn(EngineError):
    code = "empty-column"


# --- preprocess / pca ------------------------------------------------------

class AllColumnsConstant(EngineError):
    code = "all-columns-constant"


class NotStandardized(EngineError):
    code = "not-standardized"


class NotSymmetric(EngineError):
    code = "not-symmetric"


class NoConvergence(EngineError):
    code = "no-convergence"


class DimensionMismatch(EngineError):
    code = "dimension-mismatch"


class TooFewComponents(EngineError):
    code = "too-few-components"


# --- cluster ---------------------------------------------------------------

class KTooLarge(EngineError):
    code = "k-too-large"


class KRangeInvalid(EngineError):
    code = "k-range-invalid"


class ShapeMismatch(EngineError):
    code = "shape-mismatch"


class SingleCluster(EngineError):
    code = "single-cluster"


class TooFewEntries(EngineError):
    code = "too-few-entries"


class TooManyRows(EngineError):
    code = "too-many-rows"


# --- interpret / serve -----------------------------------------------------

class AlignmentError(EngineError):
    code = "alignment-error"


class UnknownFeature(EngineError):
    code = "unknown-feature"


class UnknownCounty(EngineError):
    code = "unknown-county"


class BadOperator(EngineError):
    code = "bad-operator"


class IncompleteBundle(EngineError):
    code = "incomplete-bundle"


class MissingBundle(EngineError):
    code = "missing-bundle"


class PortInUse(EngineError):
    code = "port-in-use"
