"""Exception types shared across the package."""


class TopoKernelError(Exception):
    """Base class for all topokernel-specific errors."""


class DatasetError(TopoKernelError):
    """A dataset could not be ingested (e.g. a mandatory file is missing)."""


class DatasetFormatError(DatasetError):
    """A dataset file is present but malformed.

    Carries the offending file and 1-based line number so the message
    pinpoints the bad record.
    """

    def __init__(self, path, line_no, message):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{self.path}:{line_no}: {message}")


class UnsupportedDatasetError(DatasetError):
    """The dataset is readable but outside what this library supports."""


class StratificationError(TopoKernelError):
    """A stratified fold plan cannot be built (class too small for k)."""


class TrainingError(TopoKernelError):
    """SVM training received an unusable problem (e.g. one class only)."""
