"""
Exception hierarchy shared by every module.

Each error carries the CLI exit code it maps to, so the command layer only has
to catch FlowMutError.
"""
from enum import IntEnum
from typing import List, Optional


class ExitCode(IntEnum):
    OK = 0
    ORIGINAL_FAILED = 1
    CONFIG_ERROR = 2
    STALE_STATE = 3


class FlowMutError(Exception):
    exit_code: ExitCode = ExitCode.CONFIG_ERROR


class ConfigError(FlowMutError):
    """Invalid configuration file, flag or identifier"""


class DslError(FlowMutError):
    """Source text failed to lex, parse or type-check"""

    def __init__(self, diagnostics: List["ParseDiagnostic"]):  # noqa: F821
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class TestSuiteError(FlowMutError):
    """Test suite file does not match the program it targets"""
    __test__ = False


class OriginalProgramFailed(FlowMutError):
    """The original program does not pass its own tests"""
    exit_code = ExitCode.ORIGINAL_FAILED


class StaleReportError(FlowMutError):
    """A previous report does not belong to the current sources/config"""
    exit_code = ExitCode.STALE_STATE


class PatchError(FlowMutError):
    """A mutant patch could not be applied; indicates a generator bug"""


class SiteLookupError(FlowMutError, LookupError):
    """Unknown transformation site id"""


class UdfRuntimeError(Exception):
    """Raised while evaluating a UDF; the interpreter attaches the site id"""

    def __init__(self, message: str, site: Optional[int] = None):
        super().__init__(message)
        self.message = message
        self.site = site


class InputMismatchError(FlowMutError, ValueError):
    """Execution inputs do not cover the program's declared inputs"""
