# ruff: noqa: F401
from .exceptions import BaseError, InputError, PrecisionExhausted
from .logger import logger, set_stderr_logger
from .types import (
    SCHEMA_VERSION,
    CheckResult,
    RunConfig,
    ScanRecord,
    ScanReport,
    VerificationReport,
)
from .util import INFINITY, format_rational, parse_rational, run_in_thread, sample_rng
