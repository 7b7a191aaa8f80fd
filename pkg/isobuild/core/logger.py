import sys

from loguru import logger

# Every record carries a scope (the suite, scan or subcommand that emitted it).
logger.configure(extra={"scope": "isobuild"})


def set_stderr_logger(level: str = "WARNING"):
    logger.remove()
    logger.add(
        sys.stderr,
        level=level,
        format="<level>{level: <8}</level> | <cyan>{extra[scope]}</cyan> | <level>{message}</level>",
    )
    logger.level("DEBUG", color="<fg 128,128,128>")


def scoped(scope: str):
    """A logger whose records are tagged with `scope`."""
    return logger.bind(scope=scope)
