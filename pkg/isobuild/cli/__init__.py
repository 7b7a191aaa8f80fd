# ruff: noqa: F401
from .main import exit_code, make_parser, run
