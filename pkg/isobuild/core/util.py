import asyncio
import functools
import math
import random
from fractions import Fraction
from typing import Iterable

# Valuation of zero; compares above every Fraction.
INFINITY = math.inf


def parse_rational(value: str | int | Fraction) -> Fraction:
    """Parse "a/b", "a" or an int into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(value.strip())


def format_rational(value: Fraction | int) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def lcm_all(values: Iterable[int]) -> int:
    result = 1
    for v in values:
        result = math.lcm(result, v)
    return result


def denominator_lcm(values: Iterable[Fraction]) -> int:
    return lcm_all(Fraction(v).denominator for v in values)


def ceil_fraction(value: Fraction) -> int:
    return -((-value.numerator) // value.denominator)


def sample_rng(seed: int, index: int) -> random.Random:
    """Independent random stream for the sample at `index`.

    String seeds hash deterministically, so a sample does not depend on how
    the scan was chunked across workers.
    """
    return random.Random(f"{seed}:{index}")


def run_in_thread(func):
    @functools.wraps(func)
    async def run(*args, **kwargs):
        return await asyncio.to_thread(func, *args, **kwargs)

    return run
