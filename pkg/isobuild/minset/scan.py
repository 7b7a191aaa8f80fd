"""Empirical check of the displacement bound d(x, Fx)^2 >= max(min(nu)^2, kappa^2 d(x, Min)^2)."""

from __future__ import annotations

import asyncio
import random
from dataclasses import dataclass
from fractions import Fraction

from isobuild.building import METRIC_CONVENTION, Norm, distance_squared
from isobuild.core.exceptions import DenominatorCapExceeded, EmptySample, InvalidParams
from isobuild.core.logger import scoped
from isobuild.core.types import CheckResult, ScanRecord, ScanReport
from isobuild.core.util import format_rational, run_in_thread, sample_rng
from isobuild.crystals import (
    IsoclineDecomposition,
    Isocrystal,
    isocline_decomposition,
    min_nu,
    newton_point,
)
from isobuild.padic import Matrix

from .minset import apartment_min_projection, displacement, is_in_min, standard_frame

log = scoped("scan")


@dataclass(frozen=True)
class SamplerConfig:
    samples: int
    seed: int = 0
    spread: int = 2
    jitter: bool = True
    workers: int = 4


def random_unimodular(ctx, n: int, rng: random.Random) -> Matrix:
    """L U with unitriangular integral factors and a random row order."""
    p = ctx.p
    lower = [[0] * n for _ in range(n)]
    upper = [[0] * n for _ in range(n)]
    for i in range(n):
        lower[i][i] = upper[i][i] = 1
        for j in range(i):
            lower[i][j] = rng.randrange(0, p * p)
            upper[j][i] = rng.randrange(0, p * p)
    order = list(range(n))
    rng.shuffle(order)
    perm = [[1 if order[i] == j else 0 for j in range(n)] for i in range(n)]
    return (
        Matrix.from_rows(ctx, perm)
        @ Matrix.from_rows(ctx, lower)
        @ Matrix.from_rows(ctx, upper)
    )


@dataclass(frozen=True)
class _Sample:
    record: ScanRecord
    displacement_sq: Fraction
    bound_sq: Fraction | None


def _scan_one(
    ic: Isocrystal,
    dec: IsoclineDecomposition,
    frame: Matrix | None,
    config: SamplerConfig,
    index: int,
) -> _Sample:
    rng = sample_rng(config.seed, index)
    denominator = newton_point(ic).denominator
    exponents = tuple(
        Fraction(rng.randint(-config.spread * denominator, config.spread * denominator), denominator)
        for _ in range(ic.n)
    )
    base = frame if frame is not None else Matrix.identity(ic.ctx, ic.n)
    jittered = config.jitter and rng.random() < 0.5
    basis = base @ random_unimodular(ic.ctx, ic.n, rng) if jittered else base
    alpha = Norm(basis, exponents)

    disp = displacement(ic, alpha)
    in_min = is_in_min(ic, alpha, dec)
    bound: Fraction | None = None
    if in_min:
        bound = Fraction(0)
    elif frame is not None:
        try:
            projected, apartment_bound = apartment_min_projection(ic, exponents)
            bound = apartment_bound if not jittered else distance_squared(alpha, projected)
        except DenominatorCapExceeded as exc:
            log.debug(f"sample {index}: no distance bound ({exc})")
    ratio = disp / bound if bound else None
    record = ScanRecord(
        index=index,
        exponents=[format_rational(c) for c in exponents],
        jittered=jittered,
        displacement_sq=format_rational(disp),
        in_min=in_min,
        bound_sq=None if bound is None else format_rational(bound),
        ratio=None if ratio is None else format_rational(ratio),
    )
    return _Sample(record=record, displacement_sq=disp, bound_sq=bound)


def _scan_chunk(
    ic: Isocrystal,
    dec: IsoclineDecomposition,
    frame: Matrix | None,
    config: SamplerConfig,
    indices: list[int],
) -> list[_Sample]:
    return [_scan_one(ic, dec, frame, config, i) for i in indices]


def _prepare(ic: Isocrystal, config: SamplerConfig):
    if config.samples < 1:
        raise EmptySample("kappa scan needs at least one sample")
    try:
        frame = standard_frame(ic)
    except InvalidParams:
        log.warning("no standard frame: distance bounds to Min are unavailable")
        frame = None
    return isocline_decomposition(ic), frame


def _kappa_check(kappa_sq: Fraction | None) -> CheckResult:
    if kappa_sq is None:
        return CheckResult(
            name="kappa_positive",
            status="SKIP",
            detail="no sample outside Min with a distance bound",
        )
    return CheckResult(
        name="kappa_positive",
        status="PASS" if kappa_sq > 0 else "FAIL",
        detail=f"empirical kappa^2 = {format_rational(kappa_sq)} against an upper bound for dist^2 to Min",
    )


def _report(ic: Isocrystal, config: SamplerConfig, results: list[_Sample]) -> ScanReport:
    nu_sq = min_nu(newton_point(ic))
    results = sorted(results, key=lambda r: r.record.index)
    below = [r.record.index for r in results if r.displacement_sq < nu_sq]
    mismatched = [
        r.record.index for r in results if r.record.in_min != (r.displacement_sq == nu_sq)
    ]
    ratios = [r.displacement_sq / r.bound_sq for r in results if r.bound_sq]
    kappa_sq = min(ratios) if ratios else None

    checks = [
        CheckResult(
            name="displacement_lower_bound",
            status="FAIL" if below else "PASS",
            detail=f"displacement^2 >= {format_rational(nu_sq)} on every sample",
            witness={"indices": below} if below else None,
        ),
        CheckResult(
            name="min_characterization",
            status="FAIL" if mismatched else "PASS",
            detail="in Min exactly when displacement^2 equals min(nu)^2",
            witness={"indices": mismatched} if mismatched else None,
        ),
        _kappa_check(kappa_sq),
    ]
    status = "PASS" if all(c.passed for c in checks) else "FAIL"
    log.info(f"kappa scan over {len(results)} samples: {status}, kappa^2 = {kappa_sq}")
    return ScanReport(
        seed=config.seed,
        samples=len(results),
        min_nu_sq=format_rational(nu_sq),
        min_displacement_sq=format_rational(min(r.displacement_sq for r in results)),
        kappa_sq=None if kappa_sq is None else format_rational(kappa_sq),
        metric_convention=METRIC_CONVENTION,
        status=status,
        checks=checks,
        records=[r.record for r in results],
    )


def kappa_scan(ic: Isocrystal, config: SamplerConfig) -> ScanReport:
    dec, frame = _prepare(ic, config)
    results = _scan_chunk(ic, dec, frame, config, list(range(config.samples)))
    return _report(ic, config, results)


async def kappa_scan_async(ic: Isocrystal, config: SamplerConfig) -> ScanReport:
    """`kappa_scan` with samples spread over worker threads; the report is identical."""
    dec, frame = _prepare(ic, config)
    workers = max(1, min(config.workers, config.samples))
    chunks = [list(range(config.samples))[k::workers] for k in range(workers)]
    scan_chunk = run_in_thread(_scan_chunk)
    parts = await asyncio.gather(*(scan_chunk(ic, dec, frame, config, chunk) for chunk in chunks))
    return _report(ic, config, [r for part in parts for r in part])
