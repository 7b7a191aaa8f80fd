"""Named verification suites, each a list of PASS/FAIL checks over one isocrystal."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from isobuild.building import (
    METRIC_CONVENTION,
    CrystalLattice,
    Norm,
    ball_lattice,
    distance_squared,
    geodesic_point,
    group_act,
    power_fb_act,
    standard_lattice,
)
from isobuild.core.exceptions import (
    BallNotCrystal,
    DecompositionUnverified,
    DenominatorCapExceeded,
    NotInJ,
    NotInMin,
    UnknownSuite,
)
from isobuild.core.logger import scoped
from isobuild.core.types import CheckResult, VerificationReport
from isobuild.core.util import format_rational, sample_rng
from isobuild.crystals import (
    Isocrystal,
    isocline_decomposition,
    min_nu,
    newton_point,
    sigma_conjugate,
    slope_determinant_identity,
)
from isobuild.padic import Matrix

from .jgroup import sample_j_element
from .lattices import enumerate_crystals, is_crystal, j_orbit, slopes_in_unit_interval
from .minset import MinPointParams, displacement, is_in_min, is_in_min_power, min_point
from .scan import SamplerConfig, kappa_scan, random_unimodular

SUITES = ("prop1", "thm2", "bound37", "remark6")

# Random streams of different checks must not overlap.
_STREAM = {"midpoint": 0, "power": 1, "j": 2, "transport": 3, "equality": 4}


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 0
    samples: int = 50
    radius: int = 1
    j_samples: int = 20
    transports: int = 3


def _rng(config: SuiteConfig, stream: str, i: int) -> random.Random:
    return sample_rng(config.seed, 100_000 * _STREAM[stream] + i)


def _check(name: str, failures: list, detail: str) -> CheckResult:
    return CheckResult(
        name=name,
        status="FAIL" if failures else "PASS",
        detail=detail,
        witness=failures[0] if failures else None,
    )


def _random_min_point(ic: Isocrystal, rng: random.Random) -> Norm:
    return min_point(ic, MinPointParams.random(newton_point(ic), rng))


def _lemma5(ic: Isocrystal) -> CheckResult:
    ok = slope_determinant_identity(ic)
    return CheckResult(
        name="lemma5",
        status="PASS" if ok else "FAIL",
        detail="sum of h * lambda equals val(det b)",
    )


def _prop1(ic: Isocrystal, config: SuiteConfig) -> list[CheckResult]:
    dec = isocline_decomposition(ic)
    np = newton_point(ic)

    convexity = []
    for i in range(config.samples):
        rng = _rng(config, "midpoint", i)
        alpha, beta = _random_min_point(ic, rng), _random_min_point(ic, rng)
        mid = geodesic_point(alpha, beta, Fraction(1, 2))
        if not is_in_min(ic, mid, dec):
            convexity.append({"index": i, "alpha": alpha.to_json(), "beta": beta.to_json()})

    k = max(2, ic.s)
    inclusion, displaced = [], []
    expected = k * k * min_nu(np)
    for i in range(max(1, config.samples // 5)):
        alpha = _random_min_point(ic, _rng(config, "power", i))
        if not is_in_min_power(ic, alpha, k, dec):
            inclusion.append({"index": i, "alpha": alpha.to_json()})
        disp = distance_squared(alpha, power_fb_act(ic, alpha, k))
        if disp != expected:
            displaced.append({"index": i, "displacement_sq": format_rational(disp)})

    return [
        _check("midpoint_convexity", convexity, f"midpoints of {config.samples} Min pairs lie in Min"),
        _check("power_min_inclusion", inclusion, f"Min(F) lies in Min(F^{k})"),
        _check(
            "power_displacement",
            displaced,
            f"d(x, F^{k} x)^2 = {format_rational(expected)} on Min(F)",
        ),
    ]


def _random_isomorphism(ic: Isocrystal, rng: random.Random) -> Matrix:
    """A unimodular matrix twisted by a diagonal of Z_q units, so sigma moves it when m > 1."""
    ctx = ic.ctx
    units = []
    for _ in range(ic.n):
        coeffs = [rng.randrange(0, ctx.p) for _ in range(ctx.m)]
        if not any(coeffs):
            coeffs[0] = 1
        units.append(ctx.from_zq(coeffs))
    return random_unimodular(ctx, ic.n, rng) @ Matrix.diagonal(ctx, units)


def _thm2(ic: Isocrystal, config: SuiteConfig) -> list[CheckResult]:
    dec = isocline_decomposition(ic)
    nu_sq = min_nu(newton_point(ic))
    scan = kappa_scan(ic, SamplerConfig(samples=config.samples, seed=config.seed, workers=1))
    checks = [c for c in scan.checks if c.name in ("displacement_lower_bound", "min_characterization")]

    equality = []
    for i in range(max(1, config.samples // 5)):
        alpha = _random_min_point(ic, _rng(config, "equality", i))
        disp = displacement(ic, alpha)
        if disp != nu_sq:
            equality.append({"index": i, "displacement_sq": format_rational(disp)})
    checks.append(
        _check("min_displacement_attained", equality, f"Min points have displacement^2 {format_rational(nu_sq)}")
    )

    stabilized = []
    for i in range(config.j_samples):
        rng = _rng(config, "j", i)
        g = sample_j_element(ic, "random", rng)
        alpha = _random_min_point(ic, rng)
        if not is_in_min(ic, group_act(g, alpha), dec):
            stabilized.append({"index": i, "g": g.to_json(), "alpha": alpha.to_json()})
    checks.append(_check("j_preserves_min", stabilized, f"{config.j_samples} elements of J map Min into Min"))

    transported = []
    for i in range(config.transports):
        rng = _rng(config, "transport", i)
        g = _random_isomorphism(ic, rng)
        conjugate = sigma_conjugate(ic, g)
        alpha = _random_min_point(ic, rng)
        if not is_in_min(conjugate, group_act(g, alpha)):
            transported.append({"index": i, "g": g.to_json(), "alpha": alpha.to_json()})
    checks.append(
        _check("sigma_conjugation_transport", transported, "g maps Min(b sigma) onto Min(g b sigma(g)^-1 sigma)")
    )
    return checks


def _bound37(ic: Isocrystal, config: SuiteConfig) -> list[CheckResult]:
    scan = kappa_scan(ic, SamplerConfig(samples=config.samples, seed=config.seed, workers=1))
    doubled = kappa_scan(ic, SamplerConfig(samples=2 * config.samples, seed=config.seed, workers=1))
    checks = list(scan.checks)
    if scan.kappa_sq is None or doubled.kappa_sq is None:
        stable = CheckResult(
            name="kappa_stability",
            status="SKIP",
            detail="no kappa estimate to compare",
        )
    else:
        small, large = Fraction(scan.kappa_sq), Fraction(doubled.kappa_sq)
        stable = CheckResult(
            name="kappa_stability",
            status="PASS" if small <= 2 * large else "FAIL",
            detail=f"kappa^2 {scan.kappa_sq} at {scan.samples} samples, {doubled.kappa_sq} at {doubled.samples}",
        )
    checks.append(stable)
    return checks


def _window_balls(ic: Isocrystal, radius: int) -> list[CrystalLattice]:
    """Balls of Min points lying between p^radius O^n and p^-radius O^n, without repeats."""
    np = newton_point(ic)
    D = np.denominator
    count = sum(1 for _ in np.simple_blocks())
    inner = standard_lattice(ic.ctx, ic.n).scaled(radius)
    outer = standard_lattice(ic.ctx, ic.n).scaled(-radius)
    grid = [Fraction(a, D) for a in range(-(radius + 1) * D, (radius + 1) * D + 1)]
    balls: list[CrystalLattice] = []

    def visit(prefix: tuple[Fraction, ...]):
        if len(prefix) == count:
            M = ball_lattice(min_point(ic, MinPointParams(prefix)), 0)
            if M.contains_lattice(inner) and outer.contains_lattice(M) and not any(M == B for B in balls):
                balls.append(M)
            return
        for t in grid:
            visit(prefix + (t,))

    visit(())
    return balls


def _remark6(ic: Isocrystal, config: SuiteConfig) -> list[CheckResult]:
    if not slopes_in_unit_interval(ic):
        return [
            CheckResult(
                name="slope_range",
                status="FAIL",
                detail=f"slopes {newton_point(ic)} leave [0, 1]; no crystals exist",
            )
        ]
    radius = config.radius
    crystals = enumerate_crystals(ic, radius)
    balls = _window_balls(ic, radius)

    not_crystal = [M.to_json() for M in balls if not is_crystal(ic, M)]
    missing = [M.to_json() for M in balls if not any(M == C for C in crystals)]
    unreached = [M.to_json() for M in crystals if not any(M == B for B in balls)]

    disconnected = []
    if balls:
        reached = [L for _, L in j_orbit(ic, balls[0], depth=max(4, 4 * radius))]
        disconnected = [M.to_json() for M in balls[1:] if not any(M == L for L in reached)]

    return [
        _check("balls_are_crystals", not_crystal, f"{len(balls)} balls of Min points are F- and V-stable"),
        _check(
            "balls_enumerated",
            missing,
            f"every ball in the window is among the {len(crystals)} enumerated crystals",
        ),
        _check(
            "crystals_are_balls",
            unreached,
            f"each of the {len(crystals)} crystals in the window is the ball of a Min point",
        ),
        _check("minimal_crystals_connected", disconnected, "minimal crystals lie in one J-orbit"),
    ]


_RUNNERS: dict[str, Callable[[Isocrystal, SuiteConfig], list[CheckResult]]] = {
    "prop1": _prop1,
    "thm2": _thm2,
    "bound37": _bound37,
    "remark6": _remark6,
}


def describe_instance(ic: Isocrystal) -> dict:
    return {
        "p": ic.p,
        "m": ic.ctx.m,
        "n": ic.n,
        "s": ic.s,
        "N": ic.ctx.N,
        "newton_point": newton_point(ic).to_json(),
    }


def verify_suite(
    ic: Isocrystal,
    suite: str,
    config: SuiteConfig | None = None,
    instance: dict | None = None,
) -> VerificationReport:
    if suite not in _RUNNERS:
        raise UnknownSuite(f"unknown suite {suite!r}, expected one of {', '.join(SUITES)}")
    config = config or SuiteConfig()
    log = scoped(suite)
    try:
        checks = _RUNNERS[suite](ic, config)
    except (BallNotCrystal, DecompositionUnverified, DenominatorCapExceeded, NotInJ, NotInMin) as exc:
        log.warning(f"suite aborted: {exc}")
        checks = [CheckResult(name=type(exc).__name__, status="FAIL", detail=str(exc))]
    checks.append(_lemma5(ic))
    for check in checks:
        if not check.passed:
            log.warning(f"check {check.name} failed: {check.detail}")
    report = VerificationReport.from_checks(
        checks,
        suite=suite,
        instance=instance or describe_instance(ic),
        seed=config.seed,
        metric_convention=METRIC_CONVENTION,
    )
    log.info(f"suite {suite}: {report.status}")
    return report
