import argparse
import asyncio
import math
import sys
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from isobuild.building import denominator_cap
from isobuild.core import set_stderr_logger
from isobuild.core.exceptions import (
    BaseError,
    DivisionByZero,
    InputError,
    NotInMin,
    PrecisionExhausted,
    SlopeRange,
)
from isobuild.core.logger import scoped
from isobuild.core.types import InstanceModel, RunConfig
from isobuild.core.util import format_rational, parse_rational, sample_rng
from isobuild.crystals import (
    Isocrystal,
    is_decent,
    isocline_decomposition,
    min_nu,
    newton_point,
)
from isobuild.minset import (
    SUITES,
    MinPointParams,
    SamplerConfig,
    SuiteConfig,
    crystal_isomorphism,
    describe_instance,
    displacement,
    enumerate_crystals,
    is_in_min,
    is_in_min_power,
    kappa_scan_async,
    min_point,
    verify_suite,
)

from .io import (
    build_isocrystal,
    build_lattice,
    build_norm,
    envelope,
    instance_hash,
    load_instance,
    write_output,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_PRECISION = 0, 1, 2, 3

# Errors caused by the instance rather than by the computation.
_INPUT_ERRORS = (InputError, DivisionByZero, SlopeRange, NotInMin)

log = scoped("cli")


def exit_code(exc: BaseError) -> int:
    if isinstance(exc, PrecisionExhausted):
        return EXIT_PRECISION
    if isinstance(exc, _INPUT_ERRORS):
        return EXIT_INPUT
    return EXIT_FAIL


def _displacement(ic: Isocrystal, alpha) -> dict:
    return {
        "displacement_sq": format_rational(displacement(ic, alpha)),
        "min_nu_sq": format_rational(min_nu(newton_point(ic))),
    }


def _slopes(ic: Isocrystal, instance: InstanceModel, args, config: RunConfig) -> tuple[dict, int]:
    return {"slopes": newton_point(ic).to_json()}, EXIT_OK


def _decompose(ic, instance, args, config):
    return {"decomposition": isocline_decomposition(ic).to_json()}, EXIT_OK


def _decent(ic, instance, args, config):
    s = args.s or math.lcm(ic.s, newton_point(ic).denominator)
    return {"s": s, "decent": is_decent(ic, s)}, EXIT_OK


def _min_check(ic, instance, args, config):
    if instance.norm is None:
        raise InputError('min-check needs a "norm" in the instance')
    alpha = build_norm(ic.ctx, instance.norm, ic.n)
    inside = is_in_min(ic, alpha) if args.power == 1 else is_in_min_power(ic, alpha, args.power)
    return {"power": args.power, "in_min": inside, **_displacement(ic, alpha)}, EXIT_OK


def _min_point(ic, instance, args, config):
    if instance.params is not None:
        params = MinPointParams(tuple(parse_rational(t) for t in instance.params.offsets))
    else:
        params = MinPointParams.random(newton_point(ic), sample_rng(config.seed, 0))
    alpha = min_point(ic, params)
    return {
        "offsets": [format_rational(t) for t in params.offsets],
        "norm": alpha.to_json(),
        **_displacement(ic, alpha),
    }, EXIT_OK


def _scan(ic, instance, args, config):
    sampler = SamplerConfig(samples=config.samples, seed=config.seed, workers=config.workers)
    report = asyncio.run(kappa_scan_async(ic, sampler))
    return report.model_dump(mode="json"), EXIT_OK if report.passed else EXIT_FAIL


def _crystals(ic, instance, args, config):
    crystals = enumerate_crystals(ic, config.radius)
    lattices = [build_lattice(ic.ctx, m) for m in instance.lattices or []]
    isomorphisms = []
    for i, target in enumerate(lattices[1:], start=1):
        g = crystal_isomorphism(ic, lattices[0], target)
        isomorphisms.append({"source": 0, "target": i, "g": None if g is None else g.to_json()})
    return {
        "radius": config.radius,
        "count": len(crystals),
        "crystals": [M.to_json() for M in crystals],
        "isomorphisms": isomorphisms,
    }, EXIT_OK


def _verify(ic, instance, args, config):
    if config.suite is None:
        raise InputError(f"verify needs --suite, one of {', '.join(SUITES)}")
    suite_config = SuiteConfig(seed=config.seed, samples=config.samples, radius=config.radius)
    described = {**describe_instance(ic), "sha256": instance_hash(instance)}
    report = verify_suite(ic, config.suite, suite_config, instance=described)
    return report.model_dump(mode="json"), EXIT_OK if report.passed else EXIT_FAIL


HANDLERS = {
    "slopes": _slopes,
    "decompose": _decompose,
    "decent": _decent,
    "min-check": _min_check,
    "min-point": _min_point,
    "scan": _scan,
    "crystals": _crystals,
    "verify": _verify,
}

# Flags that map onto RunConfig fields; unset flags fall back to the config file.
_CONFIG_FLAGS = (
    "prime",
    "degree",
    "precision",
    "seed",
    "denominator_cap",
    "samples",
    "radius",
    "suite",
    "workers",
    "input",
    "output",
    "level",
    "filter",
)


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, help="Override the prime of the instance.")
    common.add_argument("--degree", type=int, help="Degree m of the working field Q_{p^m}.")
    common.add_argument("--precision", type=int, help="Precision N in p-digits. (Defaults to 40)")
    common.add_argument("--seed", type=int, help="Seed of the sample streams. (Defaults to 0)")
    common.add_argument(
        "--denominator-cap",
        dest="denominator_cap",
        type=int,
        help="Largest exponent denominator before giving up. (Defaults to 12)",
    )
    common.add_argument("--samples", type=int, help="Samples per scan or suite. (Defaults to 200)")
    common.add_argument("--radius", type=int, help="Crystal enumeration radius. (Defaults to 1)")
    common.add_argument("--suite", type=str, choices=SUITES, help="Verification suite to run.")
    common.add_argument("--workers", type=int, help="Concurrent scan workers. (Defaults to 4)")
    common.add_argument("-i", "--input", type=str, help="Instance JSON file, '-' for stdin.")
    common.add_argument("-o", "--output", type=str, help="Output JSON file. (Defaults to stdout)")
    common.add_argument("--config", type=str, help="TOML file with defaults for these flags.")
    common.add_argument("--level", type=str, help="The logging level. (Defaults to 'WARNING')")
    common.add_argument(
        "-F",
        "--filter",
        type=str,
        help="Output filter compatible with jq. (Defaults to '.')",
    )

    parser = argparse.ArgumentParser(
        prog="isobuild",
        description="Isocrystals, the building of GL_n and the minimal set of Frobenius.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("slopes", parents=[common], help="Newton point of b.")
    sub.add_parser("decompose", parents=[common], help="Isocline decomposition of b.")
    decent = sub.add_parser("decent", parents=[common], help="Check the decency equation.")
    decent.add_argument("--s", type=int, help="Decency degree. (Defaults to s * slope denominators)")
    check = sub.add_parser("min-check", parents=[common], help="Is the instance norm in Min(F)?")
    check.add_argument("--power", type=int, default=1, help="Test Min(F^k). (Defaults to %(default)r)")
    sub.add_parser("min-point", parents=[common], help="Construct a point of Min(F).")
    sub.add_parser("scan", parents=[common], help="Empirical displacement bound scan.")
    sub.add_parser("crystals", parents=[common], help="Enumerate crystals in a window.")
    sub.add_parser("verify", parents=[common], help="Run a verification suite.")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    data = {}
    if args.config:
        with open(args.config, "rb") as f:
            data = tomllib.load(f)
    for name in _CONFIG_FLAGS:
        value = getattr(args, name)
        if value is not None:
            data[name] = value
    return RunConfig.model_validate(data)


def run(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        config = load_config(args)
        set_stderr_logger(config.level)
        instance = load_instance(config.input)
        log.debug(f"running {args.command} on {config.input or 'stdin'}")
        with denominator_cap(config.denominator_cap):
            ic = build_isocrystal(instance.isocrystal, config)
            payload, code = HANDLERS[args.command](ic, instance, args, config)
        write_output(envelope(payload, config), config)
        return code
    except BaseError as exc:
        print(exc.encode_json(), file=sys.stderr)
        return exit_code(exc)
    except (ValueError, OSError) as exc:
        # pydantic, JSON, TOML and jq errors are all ValueErrors.
        print(InputError(str(exc)).encode_json(), file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
