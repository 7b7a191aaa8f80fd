# ruff: noqa: F401
from .jgroup import (
    J_FAMILIES,
    applicable_families,
    is_in_j,
    j_generators,
    quaternion_block,
    sample_j_element,
    transport,
)
from .lattices import (
    MAX_ENUMERATION,
    crystal_isomorphism,
    enumerate_crystals,
    hermite_lattices,
    is_crystal,
    j_orbit,
    minimal_crystal_ball,
    slopes_in_unit_interval,
)
from .minset import (
    MinPointParams,
    apartment_min_projection,
    displacement,
    is_in_min,
    is_in_min_power,
    min_exponents,
    min_point,
    standard_frame,
)
from .scan import SamplerConfig, kappa_scan, kappa_scan_async, random_unimodular
from .suites import SUITES, SuiteConfig, describe_instance, verify_suite
