# ruff: noqa: F401
from .lattice import CrystalLattice, ball_lattice, standard_lattice
from .norm import (
    DEFAULT_DENOMINATOR_CAP,
    METRIC_CONVENTION,
    Norm,
    RelPosition,
    canonicalize,
    common_context,
    current_denominator_cap,
    denominator_cap,
    det_component,
    distance_squared,
    fb_act,
    geodesic_point,
    group_act,
    levi_adapt,
    norm_eval,
    norms_equal,
    power_fb_act,
    rel_position,
    restrict_norm,
    restricted_in_ambient,
    scale_by_power,
    sigma_act,
)
