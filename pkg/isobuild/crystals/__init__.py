# ruff: noqa: F401
from .decomposition import (
    IsoclineBlock,
    IsoclineDecomposition,
    is_decent,
    isocline_decomposition,
)
from .isocrystal import (
    Isocrystal,
    NewtonPoint,
    SimpleBlock,
    fixed_degree,
    min_nu,
    newton_point,
    sigma_conjugate,
    slope_determinant_identity,
    standard_form,
    twisted_power,
    twisted_product,
)
