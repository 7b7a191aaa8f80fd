# ruff: noqa: F401
from .field import (
    FieldContext,
    FieldElement,
    arithmetic,
    extend_field,
    frobenius,
    make_field,
    valuation,
)
from .linalg import (
    Matrix,
    SmithForm,
    charpoly,
    determinant,
    elementary_divisors,
    evaluate_polynomial,
    integral_scaling,
    inverse,
    is_unimodular,
    kernel_basis,
    rank,
    row_reduce,
    smith_normal_form,
    solve,
)
from .polynomial import (
    NewtonPolygonData,
    Polynomial,
    newton_polygon,
    slope_factorization,
)
from .residue import ResidueField
